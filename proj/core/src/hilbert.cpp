#include "wchain/hilbert.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace wchain {

BosonConfig rotate_config(const BosonConfig& config, int shift) {
  const int n = static_cast<int>(config.occ.size());
  BosonConfig out;
  out.occ.resize(n);
  out.total = config.total;
  int s = shift % n;
  if (s < 0) s += n;
  for (int r = 0; r < n; ++r) {
    out.occ[r] = config.occ[(r + s) % n];
  }
  return out;
}

Index BosonBasis::dimension_for(int n_sites, int cutoff) {
  if (n_sites < 1 || cutoff < 0) {
    throw std::invalid_argument("BosonBasis: need n_sites >= 1, cutoff >= 0");
  }
  // sum of binomials C(n_sites + m - 1, m), built up iteratively:
  // C(n+m-1, m) = C(n+m-2, m-1) * (n+m-1) / m
  unsigned long long shell = 1;
  unsigned long long total = 1;
  const auto limit =
      static_cast<unsigned long long>(std::numeric_limits<Index>::max());
  for (int m = 1; m <= cutoff; ++m) {
    const auto num = static_cast<unsigned long long>(n_sites) + m - 1;
    if (shell > limit / num) {
      throw std::overflow_error("BosonBasis: dimension overflows Index");
    }
    shell = shell * num / m;
    if (total > limit - shell) {
      throw std::overflow_error("BosonBasis: dimension overflows Index");
    }
    total += shell;
  }
  return static_cast<Index>(total);
}

std::uint64_t BosonBasis::key_of(const BosonConfig& config) {
  // FNV-1a over the occupation bytes.  Lookups confirm against the stored
  // occupation vector, so a hash collision costs a comparison, not
  // correctness.
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint8_t b : config.occ) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

BosonBasis::BosonBasis(int n_sites, int cutoff, Index max_configs)
    : n_sites_(n_sites), cutoff_(cutoff) {
  if (n_sites < 1) {
    throw std::invalid_argument("BosonBasis: n_sites must be >= 1");
  }
  if (cutoff < 0) {
    throw std::invalid_argument("BosonBasis: cutoff must be >= 0");
  }
  if (cutoff > 255) {
    throw std::invalid_argument("BosonBasis: cutoff must fit in one byte");
  }
  const Index dim = dimension_for(n_sites, cutoff);
  if (dim > max_configs) {
    throw std::runtime_error(
        "BosonBasis: dimension " + std::to_string(dim) +
        " exceeds the configured bound " + std::to_string(max_configs));
  }
  configs_.reserve(dim);
  lookup_.reserve(dim);

  // Depth-first placement, low site index first, which yields ascending
  // lexicographic order within each fixed-total shell.
  BosonConfig scratch;
  scratch.occ.assign(n_sites, 0);
  for (int m = 0; m <= cutoff; ++m) {
    scratch.total = m;
    auto place = [&](auto&& self, int site, int remaining) -> void {
      if (site == n_sites - 1) {
        scratch.occ[site] = static_cast<std::uint8_t>(remaining);
        lookup_.emplace(key_of(scratch), static_cast<Index>(configs_.size()));
        configs_.push_back(scratch);
        scratch.occ[site] = 0;
        return;
      }
      for (int v = 0; v <= remaining; ++v) {
        scratch.occ[site] = static_cast<std::uint8_t>(v);
        self(self, site + 1, remaining - v);
      }
      scratch.occ[site] = 0;
    };
    place(place, 0, m);
  }
}

Index BosonBasis::index_of(const BosonConfig& config) const {
  if (static_cast<int>(config.occ.size()) != n_sites_) {
    throw std::invalid_argument("BosonBasis: config has wrong site count");
  }
  auto [lo, hi] = lookup_.equal_range(key_of(config));
  for (auto it = lo; it != hi; ++it) {
    if (configs_[it->second].occ == config.occ) return it->second;
  }
  return -1;
}

std::shared_ptr<const BosonBasis> enumerate_boson_configs(int n_sites,
                                                          int cutoff,
                                                          Index max_configs) {
  return std::make_shared<const BosonBasis>(n_sites, cutoff, max_configs);
}

KSectorBasis build_k_sector_basis(const ModelParams& params, Quasimomentum k,
                                  Index max_configs) {
  params.validate();
  if (k.n_sites != params.n_sites) {
    throw std::invalid_argument(
        "build_k_sector_basis: momentum grid does not match n_sites");
  }
  return KSectorBasis{
      k, enumerate_boson_configs(params.n_sites, params.boson_cutoff,
                                 max_configs)};
}

RealSpaceBasis build_real_space_basis(const ModelParams& params,
                                      Index max_configs) {
  params.validate();
  return RealSpaceBasis{
      params.n_sites,
      enumerate_boson_configs(params.n_sites, params.boson_cutoff,
                              max_configs)};
}

TranslationOperator::TranslationOperator(const RealSpaceBasis& basis) {
  const Index dim = basis.dim();
  const int n = basis.n_sites;
  image_.resize(dim);
  BosonConfig shifted;
  for (Index i = 0; i < dim; ++i) {
    const int site = basis.site_of(i);
    const BosonConfig& c = basis.bosons->config(basis.config_of(i));
    // Bosons move forward one site together with the excitation:
    // occ'(j) = occ(j - 1), which is rotate_config with shift = -1.
    shifted = rotate_config(c, -1);
    const Index target = basis.bosons->index_of(shifted);
    image_[i] = basis.index((site + 1) % n, target);
  }
}

Eigen::VectorXcd TranslationOperator::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim()) {
    throw std::invalid_argument("TranslationOperator: dimension mismatch");
  }
  Eigen::VectorXcd out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[image_[i]] = v[i];
  return out;
}

Eigen::SparseMatrix<double> TranslationOperator::materialize() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(image_.size());
  for (Index i = 0; i < dim(); ++i) {
    trips.emplace_back(static_cast<int>(image_[i]), static_cast<int>(i), 1.0);
  }
  Eigen::SparseMatrix<double> t(dim(), dim());
  t.setFromTriplets(trips.begin(), trips.end());
  return t;
}

TranslationOperator translation_operator(const RealSpaceBasis& basis) {
  return TranslationOperator(basis);
}

}  // namespace wchain
