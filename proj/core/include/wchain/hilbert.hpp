#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wchain/model.hpp"

namespace wchain {

using Index = Eigen::Index;

/// Site-resolved boson occupation numbers plus their cached sum.
struct BosonConfig {
  std::vector<std::uint8_t> occ;
  int total = 0;
};

/// Cyclic relabeling of a configuration: out(r) = in((r + shift) mod N).
/// shift = +1 is the relabeling picked up when the excitation hops one site
/// forward and boson coordinates are re-expressed relative to it.
BosonConfig rotate_config(const BosonConfig& config, int shift);

/// All boson occupation configurations on n_sites sites with total boson
/// number <= cutoff, in canonical order: shells of fixed total (ascending),
/// lexicographic in the occupation vector inside each shell.  The vacuum is
/// always entry 0.
class BosonBasis {
 public:
  /// Number of configurations, sum_{m<=cutoff} C(n_sites+m-1, m), evaluated
  /// in closed form (no enumeration).  Throws std::overflow_error if the
  /// count does not fit in Index.
  static Index dimension_for(int n_sites, int cutoff);

  BosonBasis(int n_sites, int cutoff, Index max_configs);

  int n_sites() const { return n_sites_; }
  int cutoff() const { return cutoff_; }
  Index size() const { return static_cast<Index>(configs_.size()); }

  const BosonConfig& config(Index i) const { return configs_[i]; }
  /// Index of a configuration; -1 if it is not in the basis (over cutoff).
  Index index_of(const BosonConfig& config) const;

 private:
  int n_sites_;
  int cutoff_;
  std::vector<BosonConfig> configs_;
  std::unordered_multimap<std::uint64_t, Index> lookup_;

  static std::uint64_t key_of(const BosonConfig& config);
};

inline constexpr Index kDefaultMaxBosonConfigs = 4'000'000;

/// Enumerates boson configurations for the given model sizes.  Rejects runs
/// whose dimension exceeds max_configs, reporting the computed dimension.
std::shared_ptr<const BosonBasis> enumerate_boson_configs(
    int n_sites, int cutoff, Index max_configs = kDefaultMaxBosonConfigs);

/// Basis of one momentum block: excitation quasimomentum K together with
/// boson configurations expressed relative to the excitation site.  Basis
/// vector i is the normalized Bloch sum over lattice translations of
/// (excitation at site n) x (bosons at configs(i) shifted by n); entry 0
/// (the boson vacuum) is exactly the bare Bloch state of momentum K.
struct KSectorBasis {
  Quasimomentum k;
  std::shared_ptr<const BosonBasis> bosons;

  Index dim() const { return bosons->size(); }
  Index bare_index() const { return 0; }
};

KSectorBasis build_k_sector_basis(const ModelParams& params, Quasimomentum k,
                                  Index max_configs = kDefaultMaxBosonConfigs);

/// Product basis (excitation site n) x (absolute-frame boson config c),
/// flattened as n * n_boson_configs + c.
struct RealSpaceBasis {
  int n_sites;
  std::shared_ptr<const BosonBasis> bosons;

  Index dim() const { return static_cast<Index>(n_sites) * bosons->size(); }
  Index index(int site, Index config) const {
    return static_cast<Index>(site) * bosons->size() + config;
  }
  int site_of(Index i) const { return static_cast<int>(i / bosons->size()); }
  Index config_of(Index i) const { return i % bosons->size(); }
};

RealSpaceBasis build_real_space_basis(
    const ModelParams& params, Index max_configs = kDefaultMaxBosonConfigs);

/// One-site lattice translation on the real-space basis: the excitation and
/// every boson move forward by one site.  Stored as the permutation
/// image[i] = T applied to basis vector i; unitary by construction.
class TranslationOperator {
 public:
  explicit TranslationOperator(const RealSpaceBasis& basis);

  Index dim() const { return static_cast<Index>(image_.size()); }
  Index image(Index i) const { return image_[i]; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Eigen::SparseMatrix<double> materialize() const;

 private:
  std::vector<Index> image_;
};

TranslationOperator translation_operator(const RealSpaceBasis& basis);

}  // namespace wchain
