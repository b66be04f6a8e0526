#include "wchain/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wchain {

namespace {

// (config, amplitude) pairs produced by applying B(r) = b_r^dag + b_r to a
// configuration, with targets above the total-boson cutoff dropped.
struct Branch {
  BosonConfig config;
  double amp;
};

void apply_displacement(const BosonConfig& c, int rel_site, int cutoff,
                        double coeff, std::vector<Branch>& out) {
  const int n = static_cast<int>(c.occ.size());
  int r = rel_site % n;
  if (r < 0) r += n;
  if (c.total < cutoff) {
    Branch up;
    up.config = c;
    up.config.occ[r] += 1;
    up.config.total += 1;
    up.amp = coeff * std::sqrt(static_cast<double>(c.occ[r]) + 1.0);
    out.push_back(std::move(up));
  }
  if (c.occ[r] > 0) {
    Branch down;
    down.config = c;
    down.config.occ[r] -= 1;
    down.config.total -= 1;
    down.amp = coeff * std::sqrt(static_cast<double>(c.occ[r]));
    out.push_back(std::move(down));
  }
}

}  // namespace

KBlockOperator::KBlockOperator(const KSectorBasis& basis,
                               const ModelParams& params, Terms terms)
    : basis_(basis), params_(params) {
  params_.validate();
  if (basis_.k.n_sites != params_.n_sites ||
      basis_.bosons->n_sites() != params_.n_sites ||
      basis_.bosons->cutoff() != params_.boson_cutoff) {
    throw std::invalid_argument(
        "KBlockOperator: basis and parameters describe different systems");
  }
  const double kval = basis_.k.value();
  phase_plus_ = Complex(std::cos(kval), std::sin(kval));
  phase_minus_ = std::conj(phase_plus_);

  const BosonBasis& bos = *basis_.bosons;
  const Index d = bos.size();
  const int cutoff = params_.boson_cutoff;
  const double gw = params_.g * params_.hbar_omega_b;

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(d) * 12);
  std::vector<Branch> branches;

  auto add = [&](const BosonConfig& target, Complex val, Index col) {
    const Index row = bos.index_of(target);
    if (row >= 0) {
      trips.emplace_back(static_cast<int>(row), static_cast<int>(col), val);
    }
  };

  for (Index j = 0; j < d; ++j) {
    const BosonConfig& nu = bos.config(j);

    if (has_term(terms, Terms::kHopping)) {
      // Excitation hop forward re-expresses boson coordinates relative to
      // the new site (relabeling shift +1) and carries e^{-iK}; backward is
      // the conjugate.
      add(rotate_config(nu, +1), -params_.t_e * phase_minus_, j);
      add(rotate_config(nu, -1), -params_.t_e * phase_plus_, j);
    }

    if (has_term(terms, Terms::kFreeBoson)) {
      trips.emplace_back(static_cast<int>(j), static_cast<int>(j),
                         Complex(params_.hbar_omega_b * nu.total, 0.0));
    }

    if (has_term(terms, Terms::kBreathing)) {
      branches.clear();
      apply_displacement(nu, -1, cutoff, +1.0, branches);
      apply_displacement(nu, +1, cutoff, -1.0, branches);
      for (const Branch& b : branches) {
        add(b.config, Complex(gw * b.amp, 0.0), j);
      }
    }

    if (has_term(terms, Terms::kPeierls)) {
      // Forward hop dressed by the bond displacement B(+1) - B(0), then the
      // same frame relabeling and phase as the bare forward hop.
      branches.clear();
      apply_displacement(nu, +1, cutoff, +1.0, branches);
      apply_displacement(nu, 0, cutoff, -1.0, branches);
      for (const Branch& b : branches) {
        add(rotate_config(b.config, +1), gw * b.amp * phase_minus_, j);
      }
      // Backward hop dressed by B(0) - B(-1).
      branches.clear();
      apply_displacement(nu, 0, cutoff, +1.0, branches);
      apply_displacement(nu, -1, cutoff, -1.0, branches);
      for (const Branch& b : branches) {
        add(rotate_config(b.config, -1), gw * b.amp * phase_plus_, j);
      }
    }
  }

  mat_.resize(d, d);
  mat_.setFromTriplets(trips.begin(), trips.end());
  mat_.makeCompressed();
}

void KBlockOperator::apply(const Eigen::VectorXcd& in,
                           Eigen::VectorXcd& out) const {
  if (in.size() != dim()) {
    throw std::invalid_argument("KBlockOperator: vector dimension mismatch");
  }
  out.noalias() = mat_ * in;
}

Eigen::MatrixXcd KBlockOperator::materialize(Index threshold) const {
  if (dim() > threshold) {
    throw std::runtime_error(
        "KBlockOperator: refusing to materialize dimension " +
        std::to_string(dim()) + " above threshold " + std::to_string(threshold));
  }
  return Eigen::MatrixXcd(mat_);
}

KBlockOperator apply_k_block_operator(const ModelParams& params,
                                      Quasimomentum k, Terms terms) {
  return KBlockOperator(build_k_sector_basis(params, k), params, terms);
}

RealSpaceOperator::RealSpaceOperator(const RealSpaceBasis& basis,
                                     const ModelParams& params, Terms terms)
    : basis_(basis), params_(params) {
  params_.validate();
  if (basis_.n_sites != params_.n_sites ||
      basis_.bosons->n_sites() != params_.n_sites ||
      basis_.bosons->cutoff() != params_.boson_cutoff) {
    throw std::invalid_argument(
        "RealSpaceOperator: basis and parameters describe different systems");
  }
  const BosonBasis& bos = *basis_.bosons;
  const int n = params_.n_sites;
  const int cutoff = params_.boson_cutoff;
  const double gw = params_.g * params_.hbar_omega_b;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(basis_.dim()) * 12);
  std::vector<Branch> branches;

  auto add = [&](int site, const BosonConfig& target, double val, Index col) {
    const Index row_cfg = bos.index_of(target);
    if (row_cfg >= 0) {
      trips.emplace_back(static_cast<int>(basis_.index(site, row_cfg)),
                         static_cast<int>(col), val);
    }
  };

  for (Index i = 0; i < basis_.dim(); ++i) {
    const int site = basis_.site_of(i);
    const int fwd = (site + 1) % n;
    const int bwd = (site + n - 1) % n;
    const BosonConfig& nu = bos.config(basis_.config_of(i));

    if (has_term(terms, Terms::kHopping)) {
      add(fwd, nu, -params_.t_e, i);
      add(bwd, nu, -params_.t_e, i);
    }

    if (has_term(terms, Terms::kFreeBoson)) {
      trips.emplace_back(static_cast<int>(i), static_cast<int>(i),
                         params_.hbar_omega_b * nu.total);
    }

    if (has_term(terms, Terms::kBreathing)) {
      // Density at the excitation site couples to B(site-1) - B(site+1).
      branches.clear();
      apply_displacement(nu, bwd, cutoff, +1.0, branches);
      apply_displacement(nu, fwd, cutoff, -1.0, branches);
      for (const Branch& b : branches) add(site, b.config, gw * b.amp, i);
    }

    if (has_term(terms, Terms::kPeierls)) {
      // Hop site -> site+1 dressed by B(site+1) - B(site).
      branches.clear();
      apply_displacement(nu, fwd, cutoff, +1.0, branches);
      apply_displacement(nu, site, cutoff, -1.0, branches);
      for (const Branch& b : branches) add(fwd, b.config, gw * b.amp, i);
      // Hop site -> site-1 dressed by B(site) - B(site-1).
      branches.clear();
      apply_displacement(nu, site, cutoff, +1.0, branches);
      apply_displacement(nu, bwd, cutoff, -1.0, branches);
      for (const Branch& b : branches) add(bwd, b.config, gw * b.amp, i);
    }
  }

  mat_.resize(basis_.dim(), basis_.dim());
  mat_.setFromTriplets(trips.begin(), trips.end());
  mat_.makeCompressed();
}

void RealSpaceOperator::apply(const Eigen::VectorXcd& in,
                              Eigen::VectorXcd& out) const {
  if (in.size() != dim()) {
    throw std::invalid_argument("RealSpaceOperator: vector dimension mismatch");
  }
  out.noalias() = mat_ * in;
}

Eigen::MatrixXd RealSpaceOperator::dense(Index threshold) const {
  if (dim() > threshold) {
    throw std::runtime_error(
        "RealSpaceOperator: refusing to densify dimension " +
        std::to_string(dim()) + " above threshold " + std::to_string(threshold));
  }
  return Eigen::MatrixXd(mat_);
}

RealSpaceOperator build_real_space(const ModelParams& params, Terms terms) {
  return RealSpaceOperator(build_real_space_basis(params), params, terms);
}

Eigen::VectorXcd bare_bloch_vector(const RealSpaceBasis& basis,
                                   Quasimomentum k) {
  if (k.n_sites != basis.n_sites) {
    throw std::invalid_argument("bare_bloch_vector: momentum grid mismatch");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dim());
  const double norm = 1.0 / std::sqrt(static_cast<double>(basis.n_sites));
  for (int site = 0; site < basis.n_sites; ++site) {
    const double phase = -k.value() * site;
    v[basis.index(site, 0)] = norm * Complex(std::cos(phase), std::sin(phase));
  }
  return v;
}

double heb_residual_on_bloch(const ModelParams& params, Quasimomentum k) {
  const RealSpaceBasis basis = build_real_space_basis(params);
  const RealSpaceOperator heb(basis, params, Terms::kCoupling);
  const Eigen::VectorXcd v = bare_bloch_vector(basis, k);
  return heb(v).norm();
}

double heb_residual_on_bare(const ModelParams& params) {
  return heb_residual_on_bloch(params, Quasimomentum::of(0, params.n_sites));
}

}  // namespace wchain
