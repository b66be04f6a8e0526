#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wchain/hilbert.hpp"
#include "wchain/linear_operator.hpp"
#include "wchain/model.hpp"

namespace wchain {

/// All protocol energies are angular rates in rad/ns (hbar = 1), times in
/// ns; EnergyUnit::kRadNs model parameters plug in directly.

enum class DriveShape {
  kCosine,     ///< lab-frame drive 2 beta_p cos(omega_d t)
  kRwaStatic,  ///< rotating-frame static coupling beta_p
};

struct DriveParams {
  Quasimomentum q_d;        ///< drive momentum (matrix-element selector)
  double beta_p = 0.0;      ///< coupling amplitude, rad/ns
  double omega_d = 0.0;     ///< drive frequency, rad/ns
  DriveShape shape = DriveShape::kCosine;
};

/// Hilbert space truncated to the zero- and one-excitation sectors, both
/// carrying the full boson basis.  Indices [0, D_b) are the excitation
/// vacuum with boson config c; D_b + n*D_b + c is the excitation on site n.
/// The model Hamiltonian is block diagonal here (free bosons over the
/// vacuum, the full lattice Hamiltonian over one excitation); the
/// transverse drive is the only block-off-diagonal piece.
class TwoSectorSpace {
 public:
  TwoSectorSpace(const ModelParams& params,
                 Index max_configs = kDefaultMaxBosonConfigs);

  const ModelParams& params() const { return params_; }
  Index dim() const;
  Index boson_dim() const { return bosons_->size(); }
  Index vacuum_index() const { return 0; }
  Index excited_index(int site, Index config) const;

  Eigen::VectorXcd vacuum_state() const;
  /// Bare Bloch target |W(q_d)> x |0 bosons>.
  Eigen::VectorXcd target_state(Quasimomentum q_d) const;

  const Eigen::SparseMatrix<double>& model_hamiltonian() const {
    return h_model_;
  }
  /// Dimensionless drive structure: sum_n (e^{-i q_d n} |n,c><vac,c| + h.c.)
  /// / sqrt(N) at fixed boson config c.
  Eigen::SparseMatrix<Complex> drive_structure(Quasimomentum q_d) const;

 private:
  ModelParams params_;
  std::shared_ptr<const BosonBasis> bosons_;
  Eigen::SparseMatrix<double> h_model_;
};

struct EvolutionResult {
  std::vector<double> t_ns;
  std::vector<double> fidelity;           ///< |<target|psi>|^2
  std::vector<double> vacuum_population;  ///< zero-excitation sector weight
  std::vector<double> norm_error;         ///< | ||psi|| - 1 |
  double tau_first_max_ns = 0.0;          ///< first fidelity maximum
  double max_fidelity = 0.0;
  double norm_drift_max = 0.0;
  Eigen::VectorXcd final_state;           ///< state at the last grid time
};

/// Overlap selector <W(k)|drive(q_d)|vacuum> / (hbar beta): the normalized
/// Bloch sum (1/N) sum_n e^{i(k - q_d) n}, i.e. a Kronecker delta on the
/// momentum grid.  Throws if the two momenta live on different grids.
Complex drive_matrix_element(Quasimomentum q_d, Quasimomentum k);

/// Time to the first fidelity maximum of the resonant two-level problem,
/// pi*hbar/(2 beta_p), in ns.
double prep_time_ns(double beta_p_radns);

/// Propagates an initial state under model + drive for t_max_ns in fixed
/// steps of dt_ns, recording fidelity against the q_d target, vacuum
/// population and norm error at every step.  Time stepping is a 4th-order
/// commutator-free Magnus scheme whose sub-steps are Krylov-space matrix
/// exponentials of Hermitian combinations, so the propagation is unitary to
/// solver tolerance (norm drift well under 1e-9).  For kRwaStatic the
/// rotating-frame Hamiltonian is time independent and every step is a
/// single exponential.
///
/// Preconditions enforced: |initial| normalized to 1e-10; dt small enough
/// that dt * max(omega_d, spectral half range of H) < 0.1.
EvolutionResult evolve(const TwoSectorSpace& space,
                       const Eigen::VectorXcd& initial,
                       const DriveParams& drive, double t_max_ns,
                       double dt_ns);

/// Fidelity sample at an exact grid time; throws if t_ns is not on the
/// sample grid (within 1e-9 ns).
double fidelity_at_time(const EvolutionResult& result, double t_ns);

}  // namespace wchain
