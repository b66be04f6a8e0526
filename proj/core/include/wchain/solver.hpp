#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "wchain/linear_operator.hpp"

namespace wchain {

struct LanczosConfig {
  int n_eigenpairs = 1;
  int max_iterations = 500;
  double tolerance = 1e-10;     ///< residual bound, relative to max(1, |E|)
  bool full_reorth = true;      ///< re-orthogonalize against the whole basis
  std::uint64_t seed = 12345;   ///< start vector seed; results are
                                ///< bit-reproducible for a fixed seed
};

struct EigenResult {
  Eigen::VectorXd eigenvalues;    ///< ascending
  Eigen::MatrixXcd eigenvectors;  ///< columns, unit norm
  Eigen::VectorXd residuals;      ///< ||H v - E v|| per pair
  int iterations = 0;
  bool converged = false;
  /// Lowest Ritz value after each iteration; non-increasing up to roundoff.
  std::vector<double> ritz_history;
};

/// Lowest eigenpairs of a Hermitian operator by the Lanczos recurrence with
/// full reorthogonalization.  The start vector is generated from cfg.seed;
/// if an invariant subspace is exhausted before enough pairs converge
/// (e.g. the start vector had no weight on a needed eigenvector), the run
/// deflates what it found and restarts from a reseeded vector.  Very small
/// operators are solved densely.  Throws std::invalid_argument if the
/// operator dimension is smaller than the requested pair count.
///
/// Multiplicity caveat (standard for single-vector Lanczos): a Krylov space
/// holds one copy of each distinct eigenvalue, so an exactly degenerate
/// level is reported once unless the run exhausts its invariant subspace
/// and restarts.  The model resolves symmetry-forced degeneracies across
/// momentum sectors, never inside one block, so sector scans are
/// unaffected.
EigenResult lanczos_extremal(const LinearOperator& op,
                             const LanczosConfig& cfg);

/// Full spectrum of a materialized Hermitian matrix (oracle path).
EigenResult dense_ground_state(const Eigen::MatrixXcd& h);
EigenResult dense_ground_state(const Eigen::MatrixXd& h);

}  // namespace wchain
