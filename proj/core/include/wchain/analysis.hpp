#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "wchain/hamiltonian.hpp"
#include "wchain/model.hpp"
#include "wchain/solver.hpp"

namespace wchain {

/// Lowest part of one momentum block's spectrum.
struct SectorResult {
  int k_index = 0;
  std::vector<double> eigenvalues;  ///< ascending, at least two when dim > 1
  double residue = 0.0;             ///< |<bare(K)|gs(K)>|^2
  double max_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SpectrumResult {
  ModelParams params;
  std::vector<SectorResult> sectors;  ///< by momentum index 0..N-1
  int k_gs = 0;
  double e_gs = 0.0;
  double gap = 0.0;        ///< global first excitation energy
  double lambda_eb = 0.0;
  bool all_converged = false;
};

/// Diagonalizes every momentum block for its lowest eigenvalues (at least
/// two per block where the dimension allows) and assembles ground-sector
/// index, ground energy, residue per sector and the global gap.  Solver
/// failures are recorded per sector, not thrown.  Blocks are independent;
/// n_threads > 1 distributes them without changing any result.
SpectrumResult sector_scan(const ModelParams& params, const LanczosConfig& cfg,
                           int n_threads = 1);

/// Squared overlap of a momentum-block eigenvector with the zero-boson
/// (bare Bloch / W-like) entry of its sector.
double w_state_overlap(const Eigen::VectorXcd& state,
                       const KSectorBasis& basis);

/// Same overlap evaluated for a real-space vector: the projection onto the
/// equal-amplitude zero-boson Bloch state of momentum 0.
double w_state_overlap(const Eigen::VectorXcd& state,
                       const RealSpaceBasis& basis);

struct SweepGrid {
  double start = 0.0;
  double end = 1.0;
  int steps = 11;
};

struct CrossingResult {
  double lambda_c = 0.0;          ///< effective coupling at the crossing
  double control = 0.0;           ///< control value at the crossing midpoint
  double control_lo = 0.0;        ///< bisection bracket on the control
  double control_hi = 0.0;
  double lambda_lo = 0.0;         ///< lambda at the bracket edges
  double lambda_hi = 0.0;
  int evaluations = 0;
};

/// Locates the level crossing where the K = 0 sector stops being the ground
/// sector.  The control parameter is mapped to model parameters by
/// params_of; the sign-change of E(K=0) - min_{K != 0} E(K) is bracketed on
/// the grid and then bisected until the control bracket is narrower than
/// refine_tol.  Throws std::runtime_error, reporting the end-point sector
/// differences, when the grid contains no sign change.
CrossingResult find_critical_coupling(
    const SweepGrid& grid, double refine_tol,
    const std::function<ModelParams(double)>& params_of,
    const LanczosConfig& cfg, int n_threads = 1);

}  // namespace wchain
