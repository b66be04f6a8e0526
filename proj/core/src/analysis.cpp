#include "wchain/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wchain/hilbert.hpp"

namespace wchain {

namespace {

// Runs fn(i) for i in [0, count) on up to n_threads workers.  Results are
// written by index, so the outcome does not depend on scheduling.
void parallel_for(int count, int n_threads,
                  const std::function<void(int)>& fn) {
  n_threads = std::max(1, std::min(n_threads, count));
  if (n_threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&, t]() {
      try {
        for (int i = t; i < count; i += n_threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : workers) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SectorResult solve_sector(const ModelParams& params, int k_index,
                          const LanczosConfig& cfg) {
  SectorResult out;
  out.k_index = k_index;
  const Quasimomentum k = Quasimomentum::of(k_index, params.n_sites);
  const KSectorBasis basis = build_k_sector_basis(params, k);
  const KBlockOperator block(basis, params);

  LanczosConfig sector_cfg = cfg;
  sector_cfg.n_eigenpairs = static_cast<int>(
      std::min<Index>(basis.dim(), std::max(2, cfg.n_eigenpairs)));
  // Decorrelate start vectors between sectors while keeping each sector's
  // run reproducible.
  sector_cfg.seed = cfg.seed + static_cast<std::uint64_t>(k_index) * 104729ull;

  const EigenResult eig = lanczos_extremal(block, sector_cfg);
  out.eigenvalues.assign(eig.eigenvalues.data(),
                         eig.eigenvalues.data() + eig.eigenvalues.size());
  out.converged = eig.converged;
  out.iterations = eig.iterations;
  out.max_residual =
      eig.residuals.size() > 0 ? eig.residuals.maxCoeff() : 0.0;
  if (eig.eigenvectors.cols() > 0) {
    out.residue = std::norm(eig.eigenvectors(basis.bare_index(), 0));
  }
  return out;
}

}  // namespace

SpectrumResult sector_scan(const ModelParams& params, const LanczosConfig& cfg,
                           int n_threads) {
  params.validate();
  SpectrumResult result;
  result.params = params;
  result.lambda_eb = effective_lambda(params);
  result.sectors.resize(params.n_sites);

  parallel_for(params.n_sites, n_threads, [&](int k_index) {
    result.sectors[k_index] = solve_sector(params, k_index, cfg);
  });

  result.all_converged = true;
  double e_gs = std::numeric_limits<double>::infinity();
  int k_gs = 0;
  std::vector<double> all;
  for (const SectorResult& s : result.sectors) {
    result.all_converged = result.all_converged && s.converged;
    if (!s.eigenvalues.empty() && s.eigenvalues.front() < e_gs) {
      e_gs = s.eigenvalues.front();
      k_gs = s.k_index;
    }
    all.insert(all.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  }
  std::sort(all.begin(), all.end());
  result.e_gs = e_gs;
  result.k_gs = k_gs;
  result.gap = all.size() > 1 ? all[1] - all[0] : 0.0;
  return result;
}

double w_state_overlap(const Eigen::VectorXcd& state,
                       const KSectorBasis& basis) {
  if (state.size() != basis.dim()) {
    throw std::invalid_argument("w_state_overlap: dimension mismatch");
  }
  if (basis.k.index != 0) return 0.0;
  return std::norm(state[basis.bare_index()]);
}

double w_state_overlap(const Eigen::VectorXcd& state,
                       const RealSpaceBasis& basis) {
  if (state.size() != basis.dim()) {
    throw std::invalid_argument("w_state_overlap: dimension mismatch");
  }
  Complex amp = 0.0;
  for (int n = 0; n < basis.n_sites; ++n) amp += state[basis.index(n, 0)];
  return std::norm(amp) / basis.n_sites;
}

namespace {

// E(K=0) - min_{K != 0} E(K).  Negative while the bare K = 0 state is the
// global ground state.  Momentum blocks at K and N-K are complex conjugates
// of each other, so only half of the ring needs solving here.
double sector_difference(const ModelParams& params, const LanczosConfig& cfg,
                         int n_threads) {
  LanczosConfig one = cfg;
  one.n_eigenpairs = 1;
  const int half = params.n_sites / 2;
  std::vector<double> lowest(half + 1);
  std::vector<char> failed(half + 1, 0);
  parallel_for(half + 1, n_threads, [&](int k_index) {
    SectorResult s = solve_sector(params, k_index, one);
    lowest[k_index] = s.eigenvalues.empty()
                          ? std::numeric_limits<double>::quiet_NaN()
                          : s.eigenvalues.front();
    failed[k_index] = s.converged ? 0 : 1;
  });
  for (int k = 0; k <= half; ++k) {
    if (failed[k] || !std::isfinite(lowest[k])) {
      throw std::runtime_error(
          "find_critical_coupling: sector solve failed at momentum index " +
          std::to_string(k));
    }
  }
  double min_rest = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= half; ++k) min_rest = std::min(min_rest, lowest[k]);
  return lowest[0] - min_rest;
}

}  // namespace

CrossingResult find_critical_coupling(
    const SweepGrid& grid, double refine_tol,
    const std::function<ModelParams(double)>& params_of,
    const LanczosConfig& cfg, int n_threads) {
  if (grid.steps < 2) {
    throw std::invalid_argument("find_critical_coupling: need >= 2 grid steps");
  }
  if (!(refine_tol > 0.0)) {
    throw std::invalid_argument("find_critical_coupling: refine_tol must be > 0");
  }

  CrossingResult out;
  auto evaluate = [&](double control) {
    ++out.evaluations;
    return sector_difference(params_of(control), cfg, n_threads);
  };
  auto control_at = [&](int i) {
    return grid.start +
           (grid.end - grid.start) * static_cast<double>(i) / (grid.steps - 1);
  };

  double lo = control_at(0);
  double f_lo = evaluate(lo);
  const double f_first = f_lo;
  double hi = lo;
  double f_hi = f_lo;
  bool bracketed = false;
  for (int i = 1; i < grid.steps; ++i) {
    hi = control_at(i);
    f_hi = evaluate(hi);
    if ((f_lo <= 0.0) != (f_hi <= 0.0)) {
      bracketed = true;
      break;
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (!bracketed) {
    std::ostringstream msg;
    msg << "find_critical_coupling: no sign change on the grid; "
        << "difference at start " << control_at(0) << " is " << f_first
        << ", at end " << control_at(grid.steps - 1) << " is " << f_hi;
    throw std::runtime_error(msg.str());
  }

  while (std::abs(hi - lo) > refine_tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = evaluate(mid);
    if ((f_lo <= 0.0) == (f_mid <= 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }

  out.control_lo = lo;
  out.control_hi = hi;
  out.control = 0.5 * (lo + hi);
  out.lambda_lo = effective_lambda(params_of(lo));
  out.lambda_hi = effective_lambda(params_of(hi));
  out.lambda_c = effective_lambda(params_of(out.control));
  return out;
}

}  // namespace wchain
