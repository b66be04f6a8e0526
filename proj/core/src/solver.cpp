#include "wchain/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace wchain {

namespace {

// Deterministic standard-normal start vector.  Box-Muller over raw 53-bit
// uniforms so the stream does not depend on the standard library's
// distribution implementation.
Eigen::VectorXcd seeded_vector(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };
  Eigen::VectorXcd v(dim);
  for (Index i = 0; i < dim; ++i) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = two_pi * uniform();
    v[i] = Complex(r * std::cos(phi), r * std::sin(phi));
  }
  v.normalize();
  return v;
}

EigenResult dense_result(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("dense eigensolver failed to converge");
  }
  EigenResult r;
  r.eigenvalues = es.eigenvalues();
  r.eigenvectors = es.eigenvectors();
  r.residuals.resize(r.eigenvalues.size());
  for (Index i = 0; i < r.eigenvalues.size(); ++i) {
    r.residuals[i] =
        (h * r.eigenvectors.col(i) - r.eigenvalues[i] * r.eigenvectors.col(i))
            .norm();
  }
  r.iterations = 0;
  r.converged = true;
  if (r.eigenvalues.size() > 0) r.ritz_history.push_back(r.eigenvalues[0]);
  return r;
}

Eigen::MatrixXcd materialize_via_apply(const LinearOperator& op) {
  const Index d = op.dim();
  Eigen::MatrixXcd m(d, d);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
  Eigen::VectorXcd col(d);
  for (Index j = 0; j < d; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    m.col(j) = col;
    e[j] = 0.0;
  }
  return m;
}

struct RitzPair {
  double value = 0.0;
  Eigen::VectorXcd vector;
  double residual = 0.0;
};

Eigen::MatrixXd tridiagonal(const std::vector<double>& alpha,
                            const std::vector<double>& beta) {
  const Index m = static_cast<Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) {
      t(i, i + 1) = beta[i];
      t(i + 1, i) = beta[i];
    }
  }
  return t;
}

}  // namespace

EigenResult lanczos_extremal(const LinearOperator& op,
                             const LanczosConfig& cfg) {
  const Index dim = op.dim();
  const int want = cfg.n_eigenpairs;
  if (want < 1) {
    throw std::invalid_argument("lanczos_extremal: n_eigenpairs must be >= 1");
  }
  if (dim < want) {
    throw std::invalid_argument(
        "lanczos_extremal: operator dimension " + std::to_string(dim) +
        " smaller than requested pair count " + std::to_string(want));
  }

  // Tiny problems go straight to the dense path; the Krylov loop below
  // assumes room to breathe.
  if (dim <= std::max<Index>(32, 3 * static_cast<Index>(want))) {
    EigenResult full = dense_result(materialize_via_apply(op));
    EigenResult r;
    r.eigenvalues = full.eigenvalues.head(want);
    r.eigenvectors = full.eigenvectors.leftCols(want);
    r.residuals = full.residuals.head(want);
    r.iterations = 0;
    r.converged = true;
    r.ritz_history = std::move(full.ritz_history);
    return r;
  }

  std::vector<RitzPair> found;     // deflated pairs meeting the contract
  std::vector<RitzPair> fallback;  // best unconverged estimates, last run
  std::vector<double> ritz_history;
  int total_iterations = 0;
  const int max_attempts = 5;

  Eigen::VectorXcd w(dim), hv(dim);

  auto passes = [&cfg](const RitzPair& p) {
    return p.residual <= cfg.tolerance * std::max(1.0, std::abs(p.value));
  };

  for (int attempt = 0;
       attempt < max_attempts && static_cast<int>(found.size()) < want;
       ++attempt) {
    const int room = cfg.max_iterations - total_iterations;
    if (room <= 0) break;
    const Index m_max = std::min<Index>(dim, room);
    const int needed = want - static_cast<int>(found.size());

    Eigen::VectorXcd v = seeded_vector(dim, cfg.seed + 7919ull * attempt);
    for (const RitzPair& p : found) v -= p.vector.dot(v) * p.vector;
    if (v.norm() < 1e-8) continue;
    v.normalize();

    Eigen::MatrixXcd basis(dim, std::min<Index>(m_max, 128));
    basis.col(0) = v;
    std::vector<double> alpha, beta;
    double op_scale = 1.0;

    auto reorthogonalize = [&](Eigen::VectorXcd& x, Index cols) {
      for (int round = 0; round < 2; ++round) {
        x -= basis.leftCols(cols) * (basis.leftCols(cols).adjoint() * x);
        for (const RitzPair& p : found) x -= p.vector.dot(x) * p.vector;
      }
    };

    auto extract = [&](const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>&
                           small,
                       Index count) {
      std::vector<RitzPair> pairs;
      const Index m = small.eigenvalues().size();
      for (Index i = 0; i < std::min(count, m); ++i) {
        RitzPair p;
        p.value = small.eigenvalues()[i];
        p.vector =
            basis.leftCols(m) * small.eigenvectors().col(i).cast<Complex>();
        p.vector.normalize();
        op.apply(p.vector, hv);
        p.residual = (hv - p.value * p.vector).norm();
        pairs.push_back(std::move(p));
      }
      return pairs;
    };

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
    bool small_has_vectors = false;
    bool run_converged = false;
    bool breakdown = false;
    Index j = 0;

    while (true) {
      op.apply(basis.col(j), hv);
      ++total_iterations;
      w = hv;
      if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
      const double a = std::real(basis.col(j).dot(w));
      alpha.push_back(a);
      w -= a * basis.col(j);
      if (cfg.full_reorth) {
        reorthogonalize(w, j + 1);
      } else {
        for (const RitzPair& p : found) w -= p.vector.dot(w) * p.vector;
      }
      const double b = w.norm();
      const Index m = j + 1;
      op_scale = std::max({op_scale, std::abs(a), b});

      // Ritz spectrum of the tridiagonal projection.  Vectors are needed
      // only for the residual estimates; skip some iterations once the
      // subspace is large to keep the small solves cheap.
      const bool at_end =
          (m >= m_max) || (total_iterations >= cfg.max_iterations);
      const bool check = (m >= needed) && (m <= 60 || m % 4 == 0 || at_end ||
                                           b < 1e-13 * op_scale);
      small.compute(tridiagonal(alpha, beta),
                    check ? Eigen::ComputeEigenvectors
                          : Eigen::EigenvaluesOnly);
      small_has_vectors = check;
      ritz_history.push_back(small.eigenvalues()[0]);

      if (check) {
        bool estimates_ok = true;
        for (Index i = 0; i < needed && estimates_ok; ++i) {
          const double theta = small.eigenvalues()[i];
          const double est = b * std::abs(small.eigenvectors()(m - 1, i));
          if (est > cfg.tolerance * std::max(1.0, std::abs(theta))) {
            estimates_ok = false;
          }
        }
        if (estimates_ok) {
          auto pairs = extract(small, needed);
          if (std::all_of(pairs.begin(), pairs.end(), passes)) {
            for (auto& p : pairs) found.push_back(std::move(p));
            run_converged = true;
            break;
          }
        }
      }

      if (b < 1e-13 * op_scale) {
        breakdown = true;
        break;
      }
      if (at_end) break;

      beta.push_back(b);
      w /= b;
      if (m >= basis.cols()) {
        basis.conservativeResize(Eigen::NoChange,
                                 std::min<Index>(m_max, basis.cols() * 2));
      }
      basis.col(m) = w;
      j = m;
    }

    if (run_converged) {
      std::sort(found.begin(), found.end(),
                [](const RitzPair& x, const RitzPair& y) {
                  return x.value < y.value;
                });
      break;
    }

    if (!small_has_vectors) {
      small.compute(tridiagonal(alpha, beta), Eigen::ComputeEigenvectors);
    }
    if (breakdown) {
      // Invariant subspace: its Ritz pairs are eigenpairs; deflate all that
      // meet the contract and search the complement on the next attempt.
      auto pairs = extract(small, static_cast<Index>(alpha.size()));
      for (auto& p : pairs) {
        if (passes(p)) found.push_back(std::move(p));
      }
      std::sort(found.begin(), found.end(),
                [](const RitzPair& x, const RitzPair& y) {
                  return x.value < y.value;
                });
    } else {
      // Iteration budget exhausted: keep the best current estimates so the
      // caller sees values and residuals even on failure.
      fallback = extract(small, needed);
      break;
    }
  }

  EigenResult result;
  std::vector<RitzPair> report;
  for (auto& p : found) report.push_back(std::move(p));
  for (auto& p : fallback) report.push_back(std::move(p));
  std::sort(report.begin(), report.end(),
            [](const RitzPair& x, const RitzPair& y) {
              return x.value < y.value;
            });
  const int have = std::min<int>(want, static_cast<int>(report.size()));
  result.eigenvalues.resize(have);
  result.eigenvectors.resize(dim, have);
  result.residuals.resize(have);
  result.converged = (have == want);
  for (int i = 0; i < have; ++i) {
    result.eigenvalues[i] = report[i].value;
    result.eigenvectors.col(i) = report[i].vector;
    result.residuals[i] = report[i].residual;
    if (!passes(report[i])) result.converged = false;
  }
  result.iterations = total_iterations;
  result.ritz_history = std::move(ritz_history);
  return result;
}

EigenResult dense_ground_state(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("dense_ground_state: matrix must be square");
  }
  return dense_result(h);
}

EigenResult dense_ground_state(const Eigen::MatrixXd& h) {
  return dense_ground_state(Eigen::MatrixXcd(h.cast<Complex>()));
}

}  // namespace wchain
