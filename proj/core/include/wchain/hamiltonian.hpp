#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wchain/hilbert.hpp"
#include "wchain/linear_operator.hpp"
#include "wchain/model.hpp"

namespace wchain {

/// Selectable groups of Hamiltonian terms.  The coupling part (breathing +
/// Peierls) is what vanishes identically on the k = 0 Bloch state.
enum class Terms : unsigned {
  kHopping = 1u,
  kFreeBoson = 2u,
  kBreathing = 4u,
  kPeierls = 8u,
  kCoupling = kBreathing | kPeierls,
  kAll = kHopping | kFreeBoson | kCoupling,
};

constexpr Terms operator|(Terms a, Terms b) {
  return static_cast<Terms>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has_term(Terms set, Terms t) {
  return (static_cast<unsigned>(set) & static_cast<unsigned>(t)) != 0;
}

inline constexpr Index kDefaultMaterializeThreshold = 2000;

/// Hamiltonian block of one quasimomentum sector over the relative-frame
/// boson basis.  Boson totals above the cutoff are projected out, which
/// keeps the block Hermitian.
///
/// Matrix elements, with R the cyclic frame relabeling from moving the
/// excitation one site forward (rotate_config shift +1), L = R^{-1}, and
/// B(r) = b_r^dag + b_r at relative site r:
///   hopping    -t_e [ e^{-iK} R + e^{+iK} L ]
///   bosons     hbar_omega_b * (total boson number), diagonal
///   breathing  g hbar_omega_b [ B(-1) - B(+1) ] acting in the fixed frame
///   hop+shift  g hbar_omega_b [ e^{-iK} R (B(+1) - B(0))
///                             + e^{+iK} L (B(0) - B(-1)) ]
/// The sparse application structure is assembled once at construction; no
/// dense matrix is formed unless materialize() is called.
class KBlockOperator final : public LinearOperator {
 public:
  KBlockOperator(const KSectorBasis& basis, const ModelParams& params,
                 Terms terms = Terms::kAll);

  Index dim() const override { return basis_.dim(); }
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const override;

  /// Dense copy of the block; refuses dimensions above the threshold.
  Eigen::MatrixXcd materialize(
      Index threshold = kDefaultMaterializeThreshold) const;

  const KSectorBasis& basis() const { return basis_; }
  const ModelParams& params() const { return params_; }
  Complex phase_plus() const { return phase_plus_; }    ///< e^{+iK}
  Complex phase_minus() const { return phase_minus_; }  ///< e^{-iK}

 private:
  KSectorBasis basis_;
  ModelParams params_;
  Complex phase_plus_;
  Complex phase_minus_;
  Eigen::SparseMatrix<Complex> mat_;
};

KBlockOperator apply_k_block_operator(const ModelParams& params,
                                      Quasimomentum k,
                                      Terms terms = Terms::kAll);

/// Full Hamiltonian over the real-space product basis; every element is
/// real.  Oracle counterpart of the momentum blocks.
class RealSpaceOperator final : public LinearOperator {
 public:
  RealSpaceOperator(const RealSpaceBasis& basis, const ModelParams& params,
                    Terms terms = Terms::kAll);

  Index dim() const override { return basis_.dim(); }
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const override;

  const Eigen::SparseMatrix<double>& matrix() const { return mat_; }
  Eigen::MatrixXd dense(Index threshold = 4096) const;
  const RealSpaceBasis& basis() const { return basis_; }

 private:
  RealSpaceBasis basis_;
  ModelParams params_;
  Eigen::SparseMatrix<double> mat_;
};

RealSpaceOperator build_real_space(const ModelParams& params,
                                   Terms terms = Terms::kAll);

/// Normalized Bloch state of momentum k with zero bosons in the real-space
/// basis: amplitude e^{-ikn}/sqrt(N) on (site n, boson vacuum).
Eigen::VectorXcd bare_bloch_vector(const RealSpaceBasis& basis,
                                   Quasimomentum k);

/// || H_coupling |bloch(k)> ||, evaluated with the real-space operator.
double heb_residual_on_bloch(const ModelParams& params, Quasimomentum k);

/// Residual of the coupling Hamiltonian on the k = 0 Bloch state; exactly
/// zero in exact arithmetic at every coupling strength and cutoff.
double heb_residual_on_bare(const ModelParams& params);

}  // namespace wchain
