#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wchain/hilbert.hpp"

namespace wchain {

/// Minimal matrix-free Hermitian operator interface used by the iterative
/// solver and the propagator.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Index dim() const = 0;
  virtual void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const = 0;

  Eigen::VectorXcd operator()(const Eigen::VectorXcd& in) const {
    Eigen::VectorXcd out(dim());
    apply(in, out);
    return out;
  }
};

/// Dense matrix wrapped as a LinearOperator (test and oracle plumbing).
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXcd m) : m_(std::move(m)) {}
  Index dim() const override { return m_.rows(); }
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const override {
    out.noalias() = m_ * in;
  }
  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  Eigen::MatrixXcd m_;
};

/// Sparse complex matrix wrapped as a LinearOperator.
class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(Eigen::SparseMatrix<Complex> m) : m_(std::move(m)) {}
  Index dim() const override { return m_.rows(); }
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const override {
    out.noalias() = m_ * in;
  }
  const Eigen::SparseMatrix<Complex>& matrix() const { return m_; }

 private:
  Eigen::SparseMatrix<Complex> m_;
};

}  // namespace wchain
