#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dalab {

/// Raised when a caller breaks an operation's precondition (shape, range,
/// distribution). Distinct from I/O failures so the CLI can map it to exit 2.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using ColVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Tensor2D = Matrix<double>;
using Vector = ColVector<double>;

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

/// Dense product with a fixed summation order: every output element is
/// accumulated left to right over the inner index, starting from +0.0.
/// Results are bit-stable across runs and independent of matrix size.
template <typename Scalar>
Matrix<Scalar> matmul(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + ")");
  Matrix<Scalar> out = Matrix<Scalar>::Zero(a.rows(), b.cols());
  const Eigen::Index n = b.cols();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Scalar* o = out.row(i).data();
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const Scalar aik = a(i, k);
      const Scalar* brow = b.row(k).data();
      for (Eigen::Index j = 0; j < n; ++j) o[j] += aik * brow[j];
    }
  }
  return out;
}

/// Row vector times matrix (x·W) with the same summation order as matmul.
template <typename Scalar>
ColVector<Scalar> vecmat(const ColVector<Scalar>& x, const Matrix<Scalar>& w) {
  require(x.size() == w.rows(), "vecmat: dimension mismatch");
  ColVector<Scalar> out = ColVector<Scalar>::Zero(w.cols());
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    const Scalar xk = x(k);
    for (Eigen::Index j = 0; j < w.cols(); ++j) out(j) += xk * w(k, j);
  }
  return out;
}

/// Matrix times column vector (W·x), fixed left-to-right order per row.
template <typename Scalar>
ColVector<Scalar> matvec(const Matrix<Scalar>& w, const ColVector<Scalar>& x) {
  require(x.size() == w.cols(), "matvec: dimension mismatch");
  ColVector<Scalar> out(w.rows());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    Scalar acc = Scalar(0);
    for (Eigen::Index k = 0; k < w.cols(); ++k) acc += w(i, k) * x(k);
    out(i) = acc;
  }
  return out;
}

template <std::floating_point Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <std::floating_point Scalar>
Scalar swish1(Scalar x) {
  return x * sigmoid(x);
}

/// d/dx of x·sigmoid(x).
template <std::floating_point Scalar>
Scalar swish1_grad(Scalar x) {
  const Scalar s = sigmoid(x);
  return s * (Scalar(1) + x * (Scalar(1) - s));
}

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseMax(typename Derived::Scalar(0));
}

template <typename Derived>
auto swish1(const Eigen::MatrixBase<Derived>& v) {
  return v.unaryExpr([](typename Derived::Scalar x) { return swish1(x); });
}

/// swish1(x·gate) ⊙ (x·up).
Vector swiglu(const Vector& x, const Tensor2D& gate, const Tensor2D& up);

/// Max-subtracted softmax.
Vector softmax(const Vector& v);

/// log(Σ exp(v)), max-subtracted.
double log_sum_exp(const Vector& v);

/// −⟨y, log softmax(logits)⟩. y must be a probability vector (tolerance 1e-9).
double cross_entropy(const Vector& logits, const Vector& y);

void require_distribution(const Vector& y, double tol, const std::string& who);

/// Central differences (f(x+h·eᵢ) − f(x−h·eᵢ)) / 2h.
template <typename F>
Vector finite_diff_grad(F&& f, const Vector& x, double h) {
  require(h > 0.0, "finite_diff_grad: step must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    probe(i) = xi + h;
    const double up = f(probe);
    probe(i) = xi - h;
    const double down = f(probe);
    probe(i) = xi;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace dalab
