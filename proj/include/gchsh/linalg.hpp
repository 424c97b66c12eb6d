#pragma once

// Dense complex linear algebra for qubit (2x2) and two-qubit (4x4) operators.

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <string_view>

#include "gchsh/common.hpp"

namespace gchsh::linalg {

using Complex = std::complex<double>;

template <std::size_t N>
class Matrix {
  static_assert(N == 2 || N == 4, "only qubit and two-qubit operators are supported");

 public:
  static constexpr std::size_t kDim = N;

  Matrix() { m_.fill(Complex{}); }

  static Matrix identity() {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i) r(i, i) = 1.0;
    return r;
  }

  /// Row-major entries.
  static Matrix from_rows(const std::array<Complex, N * N>& entries) {
    Matrix r;
    r.m_ = entries;
    return r;
  }

  Complex& operator()(std::size_t r, std::size_t c) { return m_[r * N + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return m_[r * N + c]; }

  Matrix adjoint() const {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
  }

  Complex trace() const {
    Complex t{};
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  /// Largest elementwise modulus.
  double max_abs() const {
    double r = 0.0;
    for (const auto& z : m_) r = std::max(r, std::abs(z));
    return r;
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) m_[i] += o.m_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) m_[i] -= o.m_[i];
    return *this;
  }
  Matrix& operator*=(Complex s) {
    for (auto& z : m_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  const std::array<Complex, N * N>& entries() const { return m_; }

 private:
  std::array<Complex, N * N> m_;
};

using Mat2 = Matrix<2>;
using Mat4 = Matrix<4>;

template <std::size_t N>
using Vector = std::array<Complex, N>;

template <std::size_t N>
Vector<N> operator*(const Matrix<N>& m, const Vector<N>& v) {
  Vector<N> r{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r[i] += m(i, j) * v[j];
  return r;
}

template <std::size_t N>
Complex inner(const Vector<N>& u, const Vector<N>& v) {
  Complex r{};
  for (std::size_t i = 0; i < N; ++i) r += std::conj(u[i]) * v[i];
  return r;
}

/// |u><v|
template <std::size_t N>
Matrix<N> outer(const Vector<N>& u, const Vector<N>& v) {
  Matrix<N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r(i, j) = u[i] * std::conj(v[j]);
  return r;
}

/// Real part of <v|M|v>.
template <std::size_t N>
double expectation(const Matrix<N>& m, const Vector<N>& v) {
  return std::real(inner(v, m * v));
}

/// Re tr(A B) without forming the product.
template <std::size_t N>
double trace_product(const Matrix<N>& a, const Matrix<N>& b) {
  Complex t{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) t += a(i, k) * b(k, i);
  return std::real(t);
}

template <std::size_t N>
bool is_hermitian(const Matrix<N>& m, double tol = kTol.hermitian) {
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

/// Self-adjoint operator; the invariant is checked on construction.
template <std::size_t N>
class HermitianOperator {
 public:
  HermitianOperator() = default;

  /// Throws InputError unless `m` equals its adjoint within the hermitian tolerance.
  explicit HermitianOperator(const Matrix<N>& m);

  /// Projects onto the Hermitian part, (m + m^dagger) / 2. For results of
  /// computations that are Hermitian up to rounding.
  static HermitianOperator hermitian_part(const Matrix<N>& m) {
    HermitianOperator h;
    h.m_ = (m + m.adjoint()) * Complex{0.5};
    return h;
  }

  const Matrix<N>& matrix() const { return m_; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    HermitianOperator r;
    r.m_ = a.m_ + b.m_;
    return r;
  }
  friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    HermitianOperator r;
    r.m_ = a.m_ - b.m_;
    return r;
  }
  friend HermitianOperator operator*(double s, const HermitianOperator& a) {
    HermitianOperator r;
    r.m_ = a.m_ * Complex{s};
    return r;
  }
  friend HermitianOperator operator*(const HermitianOperator& a, double s) { return s * a; }

 private:
  Matrix<N> m_;
};

using Herm2 = HermitianOperator<2>;
using Herm4 = HermitianOperator<4>;

template <std::size_t N>
HermitianOperator<N>::HermitianOperator(const Matrix<N>& m) : m_(m) {
  if (!is_hermitian(m)) throw InputError("matrix is not Hermitian");
}

enum class PauliName { identity, x, y, z, h, m };

/// Qubit observable by name; sigma_h = (sigma_z + sigma_x)/sqrt2, sigma_m = (sigma_z - sigma_x)/sqrt2.
Herm2 pauli(PauliName name);
/// Accepts "x", "y", "z", "h", "m", "identity" (or "i"); throws InputError otherwise.
Herm2 pauli(std::string_view name);

/// Kronecker product of two qubit operators.
Mat4 tensor(const Mat2& a, const Mat2& b);
Herm4 tensor(const Herm2& a, const Herm2& b);
Vector<4> tensor(const Vector<2>& a, const Vector<2>& b);

/// Eigenvalues in descending order; column k of `vectors` belongs to values[k].
template <std::size_t N>
struct EigenSystem {
  std::array<double, N> values{};
  Matrix<N> vectors;

  Vector<N> vector(std::size_t k) const {
    Vector<N> v;
    for (std::size_t i = 0; i < N; ++i) v[i] = vectors(i, k);
    return v;
  }
};

/// Cyclic Jacobi diagonalization. Vectors within a degenerate cluster form
/// an arbitrary orthonormal basis of the cluster.
EigenSystem<2> eig_hermitian(const Herm2& m);
EigenSystem<4> eig_hermitian(const Herm4& m);

/// Jacobi diagonalization of the leading n x n block of `a` (n <= 4), in place.
/// On return the diagonal holds the eigenvalues (unsorted) and the leading
/// n columns of `v` the eigenvectors. Exposed for compressed operators.
void jacobi_in_place(std::array<Complex, 16>& a, std::array<Complex, 16>& v, std::size_t n);

/// Normalized two-qubit pure state.
class PureState {
 public:
  /// Throws InputError unless the squared norm is 1 within the unit_norm tolerance.
  explicit PureState(const Vector<4>& amplitudes);
  /// Rescales to unit norm; throws InputError on the zero vector.
  static PureState normalized(const Vector<4>& amplitudes);

  const Vector<4>& amplitudes() const { return psi_; }
  Mat4 projector() const { return outer(psi_, psi_); }

 private:
  struct Trusted {};
  PureState(const Vector<4>& a, Trusted) : psi_(a) {}
  Vector<4> psi_;
};

/// (|00> + |11>)/sqrt2
const PureState& phi_plus();

/// Unit-trace positive semidefinite two-qubit operator.
class DensityMatrix {
 public:
  /// Throws InputError when hermiticity, trace or positivity fails its tolerance.
  explicit DensityMatrix(const Mat4& m);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed();

  const Mat4& matrix() const { return m_; }
  Herm4 as_operator() const { return Herm4::hermitian_part(m_); }

 private:
  Mat4 m_;
};

/// <psi|rho|psi>, clamped to [0,1].
double fidelity_with_pure(const DensityMatrix& rho, const PureState& psi);

}  // namespace gchsh::linalg
