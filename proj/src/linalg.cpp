#include "gchsh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gchsh::linalg {

namespace {

constexpr std::size_t kStride = 4;
constexpr int kMaxSweeps = 60;

Complex& at(std::array<Complex, 16>& a, std::size_t r, std::size_t c) { return a[r * kStride + c]; }

template <std::size_t N>
EigenSystem<N> eig_impl(const Matrix<N>& m) {
  std::array<Complex, 16> a{};
  std::array<Complex, 16> v{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) at(a, i, j) = m(i, j);
  jacobi_in_place(a, v, N);

  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::real(at(a, x, x)) > std::real(at(a, y, y));
  });

  EigenSystem<N> es;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t src = order[k];
    es.values[k] = std::real(at(a, src, src));
    for (std::size_t i = 0; i < N; ++i) es.vectors(i, k) = at(v, i, src);
  }
  return es;
}

}  // namespace

void jacobi_in_place(std::array<Complex, 16>& a, std::array<Complex, 16>& v, std::size_t n) {
  for (std::size_t i = 0; i < 16; ++i) v[i] = Complex{};
  for (std::size_t i = 0; i < n; ++i) at(v, i, i) = 1.0;
  for (std::size_t i = 0; i < n; ++i) at(a, i, i) = std::real(at(a, i, i));

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(at(a, i, j)));
  if (scale == 0.0) return;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(at(a, p, q)));
    if (off <= 1e-17 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = at(a, p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300 || mag <= 1e-19 * scale) {
          at(a, p, q) = at(a, q, p) = Complex{};
          continue;
        }
        // Phase D = diag(1, e^{-i phi}) makes the pair block real, then a real rotation.
        const Complex phase = std::conj(apq) / mag;  // e^{-i phi}
        const double app = std::real(at(a, p, p));
        const double aqq = std::real(at(a, q, q));
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // a <- a G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = at(a, k, p);
          const Complex akq = at(a, k, q) * phase;
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
          const Complex vkp = at(v, k, p);
          const Complex vkq = at(v, k, q) * phase;
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
        // a <- G^dagger a
        const Complex cphase = std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = at(a, p, k);
          const Complex aqk = at(a, q, k) * cphase;
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        at(a, p, q) = at(a, q, p) = Complex{};
        at(a, p, p) = app - t * mag;
        at(a, q, q) = aqq + t * mag;
      }
    }
  }
}

Herm2 pauli(PauliName name) {
  const double r = 1.0 / kSqrt2;
  const Complex i{0.0, 1.0};
  switch (name) {
    case PauliName::identity:
      return Herm2(Mat2::identity());
    case PauliName::x:
      return Herm2(Mat2::from_rows({0.0, 1.0, 1.0, 0.0}));
    case PauliName::y:
      return Herm2(Mat2::from_rows({0.0, -i, i, 0.0}));
    case PauliName::z:
      return Herm2(Mat2::from_rows({1.0, 0.0, 0.0, -1.0}));
    case PauliName::h:
      return Herm2(Mat2::from_rows({r, r, r, -r}));
    case PauliName::m:
      return Herm2(Mat2::from_rows({r, -r, -r, -r}));
  }
  throw InputError("unknown Pauli name");
}

Herm2 pauli(std::string_view name) {
  if (name == "x") return pauli(PauliName::x);
  if (name == "y") return pauli(PauliName::y);
  if (name == "z") return pauli(PauliName::z);
  if (name == "h") return pauli(PauliName::h);
  if (name == "m") return pauli(PauliName::m);
  if (name == "identity" || name == "i") return pauli(PauliName::identity);
  throw InputError("unknown Pauli name '" + std::string(name) + "'");
}

Mat4 tensor(const Mat2& a, const Mat2& b) {
  Mat4 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return r;
}

Herm4 tensor(const Herm2& a, const Herm2& b) {
  return Herm4::hermitian_part(tensor(a.matrix(), b.matrix()));
}

Vector<4> tensor(const Vector<2>& a, const Vector<2>& b) {
  return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

EigenSystem<2> eig_hermitian(const Herm2& m) { return eig_impl(m.matrix()); }
EigenSystem<4> eig_hermitian(const Herm4& m) { return eig_impl(m.matrix()); }

PureState::PureState(const Vector<4>& amplitudes) : psi_(amplitudes) {
  const double norm2 = std::real(inner(psi_, psi_));
  if (std::abs(norm2 - 1.0) > kTol.unit_norm) throw InputError("pure state is not normalized");
}

PureState PureState::normalized(const Vector<4>& amplitudes) {
  const double norm = std::sqrt(std::real(inner(amplitudes, amplitudes)));
  if (norm == 0.0) throw InputError("cannot normalize the zero vector");
  Vector<4> v = amplitudes;
  for (auto& z : v) z /= norm;
  return PureState(v, Trusted{});
}

const PureState& phi_plus() {
  static const PureState state = PureState::normalized({1.0, 0.0, 0.0, 1.0});
  return state;
}

DensityMatrix::DensityMatrix(const Mat4& m) : m_(m) {
  if (!is_hermitian(m)) throw InputError("density matrix is not Hermitian");
  if (std::abs(m.trace() - 1.0) > kTol.trace) throw InputError("density matrix trace differs from 1");
  const auto es = eig_hermitian(Herm4::hermitian_part(m));
  if (es.values[3] < -kTol.psd) throw InputError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(Mat4::identity() * Complex{0.25}); }

double fidelity_with_pure(const DensityMatrix& rho, const PureState& psi) {
  const double f = expectation(rho.matrix(), psi.amplitudes());
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace gchsh::linalg
