#pragma once

// Covariance-matrix algebra for zero-mean one- and two-mode Gaussian states.
//
// Units: quadratures q = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), so the
// vacuum covariance matrix is I/2 and a thermal mode with mean photon number n
// has symplectic eigenvalue n + 1/2. Every formula in this library uses that
// convention. Quadrature ordering is (q1, p1, q2, p2).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "errors.hpp"

namespace lossprobe {

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPhysicalTol = 1e-10;

template <int Modes>
concept SupportedModeCount = (Modes == 1 || Modes == 2);

template <int Modes>
  requires SupportedModeCount<Modes>
using PhaseSpaceMatrix = Eigen::Matrix<double, 2 * Modes, 2 * Modes>;

/// Block-diagonal symplectic form, one [[0, 1], [-1, 0]] block per mode.
template <int Modes>
  requires SupportedModeCount<Modes>
PhaseSpaceMatrix<Modes> symplectic_form() {
  PhaseSpaceMatrix<Modes> omega = PhaseSpaceMatrix<Modes>::Zero();
  for (int k = 0; k < Modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

/// Real symmetric 2n x 2n second-moment matrix of a zero-mean Gaussian state.
///
/// Construction enforces shape, finiteness and symmetry (to 1e-12, after which
/// the matrix is symmetrized exactly). Physicality, i.e. sigma + (i/2) Omega >= 0,
/// is a property queried with is_physical(); operations that need it check it.
template <int Modes>
  requires SupportedModeCount<Modes>
class CovarianceMatrix {
public:
  using Matrix = PhaseSpaceMatrix<Modes>;
  static constexpr int modes = Modes;
  static constexpr int dimension = 2 * Modes;

  explicit CovarianceMatrix(const Matrix& m) : m_(m) {
    if (!m.allFinite()) throw DomainError("covariance matrix has non-finite entries");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
      throw DomainError("covariance matrix is not symmetric (max |s_ij - s_ji| = " +
                        std::to_string(asym) + ")");
    }
    m_ = 0.5 * (m + m.transpose());
  }

  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Smallest eigenvalue of the Hermitian matrix sigma + (i/2) Omega.
  double uncertainty_margin() const {
    using Complex = Eigen::Matrix<std::complex<double>, dimension, dimension>;
    const Complex h = m_.template cast<std::complex<double>>() +
                      std::complex<double>(0.0, 0.5) *
                          symplectic_form<Modes>().template cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Complex> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  bool is_physical(double tol = kPhysicalTol) const { return uncertainty_margin() >= -tol; }

  void require_physical(const char* where) const {
    const double margin = uncertainty_margin();
    if (margin < -kPhysicalTol) {
      throw UnphysicalStateError(std::string(where) +
                                 ": covariance matrix violates the uncertainty principle "
                                 "(min eig of sigma + i Omega/2 = " +
                                 std::to_string(margin) + ")");
    }
  }

  friend bool operator==(const CovarianceMatrix&, const CovarianceMatrix&) = default;

private:
  Matrix m_;
};

using SingleModeCM = CovarianceMatrix<1>;
using TwoModeCM = CovarianceMatrix<2>;

/// Single-mode squeezed thermal state rho(r, n_T) = S(r) nu(n_T) S(r)^dag.
struct SingleModeParams {
  double r = 0.0;
  double n_thermal = 0.0;
};

/// Two-mode squeezed thermal state S2(r) (nu(n_T1) x nu(n_T2)) S2(r)^dag.
/// Mode 1 is the probing mode, mode 2 the reference.
struct TwoModeParams {
  double r = 0.0;
  double n_thermal1 = 0.0;
  double n_thermal2 = 0.0;
};

inline void validate(const SingleModeParams& p) {
  if (!std::isfinite(p.r) || !std::isfinite(p.n_thermal))
    throw DomainError("squeezed thermal parameters must be finite");
  if (p.r < 0.0) throw DomainError("squeezing parameter r must be >= 0");
  if (p.n_thermal < 0.0) throw DomainError("thermal photon number must be >= 0");
}

inline void validate(const TwoModeParams& p) {
  if (!std::isfinite(p.r) || !std::isfinite(p.n_thermal1) || !std::isfinite(p.n_thermal2))
    throw DomainError("squeezed thermal parameters must be finite");
  if (p.r < 0.0) throw DomainError("squeezing parameter r must be >= 0");
  if (p.n_thermal1 < 0.0 || p.n_thermal2 < 0.0)
    throw DomainError("thermal photon numbers must be >= 0");
}

/// Thermal numbers of a squeezed thermal parametrization (= d_k - 1/2).
inline std::array<double, 1> thermal_numbers(const SingleModeParams& p) { return {p.n_thermal}; }
inline std::array<double, 2> thermal_numbers(const TwoModeParams& p) {
  return {p.n_thermal1, p.n_thermal2};
}

/// Single-mode squeezing matrix diag(e^r, e^-r); the q quadrature is anti-squeezed.
inline PhaseSpaceMatrix<1> squeezing_matrix(double r) {
  PhaseSpaceMatrix<1> s = PhaseSpaceMatrix<1>::Zero();
  s(0, 0) = std::exp(r);
  s(1, 1) = std::exp(-r);
  return s;
}

/// Two-mode squeezing matrix [[cosh r I, sinh r Z], [sinh r Z, cosh r I]], Z = diag(1, -1).
inline PhaseSpaceMatrix<2> two_mode_squeezing_matrix(double r) {
  const double c = std::cosh(r);
  const double s = std::sinh(r);
  PhaseSpaceMatrix<2> m = PhaseSpaceMatrix<2>::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = c;
  m(0, 2) = m(2, 0) = s;
  m(1, 3) = m(3, 1) = -s;
  return m;
}

inline SingleModeCM make_single_mode_st(const SingleModeParams& p) {
  validate(p);
  const double scale = 0.5 * (1.0 + 2.0 * p.n_thermal);
  PhaseSpaceMatrix<1> m = PhaseSpaceMatrix<1>::Zero();
  m(0, 0) = scale * std::exp(2.0 * p.r);
  m(1, 1) = scale * std::exp(-2.0 * p.r);
  return SingleModeCM(m);
}

/// General squeezing phase zeta = r e^{i phi}. phi = pi reproduces make_single_mode_st.
inline SingleModeCM make_single_mode_st_phased(const SingleModeParams& p, double phi) {
  validate(p);
  const double scale = p.n_thermal + 0.5;
  const double ch = std::cosh(2.0 * p.r);
  const double sh = std::sinh(2.0 * p.r);
  PhaseSpaceMatrix<1> m;
  m(0, 0) = scale * (ch - sh * std::cos(phi));
  m(1, 1) = scale * (ch + sh * std::cos(phi));
  m(0, 1) = m(1, 0) = scale * sh * std::sin(phi);
  return SingleModeCM(m);
}

/// Normal-form coefficients (A, B, C) of a two-mode squeezed thermal state;
/// the covariance matrix is (1/2)[[A I, C Z], [C Z, B I]].
struct NormalFormCoefficients {
  double a;
  double b;
  double c;
};

inline NormalFormCoefficients normal_form_coefficients(const TwoModeParams& p) {
  const double ch2 = std::cosh(2.0 * p.r);
  const double cosh_sq = std::cosh(p.r) * std::cosh(p.r);
  const double sinh_sq = std::sinh(p.r) * std::sinh(p.r);
  return {ch2 + 2.0 * p.n_thermal1 * cosh_sq + 2.0 * p.n_thermal2 * sinh_sq,
          ch2 + 2.0 * p.n_thermal1 * sinh_sq + 2.0 * p.n_thermal2 * cosh_sq,
          (1.0 + p.n_thermal1 + p.n_thermal2) * std::sinh(2.0 * p.r)};
}

inline TwoModeCM cm_from_normal_form(const NormalFormCoefficients& f) {
  PhaseSpaceMatrix<2> m = PhaseSpaceMatrix<2>::Zero();
  m(0, 0) = m(1, 1) = 0.5 * f.a;
  m(2, 2) = m(3, 3) = 0.5 * f.b;
  m(0, 2) = m(2, 0) = 0.5 * f.c;
  m(1, 3) = m(3, 1) = -0.5 * f.c;
  return TwoModeCM(m);
}

inline TwoModeCM make_two_mode_st(const TwoModeParams& p) {
  validate(p);
  return cm_from_normal_form(normal_form_coefficients(p));
}

struct SymplecticInvariants {
  double i1;           ///< det A
  double i2;           ///< det B
  double i3;           ///< det C
  double i4;           ///< det sigma
  double delta;        ///< I1 + I2 + 2 I3
  double delta_tilde;  ///< I1 + I2 - 2 I3 (partial transpose)
};

inline SymplecticInvariants symplectic_invariants(const TwoModeCM& cm) {
  const auto& m = cm.matrix();
  const double i1 = m.block<2, 2>(0, 0).determinant();
  const double i2 = m.block<2, 2>(2, 2).determinant();
  const double i3 = m.block<2, 2>(0, 2).determinant();
  const double i4 = m.determinant();
  return {i1, i2, i3, i4, i1 + i2 + 2.0 * i3, i1 + i2 - 2.0 * i3};
}

namespace detail {

/// sqrt[(delta +- sqrt(delta^2 - 4 det))/2], descending.
inline std::array<double, 2> two_mode_spectrum(double delta, double det, const char* what) {
  double disc = delta * delta - 4.0 * det;
  if (disc < -kPhysicalTol) {
    throw NumericalError(std::string(what) + ": negative discriminant " + std::to_string(disc));
  }
  disc = std::sqrt(std::max(disc, 0.0));
  const double plus = std::sqrt(std::max(0.5 * (delta + disc), 0.0));
  const double minus = std::sqrt(std::max(0.5 * (delta - disc), 0.0));
  return {plus, minus};
}

/// Same spectrum for a CM already in standard form (A = a I, B = b I,
/// C = diag(c1, c2)), with the discriminant factored as
/// (a^2 - b^2)^2 + 4 (a c1 + b c2)(a c2 + b c1) so that degenerate spectra
/// (pure states) come out exact instead of off by sqrt(eps). Any other shape
/// gives nullopt. `partial_transpose` flips the sign of c2.
inline std::optional<std::array<double, 2>> standard_form_spectrum(const TwoModeCM& cm, bool partial_transpose,
                                                                   const char* what) {
  const auto& m = cm.matrix();
  if (m(0, 0) != m(1, 1) || m(2, 2) != m(3, 3) || m(0, 1) != 0.0 || m(2, 3) != 0.0 || m(0, 3) != 0.0 ||
      m(1, 2) != 0.0)
    return std::nullopt;
  const double a = m(0, 0), b = m(2, 2), c1 = m(0, 2), c2 = partial_transpose ? -m(1, 3) : m(1, 3);
  const double delta = a * a + b * b + 2.0 * c1 * c2;
  const double det = (a * b - c1 * c1) * (a * b - c2 * c2);
  double disc = (a * a - b * b) * (a * a - b * b) + 4.0 * (a * c1 + b * c2) * (a * c2 + b * c1);
  if (disc < -kPhysicalTol) {
    throw NumericalError(std::string(what) + ": negative discriminant " + std::to_string(disc));
  }
  disc = std::sqrt(std::max(disc, 0.0));
  const double plus_sq = 0.5 * (delta + disc);
  // d- from det = (d+ d-)^2 avoids the cancellation in delta - disc
  const double minus = plus_sq > 0.0 ? std::sqrt(std::max(det, 0.0) / plus_sq) : 0.0;
  return std::array<double, 2>{std::sqrt(plus_sq), minus};
}

}  // namespace detail

/// Symplectic eigenvalues as moduli of the eigenvalues of i Omega sigma, descending.
template <int Modes>
std::array<double, Modes> symplectic_eigenvalues(const CovarianceMatrix<Modes>& cm) {
  cm.require_physical("symplectic_eigenvalues");
  const PhaseSpaceMatrix<Modes> product = symplectic_form<Modes>() * cm.matrix();
  Eigen::EigenSolver<PhaseSpaceMatrix<Modes>> es(product, false);
  std::array<double, 2 * Modes> moduli{};
  for (int i = 0; i < 2 * Modes; ++i) moduli[i] = std::abs(es.eigenvalues()[i]);
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  std::array<double, Modes> d{};
  for (int k = 0; k < Modes; ++k) d[k] = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
  return d;
}

/// Two-mode symplectic eigenvalues (d+, d-) from the invariants I1..I4.
inline std::array<double, 2> symplectic_eigenvalues_from_invariants(const TwoModeCM& cm) {
  if (auto d = detail::standard_form_spectrum(cm, false, "symplectic_eigenvalues_from_invariants")) return *d;
  const auto inv = symplectic_invariants(cm);
  return detail::two_mode_spectrum(inv.delta, inv.i4, "symplectic_eigenvalues_from_invariants");
}

template <int Modes>
struct SymplecticDecomposition {
  PhaseSpaceMatrix<Modes> symplectic;  ///< S with sigma = S W S^T
  std::array<double, Modes> d;         ///< symplectic eigenvalues, descending

  PhaseSpaceMatrix<Modes> williamson_form() const {
    PhaseSpaceMatrix<Modes> w = PhaseSpaceMatrix<Modes>::Zero();
    for (int k = 0; k < Modes; ++k) w(2 * k, 2 * k) = w(2 * k + 1, 2 * k + 1) = d[k];
    return w;
  }
  PhaseSpaceMatrix<Modes> reconstruct() const {
    return symplectic * williamson_form() * symplectic.transpose();
  }
};

/// Numerical Williamson decomposition sigma = S diag(d_k I2) S^T.
///
/// With K = sigma^{-1/2} Omega sigma^{-1/2}, the Hermitian matrix iK has spectrum
/// {+-1/d_k}. Real and imaginary parts of each positive-eigenvalue eigenvector
/// span a plane on which K acts as (1/d_k) Omega; collecting them into an
/// orthogonal O gives S = sigma^{1/2} O W^{-1/2}. The residual rotation freedom in
/// each plane is fixed by maximizing the trace of S's diagonal 2x2 block, so
/// diagonal squeezed states return the analytic squeezing matrix.
template <int Modes>
SymplecticDecomposition<Modes> williamson(const CovarianceMatrix<Modes>& cm) {
  using Real = PhaseSpaceMatrix<Modes>;
  using Complex = Eigen::Matrix<std::complex<double>, 2 * Modes, 2 * Modes>;
  constexpr int n = Modes;
  cm.require_physical("williamson");

  Eigen::SelfAdjointEigenSolver<Real> sym(cm.matrix());
  const auto& lambda = sym.eigenvalues();
  if (lambda.minCoeff() <= 0.0) throw UnphysicalStateError("williamson: sigma is not positive definite");
  const Real& v = sym.eigenvectors();
  const Real sqrt_sigma = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
  const Real inv_sqrt_sigma = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  const Real k = inv_sqrt_sigma * symplectic_form<Modes>() * inv_sqrt_sigma;

  const Complex ik = std::complex<double>(0.0, 1.0) * k.template cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Complex> herm(ik);

  SymplecticDecomposition<Modes> out;
  Real o = Real::Zero();
  // eigenvalues ascending: the last n are +1/d_k, smallest 1/d (largest d) first
  for (int mode = 0; mode < n; ++mode) {
    const int idx = n + mode;
    const double mu = herm.eigenvalues()[idx];
    if (mu <= 0.0) throw NumericalError("williamson: spectrum of iK is not symmetric");
    out.d[mode] = 1.0 / mu;
    const auto vec = herm.eigenvectors().col(idx);
    o.col(2 * mode) = std::sqrt(2.0) * vec.imag();
    o.col(2 * mode + 1) = std::sqrt(2.0) * vec.real();
  }
  Real inv_sqrt_w = Real::Zero();
  for (int mode = 0; mode < n; ++mode) {
    inv_sqrt_w(2 * mode, 2 * mode) = inv_sqrt_w(2 * mode + 1, 2 * mode + 1) = 1.0 / std::sqrt(out.d[mode]);
  }
  Real s = sqrt_sigma * o * inv_sqrt_w;

  // rotation gauge within each mode plane
  for (int mode = 0; mode < n; ++mode) {
    const int a = 2 * mode;
    const int b = a + 1;
    const Eigen::Matrix<double, 2 * Modes, 1> c1 = s.col(a);
    const Eigen::Matrix<double, 2 * Modes, 1> c2 = s.col(b);
    const double theta = std::atan2(c2(a) - c1(b), c1(a) + c2(b));
    s.col(a) = std::cos(theta) * c1 + std::sin(theta) * c2;
    s.col(b) = -std::sin(theta) * c1 + std::cos(theta) * c2;
  }
  out.symplectic = s;
  return out;
}

/// Tr[rho1 rho2] = 1/sqrt(det(sigma1 + sigma2)) for zero-mean Gaussian states.
/// Equals the fidelity whenever one of the two states is pure.
template <int Modes>
double overlap(const CovarianceMatrix<Modes>& a, const CovarianceMatrix<Modes>& b) {
  const double det = (a.matrix() + b.matrix()).determinant();
  if (!(det > 0.0)) throw NumericalError("overlap: det(sigma1 + sigma2) is not positive");
  return 1.0 / std::sqrt(det);
}

/// Total mean photon number (Tr sigma - n)/2.
template <int Modes>
double mean_photons(const CovarianceMatrix<Modes>& cm) {
  return 0.5 * (cm.matrix().trace() - static_cast<double>(Modes));
}

}  // namespace lossprobe
