#pragma once

// Brute-force number-basis oracle. Builds the same squeezed thermal states and
// loss channel as truncated density matrices and recomputes discrimination
// quantities from their spectra, independently of the covariance-matrix route.
//
// Two-mode basis ordering: |m1, m2> -> m1 * cutoff + m2, mode 1 = probing mode.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "errors.hpp"
#include "gaussian.hpp"
#include "scalar_search.hpp"

namespace lossprobe::fock {

struct TruncationConfig {
  int dim = 40;             ///< per-mode photon-number cutoff (basis |0>..|dim-1>)
  double tail_tol = 1e-8;   ///< maximum probability mass allowed outside the cutoff
  int work_factor = 2;      ///< squeezing is exponentiated on work_factor * dim levels
};

inline void validate(const TruncationConfig& cfg) {
  if (cfg.dim < 2) throw DomainError("truncation dim must be >= 2");
  if (!(cfg.tail_tol > 0.0 && cfg.tail_tol < 1.0)) throw DomainError("tail_tol must lie in (0, 1)");
  if (cfg.work_factor < 1) throw DomainError("work_factor must be >= 1");
}

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNegativeEigenTol = 1e-10;
/// Eigenvalues below this are treated as outside the support.
inline constexpr double kSupportFloor = 1e-12;

/// Truncated number-basis density matrix of one or two modes.
class FockDensityMatrix {
public:
  FockDensityMatrix(int modes, int cutoff, Eigen::MatrixXcd rho) : modes_(modes), cutoff_(cutoff), rho_(std::move(rho)) {
    if (modes_ != 1 && modes_ != 2) throw DomainError("FockDensityMatrix: modes must be 1 or 2");
    if (cutoff_ < 2) throw DomainError("FockDensityMatrix: cutoff must be >= 2");
    const int n = modes_ == 1 ? cutoff_ : cutoff_ * cutoff_;
    if (rho_.rows() != n || rho_.cols() != n) throw DomainError("FockDensityMatrix: dimension mismatch");
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) throw NumericalError("FockDensityMatrix: matrix is not Hermitian");
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  }

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  int dimension() const { return static_cast<int>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  double trace() const { return rho_.trace().real(); }

  /// Photon number of `mode` in basis state `index`.
  int occupation(int index, int mode) const {
    if (modes_ == 1) return index;
    return mode == 0 ? index / cutoff_ : index % cutoff_;
  }

private:
  int modes_;
  int cutoff_;
  Eigen::MatrixXcd rho_;
};

namespace detail {

/// Thermal occupation probabilities n^m/(n+1)^{m+1}, m = 0..levels-1.
inline std::vector<double> thermal_weights(double n, int levels) {
  std::vector<double> p(static_cast<std::size_t>(levels), 0.0);
  if (n == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double ratio = n / (n + 1.0);
  double w = 1.0 / (n + 1.0);
  for (int m = 0; m < levels; ++m) {
    p[static_cast<std::size_t>(m)] = w;
    w *= ratio;
  }
  return p;
}

inline void check_tail(double deficit, double tail_tol, int dim) {
  if (deficit > tail_tol) {
    throw TruncationError("truncated probability mass " + std::to_string(deficit) + " exceeds tail_tol " +
                          std::to_string(tail_tol) + " at dim " + std::to_string(dim) + "; raise dim");
  }
}

}  // namespace detail

/// S(r) nu(n_T) S(r)^dag with S(r) = exp[(r/2)(a^dag^2 - a^2)], so that the q
/// quadrature variance is (n_T + 1/2) e^{2r}.
inline FockDensityMatrix fock_squeezed_thermal(const SingleModeParams& p, const TruncationConfig& cfg) {
  lossprobe::validate(p);
  validate(cfg);
  const int d = cfg.dim;
  const int work = cfg.work_factor * d;
  Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(work, work);
  for (int m = 0; m + 2 < work; ++m) {
    const double amp = 0.5 * p.r * std::sqrt(static_cast<double>(m + 1) * static_cast<double>(m + 2));
    generator(m + 2, m) = amp;   // a^dag^2
    generator(m, m + 2) = -amp;  // -a^2
  }
  const Eigen::MatrixXd u = generator.exp();
  const auto weights = detail::thermal_weights(p.n_thermal, work);
  Eigen::VectorXd w(work);
  for (int m = 0; m < work; ++m) w(m) = weights[static_cast<std::size_t>(m)];
  const Eigen::MatrixXd top = u.topRows(d);
  const Eigen::MatrixXd rho = top * w.asDiagonal() * top.transpose();
  detail::check_tail(1.0 - rho.trace(), cfg.tail_tol, d);
  return FockDensityMatrix(1, d, rho.cast<std::complex<double>>());
}

/// S2(r) (nu(n_T1) x nu(n_T2)) S2(r)^dag with S2(r) = exp[r(a^dag b^dag - a b)].
/// S2 conserves m1 - m2, so the exponential is taken sector by sector.
inline FockDensityMatrix fock_squeezed_thermal(const TwoModeParams& p, const TruncationConfig& cfg) {
  lossprobe::validate(p);
  validate(cfg);
  const int d = cfg.dim;
  const int work = cfg.work_factor * d;
  const auto w1 = detail::thermal_weights(p.n_thermal1, work);
  const auto w2 = detail::thermal_weights(p.n_thermal2, work);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(d * d, d * d);

  for (int k = -(work - 1); k <= work - 1; ++k) {
    const int off1 = std::max(k, 0);
    const int off2 = std::max(-k, 0);
    const int len = work - std::abs(k);
    // sector states |j + off1, j + off2>, j = 0..len-1
    Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(len, len);
    for (int j = 0; j + 1 < len; ++j) {
      const double amp = p.r * std::sqrt(static_cast<double>(j + off1 + 1) * static_cast<double>(j + off2 + 1));
      generator(j + 1, j) = amp;
      generator(j, j + 1) = -amp;
    }
    const Eigen::MatrixXd u = generator.exp();
    const int kept = std::max(0, d - std::max(off1, off2));
    if (kept == 0) continue;
    Eigen::VectorXd weights(len);
    for (int j = 0; j < len; ++j)
      weights(j) = w1[static_cast<std::size_t>(j + off1)] * w2[static_cast<std::size_t>(j + off2)];
    const Eigen::MatrixXd top = u.topRows(kept);
    const Eigen::MatrixXd block = top * weights.asDiagonal() * top.transpose();
    for (int i = 0; i < kept; ++i) {
      const int row = (i + off1) * d + (i + off2);
      for (int j = 0; j < kept; ++j) rho(row, (j + off1) * d + (j + off2)) = block(i, j);
    }
  }
  detail::check_tail(1.0 - rho.trace(), cfg.tail_tol, d);
  return FockDensityMatrix(2, d, rho.cast<std::complex<double>>());
}

namespace detail {

/// sqrt(C(n, m) (1 - eta)^m eta^{n - m}): matrix element <n - m| V_m |n>.
inline Eigen::MatrixXd kraus_coefficients(int d, double eta) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);  // c(n, m)
  if (eta == 1.0) {
    for (int n = 0; n < d; ++n) c(n, 0) = 1.0;
    return c;
  }
  const double log_eta = std::log(eta);
  const double log_loss = std::log1p(-eta);
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
      c(n, m) = std::exp(0.5 * (log_binom + m * log_loss + (n - m) * log_eta));
    }
  }
  return c;
}

}  // namespace detail

/// Loss channel sum_m V_m rho V_m^dag, V_m = sqrt((1-eta)^m/m!) a^m eta^{(a^dag a - m)/2},
/// on the single mode or on mode 1 of a two-mode state.
inline FockDensityMatrix apply_loss_kraus(const FockDensityMatrix& rho, const LossChannel& ch,
                                          const TruncationConfig& cfg = {}) {
  const int d = rho.cutoff();
  const auto c = detail::kraus_coefficients(d, ch.eta());
  const Eigen::MatrixXcd& in = rho.matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(in.rows(), in.cols());
  if (rho.modes() == 1) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        std::complex<double> acc = 0.0;
        for (int m = 0; i + m < d && j + m < d; ++m) acc += c(i + m, m) * c(j + m, m) * in(i + m, j + m);
        out(i, j) = acc;
      }
  } else {
    for (int i1 = 0; i1 < d; ++i1)
      for (int j1 = 0; j1 < d; ++j1)
        for (int m = 0; i1 + m < d && j1 + m < d; ++m) {
          const double coef = c(i1 + m, m) * c(j1 + m, m);
          if (coef == 0.0) continue;
          out.block(i1 * d, j1 * d, d, d) += coef * in.block((i1 + m) * d, (j1 + m) * d, d, d);
        }
  }
  FockDensityMatrix result(rho.modes(), d, std::move(out));
  detail::check_tail(1.0 - result.trace(), cfg.tail_tol, d);
  return result;
}

struct FockMoments {
  Eigen::VectorXd first;       ///< <q1>, <p1>, ...
  Eigen::MatrixXd covariance;  ///< (1/2)<{R_l, R_m}> - <R_l><R_m>
};

/// First and second quadrature moments from normally ordered expectation
/// values, which are exact inside the truncated space.
inline FockMoments fock_moments(const FockDensityMatrix& rho) {
  const int n = rho.modes();
  const int d = rho.cutoff();
  const int dim = rho.dimension();
  const Eigen::MatrixXcd& m = rho.matrix();
  const int stride[2] = {n == 1 ? 1 : d, 1};

  // Tr[rho A] = sum_j rho(j, i) A(i, j)
  auto lowered = [&](int index, int mode, int& target) -> double {
    const int occ = rho.occupation(index, mode);
    if (occ == 0) return 0.0;
    target = index - stride[mode];
    return std::sqrt(static_cast<double>(occ));
  };
  auto raised = [&](int index, int mode, int& target) -> double {
    const int occ = rho.occupation(index, mode);
    if (occ + 1 >= d) return 0.0;
    target = index + stride[mode];
    return std::sqrt(static_cast<double>(occ + 1));
  };

  Eigen::VectorXcd mean_a(n);                     // <a_k>
  Eigen::MatrixXcd aa(n, n), adag_a(n, n);        // <a_k a_l>, <a_k^dag a_l>
  for (int k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < dim; ++j) {
      int i = 0;
      const double c = lowered(j, k, i);
      if (c != 0.0) acc += m(j, i) * c;
    }
    mean_a(k) = acc;
    for (int l = 0; l < n; ++l) {
      std::complex<double> acc_aa = 0.0;
      std::complex<double> acc_na = 0.0;
      for (int j = 0; j < dim; ++j) {
        int mid = 0;
        const double cl = lowered(j, l, mid);
        if (cl == 0.0) continue;
        int i = 0;
        const double ck = lowered(mid, k, i);
        if (ck != 0.0) acc_aa += m(j, i) * (cl * ck);
        const double cr = raised(mid, k, i);
        if (cr != 0.0) acc_na += m(j, i) * (cl * cr);
      }
      aa(k, l) = acc_aa;
      adag_a(k, l) = acc_na;
    }
  }

  // ladder basis c = (a_1..a_n, a_1^dag..a_n^dag); t(i, j) = <c_i c_j>
  Eigen::MatrixXcd t(2 * n, 2 * n);
  Eigen::VectorXcd mean_c(2 * n);
  for (int k = 0; k < n; ++k) {
    mean_c(k) = mean_a(k);
    mean_c(n + k) = std::conj(mean_a(k));
    for (int l = 0; l < n; ++l) {
      t(k, l) = aa(k, l);
      t(n + k, n + l) = std::conj(aa(l, k));
      t(n + k, l) = adag_a(k, l);
      t(k, n + l) = adag_a(l, k) + (k == l ? 1.0 : 0.0);
    }
  }
  // quadrature R_{2k} = q_k, R_{2k+1} = p_k as combinations of c
  const double h = 1.0 / std::sqrt(2.0);
  const std::complex<double> i_unit(0.0, 1.0);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * n, 2 * n);  // column l: coefficients of R_l
  for (int k = 0; k < n; ++k) {
    u(k, 2 * k) = h;
    u(n + k, 2 * k) = h;
    u(k, 2 * k + 1) = -i_unit * h;
    u(n + k, 2 * k + 1) = i_unit * h;
  }
  FockMoments out{Eigen::VectorXd(2 * n), Eigen::MatrixXd(2 * n, 2 * n)};
  for (int l = 0; l < 2 * n; ++l) out.first(l) = (u.col(l).transpose() * mean_c)(0).real();
  for (int l = 0; l < 2 * n; ++l)
    for (int r = 0; r < 2 * n; ++r) {
      const std::complex<double> lr = (u.col(l).transpose() * t * u.col(r))(0);
      const std::complex<double> rl = (u.col(r).transpose() * t * u.col(l))(0);
      out.covariance(l, r) = 0.5 * (lr + rl).real() - out.first(l) * out.first(r);
    }
  return out;
}

/// Clamped eigen-decomposition of a density matrix.
struct Spectrum {
  Eigen::VectorXd values;     ///< clamped to >= 0, ascending
  Eigen::MatrixXcd vectors;
};

namespace detail {

/// Hermitian eigensolver; real-symmetric input (every state built here) takes
/// the cheaper real path.
inline Spectrum hermitian_eigen(const Eigen::MatrixXcd& m, bool vectors) {
  const int options = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real(), options);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    if (!vectors) return {es.eigenvalues(), {}};
    return {es.eigenvalues(), es.eigenvectors().cast<std::complex<double>>()};
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, options);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  if (!vectors) return {es.eigenvalues(), {}};
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace detail

inline Spectrum spectrum(const Eigen::MatrixXcd& rho) {
  Spectrum out = detail::hermitian_eigen(rho, true);
  const double low = out.values.minCoeff();
  if (low < -kNegativeEigenTol)
    throw NumericalError("density matrix has eigenvalue " + std::to_string(low) + " < -1e-10");
  out.values = out.values.cwiseMax(0.0);
  return out;
}

namespace detail {

/// lambda^s on the support; 0^s = 0 including s = 0 (support projector).
inline double support_power(double lambda, double s) {
  if (lambda <= kSupportFloor) return 0.0;
  return s == 0.0 ? 1.0 : std::pow(lambda, s);
}

inline void require_compatible(const FockDensityMatrix& a, const FockDensityMatrix& b) {
  if (a.modes() != b.modes() || a.cutoff() != b.cutoff())
    throw DomainError("Fock states have mismatched mode count or cutoff");
}

}  // namespace detail

/// Precomputed spectra of a pair of states for repeated s-overlap evaluation:
/// Tr[A^s B^{1-s}] = sum_ij a_i^s b_j^{1-s} |<a_i|b_j>|^2.
class ChernoffSpectra {
public:
  ChernoffSpectra(const FockDensityMatrix& a, const FockDensityMatrix& b) {
    detail::require_compatible(a, b);
    const Spectrum sa = spectrum(a.matrix());
    const Spectrum sb = spectrum(b.matrix());
    std::vector<int> ia, ib;
    for (int i = 0; i < sa.values.size(); ++i)
      if (sa.values(i) > kSupportFloor) ia.push_back(i);
    for (int j = 0; j < sb.values.size(); ++j)
      if (sb.values(j) > kSupportFloor) ib.push_back(j);
    a_values_.resize(static_cast<Eigen::Index>(ia.size()));
    b_values_.resize(static_cast<Eigen::Index>(ib.size()));
    Eigen::MatrixXcd va(sa.vectors.rows(), static_cast<Eigen::Index>(ia.size()));
    Eigen::MatrixXcd vb(sb.vectors.rows(), static_cast<Eigen::Index>(ib.size()));
    for (std::size_t i = 0; i < ia.size(); ++i) {
      a_values_(static_cast<Eigen::Index>(i)) = sa.values(ia[i]);
      va.col(static_cast<Eigen::Index>(i)) = sa.vectors.col(ia[i]);
    }
    for (std::size_t j = 0; j < ib.size(); ++j) {
      b_values_(static_cast<Eigen::Index>(j)) = sb.values(ib[j]);
      vb.col(static_cast<Eigen::Index>(j)) = sb.vectors.col(ib[j]);
    }
    overlaps_ = (va.adjoint() * vb).cwiseAbs2();
  }

  double s_overlap(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("s_overlap: s must lie in [0, 1]");
    Eigen::VectorXd pa(a_values_.size()), pb(b_values_.size());
    for (Eigen::Index i = 0; i < pa.size(); ++i) pa(i) = detail::support_power(a_values_(i), s);
    for (Eigen::Index j = 0; j < pb.size(); ++j) pb(j) = detail::support_power(b_values_(j), 1.0 - s);
    return pa.dot(overlaps_ * pb);
  }

private:
  Eigen::VectorXd a_values_;
  Eigen::VectorXd b_values_;
  Eigen::MatrixXd overlaps_;
};

inline double s_overlap_fock(const FockDensityMatrix& a, const FockDensityMatrix& b, double s) {
  return ChernoffSpectra(a, b).s_overlap(s);
}

struct FockChernoff {
  double q;
  double s_star;
};

/// inf over s in [0, 1] of Tr[A^s B^{1-s}]: both endpoints evaluated exactly,
/// the interior by the same grid + golden search as the Gaussian route.
inline FockChernoff qcb_fock(const FockDensityMatrix& a, const FockDensityMatrix& b) {
  const ChernoffSpectra spectra(a, b);
  const auto interior = search::grid_then_golden([&](double s) { return spectra.s_overlap(s); }, 1e-6,
                                                 1.0 - 1e-6, 21, 1e-10);
  FockChernoff best{interior.value, interior.x};
  for (double s : {0.0, 1.0}) {
    const double v = spectra.s_overlap(s);
    if (v < best.q) best = {v, s};
  }
  return best;
}

/// T = (1/2) Tr|A - B|.
inline double trace_distance_fock(const FockDensityMatrix& a, const FockDensityMatrix& b) {
  detail::require_compatible(a, b);
  return 0.5 * detail::hermitian_eigen(a.matrix() - b.matrix(), false).values.cwiseAbs().sum();
}

inline constexpr int kDefaultTensorCap = 625;

/// rho^{(x)M} as a plain matrix; refuses dimensions above `cap`.
inline Eigen::MatrixXcd tensor_power(const FockDensityMatrix& rho, int copies, int cap = kDefaultTensorCap) {
  if (copies < 1) throw DomainError("tensor_power: copies must be >= 1");
  if (copies == 1) return rho.matrix();  // nothing is built; the cap only bounds products
  double total = 1.0;
  for (int i = 0; i < copies; ++i) total *= rho.dimension();
  if (total > cap)
    throw TruncationError("tensor power dimension " + std::to_string(static_cast<long long>(total)) +
                          " exceeds cap " + std::to_string(cap));
  Eigen::MatrixXcd out = rho.matrix();
  for (int i = 1; i < copies; ++i) out = Eigen::kroneckerProduct(out, rho.matrix()).eval();
  return out;
}

/// Minimum error probability (1 - T(A^M, B^M))/2 from the Helstrom matrix B^M - A^M.
inline double helstrom_pe_fock(const FockDensityMatrix& a, const FockDensityMatrix& b, int copies = 1,
                               int cap = kDefaultTensorCap) {
  detail::require_compatible(a, b);
  const Eigen::MatrixXcd helstrom = tensor_power(b, copies, cap) - tensor_power(a, copies, cap);
  return 0.5 * (1.0 - 0.5 * detail::hermitian_eigen(helstrom, false).values.cwiseAbs().sum());
}

/// Uhlmann fidelity (Tr sqrt(sqrt(A) B sqrt(A)))^2, evaluated as the squared
/// nuclear norm of sqrt(A) sqrt(B): singular values carry absolute rounding
/// error, whereas square roots of near-zero eigenvalues of sqrt(A) B sqrt(A)
/// would turn 1e-17 noise into 1e-9 offsets.
inline double fidelity_fock(const FockDensityMatrix& a, const FockDensityMatrix& b) {
  detail::require_compatible(a, b);
  auto root = [](const Eigen::MatrixXcd& m) -> Eigen::MatrixXcd {
    const Spectrum sp = spectrum(m);
    return sp.vectors * sp.values.cwiseSqrt().asDiagonal() * sp.vectors.adjoint();
  };
  const Eigen::MatrixXcd product = root(a.matrix()) * root(b.matrix());
  const double tr = Eigen::BDCSVD<Eigen::MatrixXcd>(product).singularValues().sum();
  return tr * tr;
}

/// Tr[A B].
inline double trace_product_fock(const FockDensityMatrix& a, const FockDensityMatrix& b) {
  detail::require_compatible(a, b);
  return (a.matrix().cwiseProduct(b.matrix().transpose())).sum().real();
}

}  // namespace lossprobe::fock
