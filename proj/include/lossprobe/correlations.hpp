#pragma once

// Entanglement, discord and mutual information of two-mode Gaussian states.
// All logarithms are natural (nats); use to_bits() for base-2 values.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "gaussian.hpp"

namespace lossprobe {

inline double to_bits(double nats) { return nats / std::numbers::ln2; }

/// Symplectic eigenvalues (d~+, d~-) of the partially transposed state.
inline std::array<double, 2> pt_symplectic_eigenvalues(const TwoModeCM& cm) {
  cm.require_physical("pt_symplectic_eigenvalues");
  if (auto d = detail::standard_form_spectrum(cm, true, "pt_symplectic_eigenvalues")) return *d;
  const auto inv = symplectic_invariants(cm);
  return detail::two_mode_spectrum(inv.delta_tilde, inv.i4, "pt_symplectic_eigenvalues");
}

/// E = max{0, -ln(2 d~-)}; positive iff the state is entangled.
inline double log_negativity(const TwoModeCM& cm) {
  const double d_minus = pt_symplectic_eigenvalues(cm)[1];
  return std::max(0.0, -std::log(2.0 * d_minus));
}

/// h(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2): von Neumann entropy of
/// a thermal mode with symplectic eigenvalue x.
inline double binary_entropy_h(double x) {
  if (!(x >= 0.5 - kPhysicalTol)) throw DomainError("binary_entropy_h: x must be >= 1/2");
  if (x <= 0.5) return 0.0;
  const double up = x + 0.5;
  const double down = x - 0.5;
  return up * std::log(up) - down * std::log(down);
}

inline constexpr double kNormalFormTol = 1e-9;

namespace detail {

/// Reject covariance matrices outside the [[a I, c Z], [c Z, b I]] shape.
inline void require_normal_form(const TwoModeCM& cm) {
  const auto& m = cm.matrix();
  const double dev = std::max({std::abs(m(0, 0) - m(1, 1)), std::abs(m(2, 2) - m(3, 3)),
                               std::abs(m(0, 2) + m(1, 3)), std::abs(m(0, 1)), std::abs(m(2, 3)),
                               std::abs(m(0, 3)), std::abs(m(1, 2))});
  if (dev > kNormalFormTol)
    throw DomainError("discord: covariance matrix is not in two-mode squeezed thermal normal form");
}

}  // namespace detail

/// Gaussian quantum discord (measurement on mode 2) of a two-mode squeezed
/// thermal state:
/// D = h(sqrt I2) - h(d-) - h(d+) + h[(sqrt I1 + 2 sqrt(I1 I2) + 2 I3)/(1 + 2 sqrt I2)].
inline double discord(const TwoModeCM& cm) {
  detail::require_normal_form(cm);
  const auto inv = symplectic_invariants(cm);
  const auto d = symplectic_eigenvalues_from_invariants(cm);
  const double root1 = std::sqrt(inv.i1);
  const double root2 = std::sqrt(inv.i2);
  const double conditional = (root1 + 2.0 * std::sqrt(inv.i1 * inv.i2) + 2.0 * inv.i3) / (1.0 + 2.0 * root2);
  const double value = binary_entropy_h(root2) - binary_entropy_h(d[1]) - binary_entropy_h(d[0]) +
                       binary_entropy_h(std::max(conditional, 0.5));
  return std::max(value, 0.0);
}

/// Prefactor applied to S(A) + S(B) - S(AB).
enum class MutualInfoConvention {
  /// (1/2)[h(sqrt I1) + h(sqrt I2) - h(d+) - h(d-)]; pure states give h(sqrt I1).
  kHalved,
  /// h(sqrt I1) + h(sqrt I2) - h(d+) - h(d-), the von Neumann mutual information.
  kVonNeumann,
};

inline double mutual_information(const TwoModeCM& cm,
                                 MutualInfoConvention convention = MutualInfoConvention::kHalved) {
  const auto inv = symplectic_invariants(cm);
  const auto d = symplectic_eigenvalues_from_invariants(cm);
  const double total = binary_entropy_h(std::sqrt(inv.i1)) + binary_entropy_h(std::sqrt(inv.i2)) -
                       binary_entropy_h(d[0]) - binary_entropy_h(d[1]);
  const double value = convention == MutualInfoConvention::kHalved ? 0.5 * total : total;
  return std::max(value, 0.0);
}

struct CorrelationReport {
  double entanglement;  ///< logarithmic negativity E
  double discord;       ///< D
  double mutual_information;
  double d_tilde_minus;
};

inline CorrelationReport correlation_report(const TwoModeCM& cm,
                                            MutualInfoConvention convention = MutualInfoConvention::kHalved) {
  const double d_tilde_minus = pt_symplectic_eigenvalues(cm)[1];
  return {std::max(0.0, -std::log(2.0 * d_tilde_minus)), discord(cm), mutual_information(cm, convention),
          d_tilde_minus};
}

namespace detail {

/// Average ranks (ties share the mean rank), 1-based.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
    i = j + 1;
  }
  return r;
}

}  // namespace detail

/// Spearman rank correlation: Pearson correlation of the average ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("spearman: need two equal-length samples");
  const auto rx = detail::ranks(x);
  const auto ry = detail::ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("spearman: constant sample");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace lossprobe
