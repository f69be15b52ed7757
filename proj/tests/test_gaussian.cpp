#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lossprobe/gaussian.hpp"

using namespace lossprobe;

namespace {

template <int M>
double max_abs_diff(const PhaseSpaceMatrix<M>& a, const PhaseSpaceMatrix<M>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(CovarianceMatrix, RejectsAsymmetricInput) {
  PhaseSpaceMatrix<1> m;
  m << 1.0, 0.1, 0.0, 1.0;
  EXPECT_THROW(SingleModeCM{m}, DomainError);
}

TEST(CovarianceMatrix, RejectsNonFinite) {
  PhaseSpaceMatrix<1> m = PhaseSpaceMatrix<1>::Identity();
  m(0, 0) = std::nan("");
  EXPECT_THROW(SingleModeCM{m}, DomainError);
}

TEST(CovarianceMatrix, PhysicalityQuery) {
  EXPECT_TRUE(SingleModeCM(0.5 * PhaseSpaceMatrix<1>::Identity()).is_physical());
  const SingleModeCM sub(0.4 * PhaseSpaceMatrix<1>::Identity());
  EXPECT_FALSE(sub.is_physical());
  EXPECT_THROW(symplectic_eigenvalues(sub), UnphysicalStateError);
}

TEST(Params, ValidationRejectsNegatives) {
  EXPECT_THROW(make_single_mode_st({-0.1, 0.0}), DomainError);
  EXPECT_THROW(make_single_mode_st({0.1, -1.0}), DomainError);
  EXPECT_THROW(make_two_mode_st({0.1, 0.0, -0.5}), DomainError);
}

TEST(SingleModeSt, Vacuum) {
  EXPECT_LT(max_abs_diff<1>(make_single_mode_st({0, 0}).matrix(), 0.5 * PhaseSpaceMatrix<1>::Identity()), 1e-15);
}

TEST(SingleModeSt, Thermal) {
  EXPECT_LT(max_abs_diff<1>(make_single_mode_st({0, 1}).matrix(), 1.5 * PhaseSpaceMatrix<1>::Identity()), 1e-15);
}

TEST(SingleModeSt, SqueezedVacuum) {
  const auto cm = make_single_mode_st({1.0, 0.0});
  EXPECT_NEAR(cm(0, 0), 3.69452804946532, 1e-12);
  EXPECT_NEAR(cm(1, 1), 0.0676676416183064, 1e-12);
  EXPECT_EQ(cm(0, 1), 0.0);
}

TEST(SingleModeSt, PhasePiIsTheRealCase) {
  const SingleModeParams p{0.7, 0.4};
  EXPECT_LT(max_abs_diff<1>(make_single_mode_st_phased(p, M_PI).matrix(), make_single_mode_st(p).matrix()), 1e-12);
  const auto rotated = make_single_mode_st_phased(p, 0.3);
  EXPECT_NEAR(rotated.matrix().determinant(), make_single_mode_st(p).matrix().determinant(), 1e-12);
}

TEST(TwoModeSt, Vacuum) {
  EXPECT_LT(max_abs_diff<2>(make_two_mode_st({0, 0, 0}).matrix(), 0.5 * PhaseSpaceMatrix<2>::Identity()), 1e-15);
}

TEST(TwoModeSt, ThermalTimesVacuum) {
  PhaseSpaceMatrix<2> expected = PhaseSpaceMatrix<2>::Zero();
  expected.diagonal() << 2.5, 2.5, 0.5, 0.5;
  EXPECT_LT(max_abs_diff<2>(make_two_mode_st({0, 2, 0}).matrix(), expected), 1e-15);
}

TEST(TwoModeSt, TmsvCoefficients) {
  const auto f = normal_form_coefficients({0.5, 0, 0});
  EXPECT_NEAR(f.a, 1.54308063481524, 1e-12);
  EXPECT_NEAR(f.b, 1.54308063481524, 1e-12);
  EXPECT_NEAR(f.c, 1.17520119364380, 1e-12);
  const auto cm = make_two_mode_st({0.5, 0, 0});
  EXPECT_NEAR(cm(0, 2), 0.5 * f.c, 1e-15);
  EXPECT_NEAR(cm(1, 3), -0.5 * f.c, 1e-15);
}

TEST(TwoModeSt, MatchesSymplecticConjugation) {
  const TwoModeParams p{0.45, 0.3, 0.7};
  PhaseSpaceMatrix<2> w = PhaseSpaceMatrix<2>::Zero();
  w.diagonal() << 0.8, 0.8, 1.2, 1.2;
  const auto s = two_mode_squeezing_matrix(p.r);
  EXPECT_LT(max_abs_diff<2>(s * w * s.transpose(), make_two_mode_st(p).matrix()), 1e-12);
}

TEST(Invariants, Vacuum) {
  const auto inv = symplectic_invariants(make_two_mode_st({0, 0, 0}));
  EXPECT_NEAR(inv.i1, 0.25, 1e-15);
  EXPECT_NEAR(inv.i2, 0.25, 1e-15);
  EXPECT_NEAR(inv.i3, 0.0, 1e-15);
  EXPECT_NEAR(inv.i4, 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(inv.delta, 0.5, 1e-15);
  EXPECT_NEAR(inv.delta_tilde, 0.5, 1e-15);
}

TEST(Invariants, ThermalTimesVacuum) {
  const auto inv = symplectic_invariants(make_two_mode_st({0, 2, 0}));
  EXPECT_NEAR(inv.i1, 25.0 / 4.0, 1e-13);
  EXPECT_NEAR(inv.i2, 0.25, 1e-15);
  EXPECT_NEAR(inv.i3, 0.0, 1e-15);
  EXPECT_NEAR(inv.i4, 25.0 / 16.0, 1e-13);
}

TEST(Invariants, TmsvNegativeCrossDeterminant) {
  const double half_sinh = 0.5 * std::sinh(1.0);
  EXPECT_NEAR(symplectic_invariants(make_two_mode_st({0.5, 0, 0})).i3, -half_sinh * half_sinh, 1e-13);
  EXPECT_NEAR(-half_sinh * half_sinh, -0.3452744613854539, 1e-15);
}

TEST(SymplecticEigenvalues, TmsvIsPure) {
  for (double r : {0.1, 0.8, 2.0}) {
    const auto d = symplectic_eigenvalues(make_two_mode_st({r, 0, 0}));
    EXPECT_NEAR(d[0], 0.5, 1e-10);
    EXPECT_NEAR(d[1], 0.5, 1e-10);
  }
}

TEST(SymplecticEigenvalues, ThermalProductSorted) {
  const auto d = symplectic_eigenvalues(make_two_mode_st({0, 0.3, 1.7}));
  EXPECT_NEAR(d[0], 2.2, 1e-12);
  EXPECT_NEAR(d[1], 0.8, 1e-12);
}

TEST(SymplecticEigenvalues, InvariantFormulaAgreesWithSpectrum) {
  // (r=0.5, n1=1, n2=0): reference from numpy |eig(i Omega sigma)| = (1.5, 0.5)
  const auto cm = make_two_mode_st({0.5, 1, 0});
  const auto a = symplectic_eigenvalues(cm);
  const auto b = symplectic_eigenvalues_from_invariants(cm);
  EXPECT_NEAR(a[0], b[0], 1e-10);
  EXPECT_NEAR(a[1], b[1], 1e-10);
  EXPECT_NEAR(a[0], 1.5, 1e-10);
  EXPECT_NEAR(a[1], 0.5, 1e-10);
}

TEST(SymplecticEigenvalues, RandomAgreementAndPhysicality) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ur(0.0, 2.0), un(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const auto cm = make_two_mode_st({ur(rng), un(rng), un(rng)});
    const auto a = symplectic_eigenvalues(cm);
    const auto b = symplectic_eigenvalues_from_invariants(cm);
    ASSERT_NEAR(a[0], b[0], 1e-10 * std::max(1.0, a[0]));
    ASSERT_NEAR(a[1], b[1], 1e-10 * std::max(1.0, a[1]));
    ASSERT_GE(a[1], 0.5 - 1e-10);
    ASSERT_TRUE(cm.is_physical());
  }
}

TEST(Williamson, VacuumGivesIdentity) {
  const auto w = williamson(make_single_mode_st({0, 0}));
  EXPECT_NEAR(w.d[0], 0.5, 1e-12);
  EXPECT_LT(max_abs_diff<1>(w.symplectic, PhaseSpaceMatrix<1>::Identity()), 1e-10);
}

TEST(Williamson, SingleModeReconstruction) {
  const auto cm = make_single_mode_st({1.0, 1.0});
  const auto w = williamson(cm);
  EXPECT_NEAR(w.d[0], 1.5, 1e-10);
  EXPECT_LT(max_abs_diff<1>(w.reconstruct(), cm.matrix()), 1e-10);
  EXPECT_LT(max_abs_diff<1>(w.symplectic, squeezing_matrix(1.0)), 1e-8);
}

TEST(Williamson, TwoModeSymplecticIdentity) {
  const auto cm = make_two_mode_st({0.3, 0.5, 0.2});
  const auto w = williamson(cm);
  const auto omega = symplectic_form<2>();
  EXPECT_LT(max_abs_diff<2>(w.symplectic * omega * w.symplectic.transpose(), omega), 1e-10);
  EXPECT_LT(max_abs_diff<2>(w.reconstruct(), cm.matrix()), 1e-10);
  EXPECT_NEAR(w.d[0], 1.0, 1e-10);
  EXPECT_NEAR(w.d[1], 0.7, 1e-10);
}

TEST(Williamson, DegenerateSpectrumStillReconstructs) {
  const auto cm = make_two_mode_st({0.9, 0.0, 0.0});
  const auto w = williamson(cm);
  EXPECT_LT(max_abs_diff<2>(w.reconstruct(), cm.matrix()), 1e-10);
}

TEST(Williamson, RecoversThermalNumberOverRange) {
  for (double r = 0.0; r <= 3.0; r += 0.5)
    for (double n : {0.0, 0.1, 1.0, 4.0, 10.0}) {
      const auto w = williamson(make_single_mode_st({r, n}));
      ASSERT_NEAR(w.d[0], n + 0.5, 1e-10 * std::max(1.0, n)) << "r=" << r << " n=" << n;
    }
}

TEST(Overlap, Examples) {
  const auto vac = make_single_mode_st({0, 0});
  EXPECT_NEAR(overlap(vac, vac), 1.0, 1e-15);
  EXPECT_NEAR(overlap(vac, make_single_mode_st({0, 1})), 0.5, 1e-15);
  for (double r : {0.2, 1.3}) {
    const auto t = make_two_mode_st({r, 0, 0});
    EXPECT_NEAR(overlap(t, t), 1.0, 1e-10);
  }
}

TEST(Overlap, SymmetricAndBounded) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int i = 0; i < 200; ++i) {
    const auto a = make_two_mode_st({u(rng), u(rng), u(rng)});
    const auto b = make_two_mode_st({u(rng), u(rng), u(rng)});
    ASSERT_NEAR(overlap(a, b), overlap(b, a), 1e-14);
    ASSERT_LE(overlap(a, b), 1.0 + 1e-12);
  }
}

TEST(MeanPhotons, ClosedForms) {
  EXPECT_NEAR(mean_photons(make_single_mode_st({0, 0})), 0.0, 1e-15);
  for (double r : {0.0, 0.4, 1.1})
    for (double n : {0.0, 0.3, 2.0}) {
      const double ns = std::sinh(r) * std::sinh(r);
      EXPECT_NEAR(mean_photons(make_single_mode_st({r, n})), n + ns + 2.0 * ns * n, 1e-10);
      for (double n2 : {0.0, 0.5}) {
        // two-mode total: n1 + n2 + 2 n_S (1 + n1 + n2)
        EXPECT_NEAR(mean_photons(make_two_mode_st({r, n, n2})), n + n2 + 2.0 * ns * (1.0 + n + n2), 1e-10);
      }
    }
}

TEST(CovarianceMatrix, CompileTimeModeCount) {
  static_assert(SupportedModeCount<1> && SupportedModeCount<2>);
  static_assert(!SupportedModeCount<3>);
  SUCCEED();
}
