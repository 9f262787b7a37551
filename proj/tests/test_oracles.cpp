// Reference values from tests/oracles/derive_values.py (mpmath at 50 digits
// and scipy.linalg.expm), frozen here.

#include "burgers/constitutive.hpp"
#include "burgers/prony.hpp"
#include "burgers/relaxation.hpp"
#include "support.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

using namespace burgers;
using namespace burgers::testing;

namespace {

struct Sample {
  double t;
  double value;
};

BurgersMaterial isotropic_pair() {
  return BurgersMaterial(3, 1.0, {isotropic(3, 2.0, 1.0), isotropic(3, 1.0, 0.5)}, {2.0, 0.5});
}

}  // namespace

TEST(Oracle, UnitScalarEigenpairs) {
  const RelaxationEvaluator ev(unit_scalar());
  // every Kelvin channel carries the same scalar pair
  const Vector& lam = ev.eigenvalues();
  EXPECT_NEAR(lam(0), -2.6180339887498948, 1e-14);
  EXPECT_NEAR(lam(lam.size() - 1), -0.38196601125010515, 1e-14);
  EXPECT_NEAR(ev.bounds().alpha2, 0.38196601125010515, 1e-15);
}

TEST(Oracle, UnitScalarKernel) {
  const RelaxationEvaluator ev(unit_scalar());
  const auto pf = build_prony(unit_scalar());
  for (const Sample s : {Sample{0.5, 0.42377695892279497}, Sample{1.0, 0.24142772397831023},
                         Sample{2.0, 0.1326029787988398}, Sample{5.0, 0.04093686292287702}}) {
    EXPECT_NEAR(ev.G(s.t).kelvin()(0, 0), s.value, 1e-15);
    EXPECT_NEAR(eval_G_prony(pf, s.t).kelvin()(2, 2), s.value, 1e-15);
    EXPECT_EQ(ev.G(s.t).kelvin()(0, 1), 0.0);
  }
}

TEST(Oracle, UnitScalarRampStress) {
  const auto m = unit_scalar();
  Vector rate = Vector::Zero(3);
  rate(1) = 1.0;
  const auto h = StrainHistory::ramp(2, SymTensor2(2, rate), 5.0, 1);
  EXPECT_NEAR(convolve(RelaxationEvaluator(m), h).back().kelvin()(1), 0.89282924341832949, 1e-14);
}

TEST(Oracle, ThreeElementScalarKernel) {
  const auto m = scalar_material(2, {2.0, 1.0, 3.0}, {1.0, 2.0, 0.5});
  const RelaxationEvaluator ev(m);
  const auto pf = build_prony(m);
  ASSERT_EQ(pf.channels.size(), 1u);
  const auto& roots = pf.channels[0].roots;
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], -11.449631298483085, 1e-12);
  EXPECT_NEAR(roots[1], -1.7511103878712151, 1e-13);
  EXPECT_NEAR(roots[2], -0.2992583136456999, 1e-14);
  EXPECT_NEAR(pf.channels[0].coeffs[0][0], 1.1035746361570078, 1e-13);
  EXPECT_NEAR(pf.channels[0].coeffs[1][0], 0.7550456292432724, 1e-13);
  EXPECT_NEAR(pf.channels[0].coeffs[2][0], 0.14137973459971984, 1e-13);
  for (const Sample s : {Sample{0.25, 0.68159559956452436}, Sample{1.0, 0.23588779722362502},
                         Sample{3.0, 0.06155769029663857}}) {
    EXPECT_NEAR(ev.G(s.t).kelvin()(1, 1), s.value, 1e-14);
    EXPECT_NEAR(eval_G_prony(pf, s.t).kelvin()(1, 1), s.value, 1e-14);
  }
}

TEST(Oracle, IsotropicPairAgainstBlockExpm) {
  const RelaxationEvaluator ev(isotropic_pair());
  struct Entry {
    double t;
    int i;
    int j;
    double value;
  };
  const Entry entries[] = {
      {0.5, 0, 0, 0.72965370299314436},  {0.5, 0, 1, 0.22036640601058899},
      {0.5, 3, 3, 0.50928729698255659},  {1.0, 0, 0, 0.47887521684228584},
      {1.0, 0, 1, 0.082725770279820449}, {1.0, 3, 3, 0.39614944656246676},
      {4.0, 0, 0, 0.11336730586495787},  {4.0, 0, 1, -0.04771438348552285},
      {4.0, 3, 3, 0.16108168935048178},
  };
  const auto pf = build_prony(isotropic_pair());
  for (const auto& e : entries) {
    EXPECT_NEAR(ev.G(e.t).kelvin()(e.i, e.j), e.value, 1e-13);
    EXPECT_NEAR(eval_G_prony(pf, e.t).kelvin()(e.i, e.j), e.value, 1e-13);
  }
}

TEST(Oracle, KernelIntegralByGaussKronrod) {
  Rng rng(606);
  const auto m = random_material(3, 2, rng);
  const RelaxationEvaluator ev(m);
  using boost::math::quadrature::gauss_kronrod;
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      const double deriv = gauss_kronrod<double, 31>::integrate(
          [&](double s) { return ev.G_deriv(s, 1).kelvin()(i, j); }, 0.0, 3.0, 15, 1e-14);
      const double diff = ev.G(3.0).kelvin()(i, j) - ev.G(0.0).kelvin()(i, j);
      EXPECT_NEAR(deriv, diff, 1e-11 * m.c()[0].kelvin().norm());
    }
  }
  // ramp stress is the running integral of G
  Vector rate = Vector::Zero(6);
  rate(3) = 1.0;
  const auto h = StrainHistory::ramp(3, SymTensor2(3, rate), 2.0, 7);
  const Vector sigma = convolve(ev, h).back().kelvin();
  for (int i = 0; i < 6; ++i) {
    const double ref = gauss_kronrod<double, 31>::integrate(
        [&](double s) { return ev.G(s).kelvin()(i, 3); }, 0.0, 2.0, 15, 1e-14);
    EXPECT_NEAR(sigma(i), ref, 1e-12);
  }
}
