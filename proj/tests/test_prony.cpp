#include "burgers/error.hpp"
#include "burgers/prony.hpp"
#include "burgers/quadrature.hpp"
#include "burgers/relaxation.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace burgers;
using namespace burgers::testing;

namespace {

double max_discrepancy(const BurgersMaterial& m, const PronyForm& pf) {
  const RelaxationEvaluator ev(m);
  double worst = 0.0;
  for (double t : make_grid(0.0, 20.0, 81))
    worst = std::max(worst, rel_err(eval_G_prony(pf, t).kelvin(), ev.G(t).kelvin()));
  return worst;
}

}  // namespace

TEST(JointSpectral, IsotropicFamilySplitsIntoBulkAndShear) {
  const BurgersMaterial m(3, 1.0, {isotropic(3, 2, 1), isotropic(3, 1, 0.5)}, {2.0, 0.5});
  const auto js = joint_spectral(m);
  ASSERT_EQ(js.channels(), 2);
  EXPECT_EQ(js.ranks[0] + js.ranks[1], 6);
  EXPECT_LT(js.reconstruction_error, 1e-13);
  // descending lambda^(0): bulk 8, shear 2
  EXPECT_NEAR(js.channel_eigs(0, 0), 8.0, 1e-13);
  EXPECT_NEAR(js.channel_eigs(0, 1), 2.0, 1e-13);
  EXPECT_NEAR(js.channel_eigs(1, 0), 4.0, 1e-13);
  EXPECT_NEAR(js.channel_eigs(1, 1), 1.0, 1e-13);
}

TEST(JointSpectral, SharedBasisSplitsDegenerateC0) {
  // C0 = I is fully degenerate; C1 decides the channels.
  Matrix c1 = Matrix::Zero(3, 3);
  c1.diagonal() << 3.0, 1.0, 2.0;
  const BurgersMaterial m(2, 1.0, {ElasticTensor4::identity(2), ElasticTensor4(2, c1)}, {1, 1});
  const auto js = joint_spectral(m);
  EXPECT_EQ(js.channels(), 3);
  EXPECT_LT(js.reconstruction_error, 1e-13);
}

TEST(JointSpectral, RejectsNonCommutingFamily) {
  Rng rng(2);
  const auto m = random_material(2, 1, rng);
  try {
    joint_spectral(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "non-commuting");
  }
  const auto cc = commutativity(m);
  EXPECT_GT(cc.worst, 1e-6);
  EXPECT_EQ(cc.i, 0);
  EXPECT_EQ(cc.j, 1);
}

TEST(ChannelPoles, ScalarSurrogateQuadratic) {
  const auto js = joint_spectral(unit_scalar());
  const auto d = channel_rational(js, {1.0, 1.0}, 0);
  EXPECT_DOUBLE_EQ(d.a0, 1.0);
  EXPECT_DOUBLE_EQ(d.b0, 1.0);
  // D(s) = 1 + s + s/(s+1) = (s^2 + 3 s + 1)/(s + 1)
  for (double s : {0.3, 1.0, 4.0})
    EXPECT_NEAR(d.eval(s) * (s + 1.0), s * s + 3.0 * s + 1.0, 1e-14);
  auto ch = channel_poles(d);
  ASSERT_EQ(ch.roots.size(), 2u);
  EXPECT_NEAR(ch.roots[0], -(3.0 + std::sqrt(5.0)) / 2.0, 1e-14);
  EXPECT_NEAR(ch.roots[1], -(3.0 - std::sqrt(5.0)) / 2.0, 1e-14);
  EXPECT_EQ(ch.max_imag_ratio, 0.0);
  partial_fractions(ch, d);
  EXPECT_NEAR(ch.coeffs[0][0], 0.7236067977499790, 1e-14);
  EXPECT_NEAR(ch.coeffs[1][0], 0.2763932022500210, 1e-14);
  EXPECT_FALSE(ch.least_squares);
  EXPECT_EQ(ch.eval(-1.0), 0.0);
}

TEST(ChannelPoles, RootsInterlaceWithKelvinVoigtPoles) {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_commuting_material(2, 3, CommutingKind::SharedEigenbasis, rng);
    const auto js = joint_spectral(m);
    for (int k = 0; k < js.channels(); ++k) {
      const auto d = channel_rational(js, m.eta(), k);
      const auto ch = channel_poles(d);
      std::vector<double> negA = ch.group_A;
      for (double& v : negA) v = -v;
      std::sort(negA.begin(), negA.end());
      ASSERT_EQ(ch.roots.size(), negA.size() + 1);
      for (std::size_t l = 0; l < negA.size(); ++l) {
        EXPECT_LT(ch.roots[l], negA[l]);
        EXPECT_GT(ch.roots[l + 1], negA[l]);
      }
      EXPECT_LT(ch.roots.back(), 0.0);
    }
  }
}

TEST(ChannelPoles, CoincidentKelvinVoigtElementsMerge) {
  // Two identical Kelvin-Voigt elements act as one with doubled weight.
  const auto m = scalar_material(2, {1, 2, 2}, {1, 0.5, 0.5});
  const auto pf = build_prony(m);
  for (const auto& ch : pf.channels) {
    EXPECT_EQ(ch.group_A.size(), 1u);
    EXPECT_EQ(ch.roots.size(), 2u);
  }
  EXPECT_LT(max_discrepancy(m, pf), 1e-10);
}

TEST(ConfluentResidues, DoublePole) {
  // s / (s+1)^2 = 1/(s+1) - 1/(s+1)^2
  const auto g = confluent_residues(1.0, {0.0}, {-1.0}, {2});
  EXPECT_NEAR(g[0][0], 1.0, 1e-14);
  EXPECT_NEAR(g[0][1], -1.0, 1e-14);
  // 1 / ((s+1)^2 (s+2)) = 1/(s+2) - 1/(s+1) + 1/(s+1)^2
  const auto h = confluent_residues(1.0, {}, {-1.0, -2.0}, {2, 1});
  EXPECT_NEAR(h[0][0], -1.0, 1e-13);
  EXPECT_NEAR(h[0][1], 1.0, 1e-13);
  EXPECT_NEAR(h[1][0], 1.0, 1e-13);
}

TEST(Prony, AgreesWithExponentialOnCommutingFamilies) {
  Rng rng(404);
  for (int trial = 0; trial < 12; ++trial) {
    const auto kind = trial % 2 ? CommutingKind::Isotropic : CommutingKind::SharedEigenbasis;
    const auto m = random_commuting_material(2 + trial % 2, 1 + trial % 3, kind, rng);
    const auto pf = build_prony(m);
    EXPECT_LT(pf.initial_value_error, 1e-12);
    EXPECT_LT(max_discrepancy(m, pf), 1e-8);
    const auto b = spectral_bounds(m);
    for (const auto& ch : pf.channels) {
      EXPECT_LE(ch.max_imag_ratio, 1e-9);
      int total = 0;
      for (int j : ch.multiplicities) total += j;
      EXPECT_EQ(total, static_cast<int>(ch.group_A.size()) + 1);
      for (double r : ch.roots) {
        EXPECT_LE(r, -b.alpha2 + 1e-9);
        EXPECT_GE(r, -b.alpha1 - 1e-9);
      }
    }
  }
}

TEST(Prony, CausalAndExactAtZero) {
  const BurgersMaterial m(3, 1.0, {isotropic(3, 2, 1), isotropic(3, 1, 0.5)}, {2.0, 0.5});
  const auto pf = build_prony(m);
  EXPECT_TRUE((eval_G_prony(pf, -1e-9).kelvin().array() == 0.0).all());
  EXPECT_LT(rel_err(eval_G_prony(pf, 0.0).kelvin(), m.c()[0].kelvin()), 1e-13);
}

TEST(Prony, TableHeader) {
  const auto pf = build_prony(unit_scalar());
  std::ostringstream os;
  write_prony_table(os, pf);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# channel root multiplicity_index coefficient\n", 0), 0u);
  EXPECT_NE(s.find("# projection 0 rank 3"), std::string::npos);
}

TEST(LaplaceTransform, MatchesNumericalTransformOfKernel) {
  Rng rng(55);
  const auto m = random_material(2, 2, rng);
  const RelaxationEvaluator ev(m);
  const double s = 0.7;
  const double horizon = 60.0 / std::min(s, ev.bounds().alpha2);
  const Matrix num = integrate_adaptive(
      [&](double t) { return Matrix(std::exp(-s * t) * ev.G(t).kelvin()); }, 0.0, horizon, 1e-13);
  EXPECT_LT(rel_err(relaxation_transform(m, s), num), 1e-10);
}

TEST(NoMaxwell, EquilibriumModulusPreventsDecay) {
  const BurgersMaterial m(3, 1.0, {isotropic(3, 2, 1), isotropic(3, 1, 0.5)}, {2.0, 0.5});
  const auto rep = no_maxwell_counterexample(m);
  // a single Kelvin-Voigt element: (C1^{-1})^{-1} = C1
  EXPECT_LT(rel_err(rep.equilibrium_modulus, m.c()[1].kelvin()), 1e-12);
  EXPECT_GT(rep.equilibrium_min_eigenvalue, 0.0);
  EXPECT_FALSE(rep.decays_without_maxwell);
  EXPECT_TRUE(rep.decays_with_maxwell);
  EXPECT_NEAR(rep.limit_without_maxwell, m.c()[1].kelvin().norm(), 1e-6);
  EXPECT_LT(rep.limit_with_maxwell, 1e-6);
}
