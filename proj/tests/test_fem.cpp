#include "burgers/fem.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

using namespace burgers;
using namespace burgers::testing;

namespace {

FemConfig reference(double inv_eta_scale = 1.0) {
  FemConfig cfg;
  cfg.materials.emplace_back(2, 1.0, std::vector<ElasticTensor4>{isotropic(2, 1, 1), isotropic(2, 1, 1)},
                             std::vector<double>{1.0 / inv_eta_scale, 1.0 / inv_eta_scale});
  return cfg;
}

}  // namespace

TEST(Mesh, UnitSquareTopology) {
  const auto mesh = MeshP1::unit_square(5);
  EXPECT_EQ(mesh.nodes.size(), 25u);
  EXPECT_EQ(mesh.triangles.size(), 32u);
  EXPECT_NEAR(std::accumulate(mesh.areas.begin(), mesh.areas.end(), 0.0), 1.0, 1e-14);
  EXPECT_EQ(std::count(mesh.dirichlet.begin(), mesh.dirichlet.end(), 1), 5);
  EXPECT_EQ(mesh.boundary.size(), 16u);
  for (double a : mesh.areas) EXPECT_GT(a, 0.0);
  EXPECT_DOUBLE_EQ(mesh.spacing(), 0.25);
}

TEST(Mesh, EveryBoundaryEdgeTaggedOnce) {
  const int N = 6;
  const auto mesh = MeshP1::unit_square(N);
  std::set<std::pair<int, int>> seen;
  int dirichlet = 0;
  for (const auto& e : mesh.boundary) {
    EXPECT_TRUE(seen.insert(std::minmax(e.a, e.b)).second);
    const auto& pa = mesh.nodes[e.a];
    const auto& pb = mesh.nodes[e.b];
    const bool left = pa.x() == 0.0 && pb.x() == 0.0;
    EXPECT_EQ(e.tag == BoundaryTag::Dirichlet, left);
    dirichlet += left;
  }
  EXPECT_EQ(static_cast<int>(seen.size()), 4 * (N - 1));
  EXPECT_EQ(dirichlet, N - 1);
  // Each boundary edge belongs to exactly one triangle; interior edges to two.
  std::map<std::pair<int, int>, int> owners;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) ++owners[std::minmax(t[k], t[(k + 1) % 3])];
  for (const auto& [edge, count] : owners) EXPECT_EQ(count, seen.count(edge) ? 1 : 2);
}

TEST(Mesh, StrainOfLinearField) {
  const auto mesh = MeshP1::unit_square(4);
  // u = (a x + b y, c x + d y): e11 = a, e22 = d, e12 = (b + c)/2
  const double a = 0.3, b = -0.2, c = 0.7, d = 0.1;
  for (int e = 0; e < static_cast<int>(mesh.triangles.size()); ++e) {
    Eigen::Matrix<double, 6, 1> u;
    for (int k = 0; k < 3; ++k) {
      const auto& p = mesh.nodes[mesh.triangles[e][k]];
      u(2 * k) = a * p.x() + b * p.y();
      u(2 * k + 1) = c * p.x() + d * p.y();
    }
    const Eigen::Vector3d s = strain_displacement(mesh, e) * u;
    EXPECT_NEAR(s(0), a, 1e-13);
    EXPECT_NEAR(s(1), d, 1e-13);
    EXPECT_NEAR(s(2), std::sqrt(2.0) * 0.5 * (b + c), 1e-13);
  }
}

TEST(Assembly, MassAndRigidMotions) {
  const auto mesh = MeshP1::unit_square(5);
  const std::vector<Matrix> c0(mesh.triangles.size(), isotropic(2, 1, 1).kelvin());
  for (bool lumped : {false, true}) {
    const auto ops = assemble(mesh, c0, 2.0, lumped);
    const Vector ones = Vector::Ones(ops.mass.rows());
    EXPECT_NEAR(ones.dot(ops.mass * ones), 2.0 * 2.0, 1e-12);  // rho * area * 2 components
    Vector shift = Vector::Zero(ops.stiffness.rows());
    for (int i = 0; i < shift.size(); i += 2) shift(i) = 1.0;
    EXPECT_LT((ops.stiffness * shift).norm(), 1e-12);
    Vector rot(shift.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
      rot(2 * i) = -mesh.nodes[i].y();
      rot(2 * i + 1) = mesh.nodes[i].x();
    }
    EXPECT_LT((ops.stiffness * rot).norm(), 1e-12);
  }
}

TEST(Decay, ReferenceRun) {
  const auto r = run_decay_experiment(reference());
  EXPECT_LE(r.ratio, 1e-3);
  EXPECT_LT(r.slope, 0.0);
  EXPECT_LE(r.max_energy_increase, 1e-14);
  EXPECT_EQ(r.dirichlet_max, 0.0);
  EXPECT_LT(r.max_solve_residual, 1e-10);
  EXPECT_EQ(r.trace.times.size(), static_cast<std::size_t>(r.steps) + 1);
  EXPECT_DOUBLE_EQ(r.trace.times.back(), 40.0);
}

TEST(Decay, FrozenInternalVariablesConserveEnergy) {
  auto cfg = reference();
  cfg.freeze_internal = true;
  cfg.t_end = 10.0;
  const auto r = run_decay_experiment(cfg);
  EXPECT_NEAR(r.ratio, 1.0, 1e-12);
}

TEST(Decay, ZeroInitialDataStaysZero) {
  auto cfg = reference();
  cfg.amplitude = 0.0;
  cfg.t_end = 5.0;
  Vector worst = Vector::Zero(1);
  const auto r = run_decay_experiment(cfg, [&](double, const Vector& u) {
    worst(0) = std::max(worst(0), u.cwiseAbs().maxCoeff());
  });
  EXPECT_EQ(worst(0), 0.0);
  for (double e : r.trace.total) EXPECT_EQ(e, 0.0);
}

TEST(Decay, LumpedMassAlsoDecays) {
  auto cfg = reference();
  cfg.lumped_mass = true;
  const auto r = run_decay_experiment(cfg);
  EXPECT_LE(r.ratio, 1e-3);
  EXPECT_LE(r.max_energy_increase, 1e-14);
}

TEST(Decay, GridConvergenceOfRate) {
  auto fine = reference();
  fine.N = 17;
  const double s9 = run_decay_experiment(reference()).slope;
  const double s17 = run_decay_experiment(fine).slope;
  EXPECT_LT(std::abs(s17 - s9) / std::abs(s9), 0.1);
}

TEST(Decay, RateGrowsWithInverseViscosityInOverdampedRange) {
  double prev = 0.0;
  for (double scale : {0.25, 0.5, 1.0}) {
    const double s = run_decay_experiment(reference(scale)).slope;
    EXPECT_LT(s, prev) << "scale " << scale;
    prev = s;
  }
}

TEST(Decay, RateReversesWhenDashpotsBecomeStiff) {
  // Very fluid dashpots transmit little damping; the rate falls again.
  const double s1 = run_decay_experiment(reference(1.0)).slope;
  const double s2 = run_decay_experiment(reference(2.0)).slope;
  const double s4 = run_decay_experiment(reference(4.0)).slope;
  EXPECT_GT(s2, s1);
  EXPECT_GT(s4, s2);
}

TEST(Decay, LockedMaxwellDashpotDecaysMuchSlower) {
  auto cfg = reference();
  cfg.materials.clear();
  cfg.materials.emplace_back(2, 1.0, std::vector<ElasticTensor4>{isotropic(2, 1, 1), isotropic(2, 1, 1)},
                             std::vector<double>{std::numeric_limits<double>::infinity(), 1.0});
  cfg.h = 0.03125;
  const auto r = run_decay_experiment(cfg);
  const auto ref = run_decay_experiment(reference());
  EXPECT_GT(r.ratio, 1e6 * ref.ratio);
  EXPECT_GT(r.slope, 0.5 * ref.slope);
}

TEST(Decay, HeterogeneousRegions) {
  auto cfg = reference();
  cfg.materials.emplace_back(2, 1.0, std::vector<ElasticTensor4>{isotropic(2, 2, 2), isotropic(2, 1, 0.5)},
                             std::vector<double>{0.5, 2.0});
  const auto mesh = MeshP1::unit_square(cfg.N);
  for (int e = 0; e < static_cast<int>(mesh.triangles.size()); ++e)
    cfg.region.push_back(mesh.centroid(e).x() > 0.5 ? 1 : 0);
  const auto r = run_decay_experiment(cfg);
  EXPECT_LT(r.ratio, 1e-2);
  EXPECT_LE(r.max_energy_increase, 1e-14);
}

TEST(FitLogSlope, RecoversExponent) {
  std::vector<double> t, v;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(0.5 * i);
    v.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  EXPECT_NEAR(fit_log_slope(t, v, 2.0), -0.7, 1e-12);
}
