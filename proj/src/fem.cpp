#include "burgers/fem.hpp"

#include "burgers/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace burgers {

MeshP1 MeshP1::unit_square(int n_nodes) {
  require(n_nodes >= 2, "invalid-mesh", "mesh needs at least 2 nodes per side");
  MeshP1 m;
  m.N = n_nodes;
  const double dx = 1.0 / (n_nodes - 1);
  for (int j = 0; j < n_nodes; ++j)
    for (int i = 0; i < n_nodes; ++i) m.nodes.emplace_back(i * dx, j * dx);
  auto id = [n_nodes](int i, int j) { return i + n_nodes * j; };
  for (int j = 0; j + 1 < n_nodes; ++j)
    for (int i = 0; i + 1 < n_nodes; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  for (const auto& t : m.triangles) {
    const Eigen::Vector2d p = m.nodes[t[1]] - m.nodes[t[0]];
    const Eigen::Vector2d q = m.nodes[t[2]] - m.nodes[t[0]];
    const double area = 0.5 * (p.x() * q.y() - p.y() * q.x());
    require(area > 0.0, "invalid-mesh", "degenerate or inverted triangle");
    m.areas.push_back(area);
  }
  m.dirichlet.assign(m.nodes.size(), 0);
  for (int k = 0; k + 1 < n_nodes; ++k) {
    m.boundary.push_back({id(0, k), id(0, k + 1), BoundaryTag::Dirichlet});
    m.boundary.push_back({id(n_nodes - 1, k), id(n_nodes - 1, k + 1), BoundaryTag::Neumann});
    m.boundary.push_back({id(k, 0), id(k + 1, 0), BoundaryTag::Neumann});
    m.boundary.push_back({id(k, n_nodes - 1), id(k + 1, n_nodes - 1), BoundaryTag::Neumann});
  }
  for (int k = 0; k < n_nodes; ++k) m.dirichlet[id(0, k)] = 1;
  return m;
}

Eigen::Vector2d MeshP1::centroid(int e) const {
  const auto& t = triangles[e];
  return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
}

Eigen::Matrix<double, 3, 6> strain_displacement(const MeshP1& mesh, int e) {
  const auto& t = mesh.triangles[e];
  const double area2 = 2.0 * mesh.areas[e];
  Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
  const double r2 = std::numbers::sqrt2;
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector2d& pj = mesh.nodes[t[(a + 1) % 3]];
    const Eigen::Vector2d& pk = mesh.nodes[t[(a + 2) % 3]];
    const double dndx = (pj.y() - pk.y()) / area2;
    const double dndy = (pk.x() - pj.x()) / area2;
    b(0, 2 * a) = dndx;
    b(1, 2 * a + 1) = dndy;
    b(2, 2 * a) = dndy / r2;
    b(2, 2 * a + 1) = dndx / r2;
  }
  return b;
}

FemOperators assemble(const MeshP1& mesh, const std::vector<Matrix>& c0, double rho, bool lumped) {
  require(c0.size() == mesh.triangles.size(), "dimension-mismatch",
          "one C0 per element is required");
  const int ndof = 2 * static_cast<int>(mesh.nodes.size());
  FemOperators ops;
  std::vector<Eigen::Triplet<double>> mt;
  std::vector<Eigen::Triplet<double>> kt;
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
    const auto& t = mesh.triangles[e];
    const double area = mesh.areas[e];
    std::array<int, 6> dofs{};
    for (int a = 0; a < 3; ++a) {
      dofs[2 * a] = 2 * t[a];
      dofs[2 * a + 1] = 2 * t[a] + 1;
    }
    const auto b = strain_displacement(mesh, static_cast<int>(e));
    const Eigen::Matrix<double, 6, 6> ke = area * b.transpose() * c0[e] * b;
    for (int p = 0; p < 6; ++p)
      for (int q = 0; q < 6; ++q) kt.emplace_back(dofs[p], dofs[q], ke(p, q));
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) {
        double w;
        if (lumped) {
          w = a == c ? rho * area / 3.0 : 0.0;
        } else {
          w = rho * area / 12.0 * (a == c ? 2.0 : 1.0);
        }
        if (w == 0.0) continue;
        for (int comp = 0; comp < 2; ++comp) mt.emplace_back(2 * t[a] + comp, 2 * t[c] + comp, w);
      }
    ops.b.push_back(b);
    ops.dofs.push_back(dofs);
  }
  ops.mass.resize(ndof, ndof);
  ops.mass.setFromTriplets(mt.begin(), mt.end());
  ops.stiffness.resize(ndof, ndof);
  ops.stiffness.setFromTriplets(kt.begin(), kt.end());
  return ops;
}

double fit_log_slope(const std::vector<double>& times, const std::vector<double>& values,
                     double t_from) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] < t_from || !(values[j] > 0.0)) continue;
    const double x = times[j];
    const double y = std::log(values[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  require(count >= 2, "domain", "not enough positive samples for a log-slope fit");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

namespace {

struct RegionData {
  Matrix c0;
  Matrix d0;
  Matrix half_step;  // exp((h/2) A), or identity when frozen
  double alpha1 = 0.0;
};

}  // namespace

DecayResult run_decay_experiment(const FemConfig& cfg, const SnapshotFn& snapshot) {
  require(!cfg.materials.empty(), "invalid-config", "at least one material is required");
  require(cfg.t_end > 0.0, "invalid-config", "final time must be positive");
  const MeshP1 mesh = MeshP1::unit_square(cfg.N);
  const int ne = static_cast<int>(mesh.triangles.size());
  const int n = cfg.materials[0].n();
  const double rho = cfg.materials[0].rho();
  for (const auto& m : cfg.materials) {
    require(m.dim() == 2, "invalid-config", "the finite element solver is two-dimensional");
    require(m.n() == n && m.rho() == rho, "invalid-config",
            "all regions must share the number of Kelvin-Voigt elements and the density");
  }
  std::vector<int> region = cfg.region;
  if (region.empty()) region.assign(ne, 0);
  require(static_cast<int>(region.size()) == ne, "invalid-config",
          "region assignment does not match the mesh");
  for (int r : region)
    require(r >= 0 && r < static_cast<int>(cfg.materials.size()), "invalid-config",
            "region index out of range");

  const int kd = 3;
  const int blk = (n + 1) * kd;

  // Per-region generator eigensystems; a locked Maxwell dashpot leaves A
  // only semidefinite, which is fine for pure relaxation steps.
  std::vector<RegionData> reg;
  std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> eig;
  double alpha1 = 0.0;
  double wave = 0.0;
  for (const auto& m : cfg.materials) {
    const auto op = build_A(m);
    eig.emplace_back(op.a.flat());
    require(eig.back().info() == Eigen::Success, "numerical", "eigensolver failed");
    RegionData rd;
    rd.c0 = m.c()[0].kelvin();
    rd.d0 = op.dbar.flat().topLeftCorner(kd, kd);
    rd.alpha1 = -eig.back().eigenvalues().minCoeff();
    alpha1 = std::max(alpha1, rd.alpha1);
    wave = std::max(wave, std::sqrt(m.c()[0].max_eigenvalue() / rho));
    reg.push_back(std::move(rd));
  }

  double h = cfg.h;
  if (h <= 0.0) h = std::min(0.5 / alpha1, mesh.spacing() / (2.0 * wave));
  const int steps = static_cast<int>(std::ceil(cfg.t_end / h - 1e-9));
  h = cfg.t_end / steps;
  for (std::size_t r = 0; r < reg.size(); ++r) {
    if (cfg.freeze_internal) {
      reg[r].half_step = Matrix::Identity(blk, blk);
    } else {
      const Matrix& q = eig[r].eigenvectors();
      const Vector e = (0.5 * h * eig[r].eigenvalues()).array().exp().matrix();
      reg[r].half_step = q * e.asDiagonal() * q.transpose();
    }
  }

  std::vector<Matrix> c0(ne);
  for (int e = 0; e < ne; ++e) c0[e] = reg[region[e]].c0;
  const FemOperators ops = assemble(mesh, c0, rho, cfg.lumped_mass);

  // Free degrees of freedom.
  const int ndof = 2 * static_cast<int>(mesh.nodes.size());
  std::vector<int> free_index(ndof, -1);
  int nfree = 0;
  for (int i = 0; i < static_cast<int>(mesh.nodes.size()); ++i)
    if (!mesh.dirichlet[i]) {
      free_index[2 * i] = nfree++;
      free_index[2 * i + 1] = nfree++;
    }
  auto restrict = [&](const SparseMatrix& a) {
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < a.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
        const int r = free_index[it.row()];
        const int c = free_index[it.col()];
        if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
      }
    SparseMatrix out(nfree, nfree);
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  const SparseMatrix mf = restrict(ops.mass);
  const SparseMatrix kf = restrict(ops.stiffness);
  const SparseMatrix sys = mf + (0.25 * h * h) * kf;
  Eigen::SimplicialLDLT<SparseMatrix> solver(sys);
  require(solver.info() == Eigen::Success, "numerical", "midpoint system factorization failed");

  // Initial data: smooth fields vanishing on x = 0; internal strains zero.
  Vector u = Vector::Zero(ndof);
  Vector v = Vector::Zero(ndof);
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double x = mesh.nodes[i].x();
    const double y = mesh.nodes[i].y();
    const double s = std::sin(0.5 * pi * x);
    u(2 * i) = cfg.amplitude * s;
    u(2 * i + 1) = 0.5 * cfg.amplitude * s;
    v(2 * i) = 0.5 * cfg.amplitude * s * std::cos(pi * y);
    v(2 * i + 1) = cfg.amplitude * s;
  }
  auto element_strain = [&](const Vector& w, int e) {
    Eigen::Matrix<double, 6, 1> ue;
    for (int p = 0; p < 6; ++p) ue(p) = w(ops.dofs[e][p]);
    return Eigen::Vector3d(ops.b[e] * ue);
  };
  std::vector<Vector> state(ne, Vector::Zero(blk));
  for (int e = 0; e < ne; ++e) state[e].head(kd) = reg[region[e]].d0 * element_strain(u, e);

  auto to_free = [&](const Vector& full) {
    Vector f(nfree);
    for (int i = 0; i < ndof; ++i)
      if (free_index[i] >= 0) f(free_index[i]) = full(i);
    return f;
  };
  auto to_full = [&](const Vector& f) {
    Vector full = Vector::Zero(ndof);
    for (int i = 0; i < ndof; ++i)
      if (free_index[i] >= 0) full(i) = f(free_index[i]);
    return full;
  };

  DecayResult res;
  res.h = h;
  res.steps = steps;
  auto record = [&](double t) {
    const double kin = 0.5 * v.dot(ops.mass * v);
    double ela = 0.0;
    double sto = 0.0;
    for (int e = 0; e < ne; ++e) {
      ela += 0.5 * mesh.areas[e] * state[e].head(kd).squaredNorm();
      sto += 0.5 * mesh.areas[e] * state[e].tail(blk - kd).squaredNorm();
    }
    res.trace.times.push_back(t);
    res.trace.kinetic.push_back(kin);
    res.trace.elastic.push_back(ela);
    res.trace.stored.push_back(sto);
    res.trace.total.push_back(kin + ela + sto);
  };
  record(0.0);

  Vector uf = to_free(u);
  Vector vf = to_free(v);
  for (int step = 1; step <= steps; ++step) {
    for (int e = 0; e < ne; ++e) state[e] = reg[region[e]].half_step * state[e];

    // Internal force sum_e area B^T sigma_e with sigma = D0 U_0.
    Vector fint = Vector::Zero(ndof);
    for (int e = 0; e < ne; ++e) {
      const Eigen::Vector3d sigma = reg[region[e]].d0 * state[e].head(kd);
      const Eigen::Matrix<double, 6, 1> fe = mesh.areas[e] * ops.b[e].transpose() * sigma;
      for (int p = 0; p < 6; ++p) fint(ops.dofs[e][p]) += fe(p);
    }
    const Vector ff = to_free(fint);
    const Vector rhs = mf * uf + h * (mf * vf) + (0.25 * h * h) * (kf * uf) - (0.5 * h * h) * ff;
    const Vector u1 = solver.solve(rhs);
    require(solver.info() == Eigen::Success, "numerical", "midpoint solve failed");
    res.max_solve_residual =
        std::max(res.max_solve_residual, (sys * u1 - rhs).norm() / std::max(rhs.norm(), 1e-300));
    const Vector v1 = 2.0 / h * (u1 - uf) - vf;

    const Vector du = to_full(u1 - uf);
    for (int e = 0; e < ne; ++e)
      state[e].head(kd) += reg[region[e]].d0 * element_strain(du, e);
    uf = u1;
    vf = v1;
    u = to_full(uf);
    v = to_full(vf);

    for (int e = 0; e < ne; ++e) state[e] = reg[region[e]].half_step * state[e];

    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
      if (mesh.dirichlet[i])
        res.dirichlet_max = std::max({res.dirichlet_max, std::abs(u(2 * i)), std::abs(u(2 * i + 1))});
    record(step * h);
    if (snapshot) snapshot(step * h, u);
  }

  const auto& tot = res.trace.total;
  const double e0 = tot.front();
  res.ratio = e0 > 0.0 ? tot.back() / e0 : 0.0;
  res.max_energy_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < tot.size(); ++j)
    res.max_energy_increase = std::max(res.max_energy_increase, (tot[j + 1] - tot[j]) / e0);
  res.slope = e0 > 0.0 ? fit_log_slope(res.trace.times, tot, 0.5 * cfg.t_end) : 0.0;
  return res;
}

}  // namespace burgers
