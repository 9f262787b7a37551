#pragma once

#include "burgers/constitutive.hpp"
#include "burgers/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace burgers::testing {

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double s = b.norm();
  return s > 0.0 ? (a - b).norm() / s : (a - b).norm();
}

inline double rel_err(const Vector& a, const Vector& b) {
  const double s = b.norm();
  return s > 0.0 ? (a - b).norm() / s : (a - b).norm();
}

inline double min_sym_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline BurgersMaterial scalar_material(int dim, std::vector<double> c, std::vector<double> eta) {
  std::vector<ElasticTensor4> cs;
  for (double v : c) cs.push_back(ElasticTensor4::identity(dim) * v);
  return BurgersMaterial(dim, 1.0, std::move(cs), std::move(eta));
}

inline BurgersMaterial unit_scalar(int dim = 2) { return scalar_material(dim, {1, 1}, {1, 1}); }

inline SymTensor2 random_sym(int dim, Rng& rng) { return SymTensor2(dim, random_vector(kelvin_size(dim), rng)); }

/// Random piecewise-linear history with `segments` uneven steps on [0, t_end].
inline StrainHistory random_history(int dim, int segments, double t_end, Rng& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w;
  double total = 0.0;
  for (int j = 0; j < segments; ++j) total += w.emplace_back(u(rng));
  StrainHistory h;
  h.dim = dim;
  h.times.push_back(0.0);
  h.values.emplace_back(dim);
  for (int j = 0; j < segments; ++j) {
    h.times.push_back(h.times.back() + t_end * w[j] / total);
    h.values.push_back(h.values.back() + random_sym(dim, rng) * 0.3);
  }
  h.times.back() = t_end;
  return h;
}

}  // namespace burgers::testing
