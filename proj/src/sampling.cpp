#include "burgers/sampling.hpp"

#include <cmath>

namespace burgers {

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

std::vector<double> random_viscosities(int n, Rng& rng) {
  std::vector<double> eta;
  for (int i = 0; i <= n; ++i) eta.push_back(log_uniform(rng, 0.1, 10.0));
  return eta;
}

}  // namespace

Vector random_vector(int size, Rng& rng) {
  std::normal_distribution<double> g;
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = g(rng);
  return v;
}

Matrix random_orthogonal(int size, Rng& rng) {
  std::normal_distribution<double> g;
  Matrix a(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) a(i, j) = g(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < size; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Matrix random_spd(int size, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  const Matrix q = random_orthogonal(size, rng);
  Vector e(size);
  for (int i = 0; i < size; ++i) e(i) = u(rng);
  Matrix c = q * e.asDiagonal() * q.transpose();
  return 0.5 * (c + c.transpose());
}

BurgersMaterial random_material(int dim, int n, Rng& rng) {
  const int kd = kelvin_size(dim);
  std::vector<ElasticTensor4> c;
  for (int i = 0; i <= n; ++i) c.emplace_back(dim, random_spd(kd, rng));
  return BurgersMaterial(dim, 1.0, std::move(c), random_viscosities(n, rng));
}

BurgersMaterial random_commuting_material(int dim, int n, CommutingKind kind, Rng& rng) {
  const int kd = kelvin_size(dim);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  std::vector<ElasticTensor4> c;
  if (kind == CommutingKind::Isotropic) {
    for (int i = 0; i <= n; ++i) {
      const double mu = 0.5 * u(rng);
      const double bulk = u(rng);  // d lambda + 2 mu
      c.push_back(isotropic(dim, (bulk - 2.0 * mu) / dim, mu));
    }
  } else {
    const Matrix q = random_orthogonal(kd, rng);
    for (int i = 0; i <= n; ++i) {
      Vector e(kd);
      for (int k = 0; k < kd; ++k) e(k) = u(rng);
      Matrix m = q * e.asDiagonal() * q.transpose();
      c.emplace_back(dim, 0.5 * (m + m.transpose()));
    }
  }
  return BurgersMaterial(dim, 1.0, std::move(c), random_viscosities(n, rng));
}

}  // namespace burgers
