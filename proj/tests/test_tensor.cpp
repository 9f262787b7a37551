#include "burgers/error.hpp"
#include "burgers/tensor.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

using namespace burgers;
using namespace burgers::testing;

TEST(Kelvin, SlotOrdering) {
  EXPECT_EQ(kelvin_index(3, 0, 0), 0);
  EXPECT_EQ(kelvin_index(3, 1, 1), 1);
  EXPECT_EQ(kelvin_index(3, 2, 2), 2);
  EXPECT_EQ(kelvin_index(3, 1, 2), 3);
  EXPECT_EQ(kelvin_index(3, 2, 0), 4);
  EXPECT_EQ(kelvin_index(3, 0, 1), 5);
  EXPECT_EQ(kelvin_index(2, 0, 1), 2);
  EXPECT_EQ(kelvin_index(2, 1, 0), 2);
  EXPECT_DOUBLE_EQ(kelvin_weight(3, 3), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(kelvin_weight(2, 1), 1.0);
  EXPECT_THROW(require_dim(4), Error);
}

TEST(SymTensor2, MatrixRoundTripAndFrobeniusProduct) {
  Rng rng(11);
  for (int dim : {2, 3}) {
    Matrix a = Matrix::Random(dim, dim);
    Matrix b = Matrix::Random(dim, dim);
    a = a + a.transpose().eval();
    b = b + b.transpose().eval();
    const SymTensor2 x = SymTensor2::from_matrix(a);
    const SymTensor2 y = SymTensor2::from_matrix(b);
    EXPECT_LT((x.to_matrix() - a).norm(), 1e-15);
    EXPECT_NEAR(x.dot(y), (a.array() * b.array()).sum(), 1e-13);
    EXPECT_NEAR(x.trace(), a.trace(), 1e-14);
    EXPECT_NEAR(SymTensor2::identity(dim).norm(), std::sqrt(double(dim)), 1e-15);
  }
}

TEST(ElasticTensor4, IsotropicSpectrum) {
  const auto s3 = spectral(isotropic(3, 1.0, 1.0));
  ASSERT_EQ(s3.eigenvalues.size(), 2u);
  EXPECT_NEAR(s3.eigenvalues[0], 5.0, 1e-14);
  EXPECT_NEAR(s3.eigenvalues[1], 2.0, 1e-14);
  EXPECT_EQ(s3.multiplicities[0], 1);
  EXPECT_EQ(s3.multiplicities[1], 5);

  const auto s2 = spectral(isotropic(2, 1.0, 1.0));
  ASSERT_EQ(s2.eigenvalues.size(), 2u);
  EXPECT_NEAR(s2.eigenvalues[0], 4.0, 1e-14);
  EXPECT_NEAR(s2.eigenvalues[1], 2.0, 1e-14);
  EXPECT_EQ(s2.multiplicities[1], 2);
}

TEST(ElasticTensor4, IsotropicRejectsNonConvexParameters) {
  EXPECT_THROW(isotropic(3, 1.0, 0.0), Error);
  EXPECT_THROW(isotropic(3, -1.0, 1.0), Error);  // 3 lambda + 2 mu < 0
  EXPECT_NO_THROW(isotropic(2, -0.5, 1.0));
}

TEST(ElasticTensor4, ApplyMatchesIndexContraction) {
  Rng rng(5);
  for (int dim : {2, 3}) {
    const ElasticTensor4 c(dim, random_spd(kelvin_size(dim), rng));
    const auto dense = c.to_dense();
    const SymTensor2 xi = random_sym(dim, rng);
    const Matrix x = xi.to_matrix();
    Matrix s = Matrix::Zero(dim, dim);
    for (int p = 0; p < dim; ++p)
      for (int q = 0; q < dim; ++q)
        for (int r = 0; r < dim; ++r)
          for (int t = 0; t < dim; ++t)
            s(p, q) += dense[((p * dim + q) * dim + r) * dim + t] * x(r, t);
    EXPECT_LT((apply(c, xi).to_matrix() - s).norm(), 1e-12 * s.norm());
    const ElasticTensor4 back = ElasticTensor4::from_dense(dim, dense);
    EXPECT_LT(rel_err(back.kelvin(), c.kelvin()), 1e-15);
  }
}

TEST(ElasticTensor4, VoigtConversion) {
  Matrix v(3, 3);
  v << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  const ElasticTensor4 c = ElasticTensor4::from_voigt(2, v);
  EXPECT_DOUBLE_EQ(c.kelvin()(0, 1), 1.0);
  EXPECT_NEAR(c.kelvin()(0, 2), 0.5 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c.kelvin()(2, 2), 4.0, 1e-15);
}

TEST(ElasticTensor4, SpectralProjectorsAndFunctions) {
  Rng rng(17);
  for (int dim : {2, 3}) {
    const ElasticTensor4 c(dim, random_spd(kelvin_size(dim), rng));
    const auto sd = spectral(c);
    EXPECT_LT(rel_err(sd.reconstruct(), c.kelvin()), 1e-13);
    Matrix sum = Matrix::Zero(c.kelvin().rows(), c.kelvin().cols());
    for (const auto& p : sd.projections) {
      EXPECT_LT((p * p - p).norm(), 1e-13);
      sum += p;
    }
    EXPECT_LT((sum - Matrix::Identity(sum.rows(), sum.cols())).norm(), 1e-13);
    EXPECT_TRUE(std::is_sorted(sd.eigenvalues.rbegin(), sd.eigenvalues.rend()));

    const ElasticTensor4 r = sqrt_spd(c);
    EXPECT_LT(rel_err(compose(r, r).kelvin(), c.kelvin()), 1e-13);
    const ElasticTensor4 inv = inverse_spd(c);
    EXPECT_LT((compose(inv, c).kelvin() - Matrix::Identity(sum.rows(), sum.cols())).norm(), 1e-12);
  }
}

TEST(ElasticTensor4, SqrtRejectsIndefinite) {
  Matrix m = Matrix::Identity(3, 3);
  m(2, 2) = -1.0;
  EXPECT_THROW(sqrt_spd(ElasticTensor4(2, m)), Error);
}

TEST(ElasticTensor4, CommuteResidual) {
  EXPECT_LT(commute_residual(isotropic(3, 2, 1), isotropic(3, 0.3, 4)), 1e-15);
  Rng rng(3);
  const ElasticTensor4 a(3, random_spd(6, rng));
  const ElasticTensor4 b(3, random_spd(6, rng));
  EXPECT_GT(commute_residual(a, b), 1e-3);
}

TEST(ValidateFamily, AcceptsAdmissibleFamily) {
  std::vector<ElasticTensor4> c{isotropic(3, 1, 1), isotropic(3, 2, 0.5)};
  std::vector<double> eta{1.0, std::numeric_limits<double>::infinity()};
  const auto r = validate_family(c, eta);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.failures.empty());
}

TEST(ValidateFamily, NamesEachFailedItem) {
  Matrix asym = Matrix::Identity(3, 3);
  asym(0, 1) = 0.5;
  Matrix indef = Matrix::Identity(3, 3);
  indef(1, 1) = -2.0;
  std::vector<ElasticTensor4> c{ElasticTensor4(2, asym), ElasticTensor4(2, indef)};
  std::vector<double> eta{1.0, -1.0};
  const auto r = validate_family(c, eta);
  EXPECT_FALSE(r.passed);
  auto has = [&](const std::string& prefix) {
    return std::any_of(r.failures.begin(), r.failures.end(),
                       [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
  };
  EXPECT_TRUE(has("viscosity-positivity"));
  EXPECT_TRUE(has("full-symmetry"));
  EXPECT_TRUE(has("strong-convexity"));
}
