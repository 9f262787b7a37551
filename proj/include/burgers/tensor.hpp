#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace burgers {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Length of the Kelvin vector of a symmetric d x d matrix, d(d+1)/2.
constexpr int kelvin_size(int dim) { return dim * (dim + 1) / 2; }

/// Kelvin slot of the symmetric index pair (p, q), zero based.
///
/// Frozen ordering: d=3 -> (11,22,33,23,13,12), d=2 -> (11,22,12).
int kelvin_index(int dim, int p, int q);

/// Weight carried by a Kelvin slot: 1 on the diagonal, sqrt(2) on shear.
double kelvin_weight(int dim, int slot);

void require_dim(int dim);

/// Symmetric second-order tensor (strain or stress) stored as a Kelvin vector.
///
/// The shear components carry a factor sqrt(2), so the Euclidean inner
/// product of two Kelvin vectors is the Frobenius product of the matrices.
class SymTensor2 {
 public:
  explicit SymTensor2(int dim = 3);
  SymTensor2(int dim, Vector kelvin);

  static SymTensor2 from_matrix(const Matrix& m);
  static SymTensor2 identity(int dim);

  Matrix to_matrix() const;

  int dim() const { return dim_; }
  const Vector& kelvin() const { return kelvin_; }
  Vector& kelvin() { return kelvin_; }

  double dot(const SymTensor2& other) const;
  double norm() const { return kelvin_.norm(); }
  double trace() const;

  SymTensor2 operator+(const SymTensor2& o) const;
  SymTensor2 operator-(const SymTensor2& o) const;
  SymTensor2 operator*(double s) const;

 private:
  int dim_;
  Vector kelvin_;
};

/// Fourth-order tensor with minor symmetries, stored as a d~ x d~ Kelvin
/// matrix. A fully symmetric tensor has a symmetric Kelvin matrix; products of
/// non-commuting tensors are representable but are not major symmetric.
class ElasticTensor4 {
 public:
  explicit ElasticTensor4(int dim = 3);
  ElasticTensor4(int dim, Matrix kelvin);

  static ElasticTensor4 identity(int dim);
  static ElasticTensor4 zero(int dim);

  /// Engineering Voigt stiffness (shear entries not weighted) to Kelvin.
  static ElasticTensor4 from_voigt(int dim, const Matrix& voigt);

  /// Dense c_{pqrs} in row-major (p,q,r,s) order, length d^4. The input must
  /// have the minor symmetries; they are averaged in.
  static ElasticTensor4 from_dense(int dim, std::span<const double> dense);
  std::vector<double> to_dense() const;

  int dim() const { return dim_; }
  const Matrix& kelvin() const { return kelvin_; }

  /// ||M - M^T||_F / ||M||_F, zero for a fully symmetric tensor.
  double symmetry_residual() const;
  bool is_major_symmetric(double tol = 1e-14) const { return symmetry_residual() <= tol; }

  double min_eigenvalue() const;
  double max_eigenvalue() const;

  ElasticTensor4 operator+(const ElasticTensor4& o) const;
  ElasticTensor4 operator-(const ElasticTensor4& o) const;
  ElasticTensor4 operator*(double s) const;

 private:
  int dim_;
  Matrix kelvin_;
};

/// c_{pqrs} = lambda d_pq d_rs + mu (d_pr d_qs + d_ps d_qr); rejects parameters
/// that are not strongly convex (mu > 0, d lambda + 2 mu > 0).
ElasticTensor4 isotropic(int dim, double lambda, double mu);

SymTensor2 apply(const ElasticTensor4& c, const SymTensor2& xi);
ElasticTensor4 compose(const ElasticTensor4& c, const ElasticTensor4& d);

/// ||CD - DC||_F / (||C||_F ||D||_F).
double commute_residual(const ElasticTensor4& c, const ElasticTensor4& d);

struct SpectralDecomp {
  int dim = 3;
  std::vector<double> eigenvalues;  // descending, clustered
  std::vector<Matrix> projections;  // orthogonal projectors, one per eigenvalue
  std::vector<int> multiplicities;

  Matrix reconstruct() const;
};

constexpr double kDefaultClusterTol = 1e-9;

SpectralDecomp spectral(const ElasticTensor4& c, double tol = kDefaultClusterTol);
ElasticTensor4 sqrt_spd(const ElasticTensor4& c);
ElasticTensor4 inverse_spd(const ElasticTensor4& c);

struct ValidationReport {
  bool passed = false;
  double eta_min = 0.0;
  double c_min = 0.0;
  std::vector<double> symmetry_residuals;
  std::vector<double> min_eigenvalues;
  /// One entry per failed item, e.g. "viscosity-positivity: eta[0] = 0".
  std::vector<std::string> failures;
};

/// Admissibility of a spring/dashpot family: positive viscosities, full
/// symmetry and strong convexity of every elasticity tensor. Report style,
/// never throws. An infinite viscosity (locked dashpot) is admissible.
ValidationReport validate_family(std::span<const ElasticTensor4> c, std::span<const double> eta);

}  // namespace burgers
