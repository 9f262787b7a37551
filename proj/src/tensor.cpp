#include "burgers/tensor.hpp"

#include "burgers/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace burgers {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

struct SlotPair {
  int p;
  int q;
};

SlotPair slot_pair(int dim, int slot) {
  static constexpr SlotPair k3[] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  static constexpr SlotPair k2[] = {{0, 0}, {1, 1}, {0, 1}};
  return dim == 3 ? k3[slot] : k2[slot];
}

Eigen::SelfAdjointEigenSolver<Matrix> symmetric_eigen(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  require(es.info() == Eigen::Success, "numerical", "symmetric eigensolver did not converge");
  return es;
}

void require_same_dim(int a, int b) {
  if (a != b) {
    throw Error("dimension-mismatch",
                "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

Matrix spd_function(const ElasticTensor4& c, double (*f)(double)) {
  require(c.is_major_symmetric(1e-12), "not-symmetric", "tensor is not major symmetric");
  auto es = symmetric_eigen(c.kelvin());
  const Vector& lam = es.eigenvalues();
  if (!(lam.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << "tensor is not positive definite (min eigenvalue " << lam.minCoeff() << ")";
    throw Error("not-spd", os.str());
  }
  const Matrix& v = es.eigenvectors();
  Vector fl = lam.unaryExpr(f);
  Matrix out = v * fl.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

void require_dim(int dim) {
  if (dim != 2 && dim != 3) {
    throw Error("dimension", "spatial dimension must be 2 or 3, got " + std::to_string(dim));
  }
}

int kelvin_index(int dim, int p, int q) {
  if (p > q) std::swap(p, q);
  if (p == q) return p;
  if (dim == 2) return 2;
  // (1,2)->3, (0,2)->4, (0,1)->5
  return 6 - p - q;
}

double kelvin_weight(int dim, int slot) { return slot < dim ? 1.0 : kSqrt2; }

// SymTensor2 ----------------------------------------------------------------

SymTensor2::SymTensor2(int dim) : dim_(dim), kelvin_(Vector::Zero(kelvin_size(dim))) {
  require_dim(dim);
}

SymTensor2::SymTensor2(int dim, Vector kelvin) : dim_(dim), kelvin_(std::move(kelvin)) {
  require_dim(dim);
  require(kelvin_.size() == kelvin_size(dim), "dimension-mismatch",
          "Kelvin vector has wrong length for dimension " + std::to_string(dim));
}

SymTensor2 SymTensor2::from_matrix(const Matrix& m) {
  require(m.rows() == m.cols(), "dimension-mismatch", "matrix is not square");
  const int dim = static_cast<int>(m.rows());
  require_dim(dim);
  Vector k(kelvin_size(dim));
  for (int s = 0; s < kelvin_size(dim); ++s) {
    auto [p, q] = slot_pair(dim, s);
    k[s] = p == q ? m(p, q) : kSqrt2 * 0.5 * (m(p, q) + m(q, p));
  }
  return SymTensor2(dim, std::move(k));
}

SymTensor2 SymTensor2::identity(int dim) {
  SymTensor2 t(dim);
  for (int i = 0; i < dim; ++i) t.kelvin_[i] = 1.0;
  return t;
}

Matrix SymTensor2::to_matrix() const {
  Matrix m(dim_, dim_);
  for (int s = 0; s < kelvin_.size(); ++s) {
    auto [p, q] = slot_pair(dim_, s);
    const double v = p == q ? kelvin_[s] : kelvin_[s] / kSqrt2;
    m(p, q) = v;
    m(q, p) = v;
  }
  return m;
}

double SymTensor2::dot(const SymTensor2& other) const {
  require_same_dim(dim_, other.dim_);
  return kelvin_.dot(other.kelvin_);
}

double SymTensor2::trace() const { return kelvin_.head(dim_).sum(); }

SymTensor2 SymTensor2::operator+(const SymTensor2& o) const {
  require_same_dim(dim_, o.dim_);
  return SymTensor2(dim_, kelvin_ + o.kelvin_);
}

SymTensor2 SymTensor2::operator-(const SymTensor2& o) const {
  require_same_dim(dim_, o.dim_);
  return SymTensor2(dim_, kelvin_ - o.kelvin_);
}

SymTensor2 SymTensor2::operator*(double s) const { return SymTensor2(dim_, kelvin_ * s); }

// ElasticTensor4 ------------------------------------------------------------

ElasticTensor4::ElasticTensor4(int dim)
    : dim_(dim), kelvin_(Matrix::Zero(kelvin_size(dim), kelvin_size(dim))) {
  require_dim(dim);
}

ElasticTensor4::ElasticTensor4(int dim, Matrix kelvin) : dim_(dim), kelvin_(std::move(kelvin)) {
  require_dim(dim);
  require(kelvin_.rows() == kelvin_size(dim) && kelvin_.cols() == kelvin_size(dim),
          "dimension-mismatch", "Kelvin matrix has wrong shape for dimension " + std::to_string(dim));
}

ElasticTensor4 ElasticTensor4::identity(int dim) {
  return ElasticTensor4(dim, Matrix::Identity(kelvin_size(dim), kelvin_size(dim)));
}

ElasticTensor4 ElasticTensor4::zero(int dim) { return ElasticTensor4(dim); }

ElasticTensor4 ElasticTensor4::from_voigt(int dim, const Matrix& voigt) {
  const int n = kelvin_size(dim);
  require(voigt.rows() == n && voigt.cols() == n, "dimension-mismatch",
          "Voigt matrix has wrong shape");
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = kelvin_weight(dim, i);
  return ElasticTensor4(dim, w.asDiagonal() * voigt * w.asDiagonal());
}

ElasticTensor4 ElasticTensor4::from_dense(int dim, std::span<const double> dense) {
  require_dim(dim);
  const int d = dim;
  require(static_cast<int>(dense.size()) == d * d * d * d, "dimension-mismatch",
          "dense tensor must have d^4 entries");
  const int n = kelvin_size(dim);
  Matrix m = Matrix::Zero(n, n);
  auto at = [&](int p, int q, int r, int s) { return dense[((p * d + q) * d + r) * d + s]; };
  for (int a = 0; a < n; ++a) {
    auto [p, q] = slot_pair(dim, a);
    for (int b = 0; b < n; ++b) {
      auto [r, s] = slot_pair(dim, b);
      const double avg =
          0.25 * (at(p, q, r, s) + at(q, p, r, s) + at(p, q, s, r) + at(q, p, s, r));
      m(a, b) = kelvin_weight(dim, a) * kelvin_weight(dim, b) * avg;
    }
  }
  return ElasticTensor4(dim, std::move(m));
}

std::vector<double> ElasticTensor4::to_dense() const {
  const int d = dim_;
  std::vector<double> out(static_cast<std::size_t>(d * d * d * d));
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s) {
          const int a = kelvin_index(d, p, q);
          const int b = kelvin_index(d, r, s);
          out[((p * d + q) * d + r) * d + s] =
              kelvin_(a, b) / (kelvin_weight(d, a) * kelvin_weight(d, b));
        }
  return out;
}

double ElasticTensor4::symmetry_residual() const {
  const double nrm = kelvin_.norm();
  if (nrm == 0.0) return 0.0;
  return (kelvin_ - kelvin_.transpose()).norm() / nrm;
}

double ElasticTensor4::min_eigenvalue() const {
  return symmetric_eigen(kelvin_).eigenvalues().minCoeff();
}

double ElasticTensor4::max_eigenvalue() const {
  return symmetric_eigen(kelvin_).eigenvalues().maxCoeff();
}

ElasticTensor4 ElasticTensor4::operator+(const ElasticTensor4& o) const {
  require_same_dim(dim_, o.dim_);
  return ElasticTensor4(dim_, kelvin_ + o.kelvin_);
}

ElasticTensor4 ElasticTensor4::operator-(const ElasticTensor4& o) const {
  require_same_dim(dim_, o.dim_);
  return ElasticTensor4(dim_, kelvin_ - o.kelvin_);
}

ElasticTensor4 ElasticTensor4::operator*(double s) const {
  return ElasticTensor4(dim_, kelvin_ * s);
}

// free functions -------------------------------------------------------------

ElasticTensor4 isotropic(int dim, double lambda, double mu) {
  require_dim(dim);
  if (!(mu > 0.0) || !(dim * lambda + 2.0 * mu > 0.0)) {
    std::ostringstream os;
    os << "isotropic parameters violate strong convexity (lambda=" << lambda << ", mu=" << mu
       << ")";
    throw Error("invalid-material", os.str());
  }
  const int n = kelvin_size(dim);
  Matrix m = Matrix::Zero(n, n);
  m.topLeftCorner(dim, dim).setConstant(lambda);
  for (int i = 0; i < n; ++i) m(i, i) += 2.0 * mu;
  return ElasticTensor4(dim, std::move(m));
}

SymTensor2 apply(const ElasticTensor4& c, const SymTensor2& xi) {
  require_same_dim(c.dim(), xi.dim());
  return SymTensor2(c.dim(), c.kelvin() * xi.kelvin());
}

ElasticTensor4 compose(const ElasticTensor4& c, const ElasticTensor4& d) {
  require_same_dim(c.dim(), d.dim());
  return ElasticTensor4(c.dim(), c.kelvin() * d.kelvin());
}

double commute_residual(const ElasticTensor4& c, const ElasticTensor4& d) {
  require_same_dim(c.dim(), d.dim());
  const double denom = c.kelvin().norm() * d.kelvin().norm();
  if (denom == 0.0) return 0.0;
  const Matrix comm = c.kelvin() * d.kelvin() - d.kelvin() * c.kelvin();
  return comm.norm() / denom;
}

Matrix SpectralDecomp::reconstruct() const {
  const int n = kelvin_size(dim);
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) m += eigenvalues[k] * projections[k];
  return m;
}

SpectralDecomp spectral(const ElasticTensor4& c, double tol) {
  require(c.is_major_symmetric(1e-12), "not-symmetric", "tensor is not major symmetric");
  auto es = symmetric_eigen(c.kelvin());
  const Vector& lam = es.eigenvalues();  // ascending
  const Matrix& v = es.eigenvectors();
  if (!(lam.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << "tensor is not positive definite (min eigenvalue " << lam.minCoeff() << ")";
    throw Error("not-spd", os.str());
  }
  const int n = static_cast<int>(lam.size());
  const double scale = lam.cwiseAbs().maxCoeff();

  SpectralDecomp out;
  out.dim = c.dim();
  int i = n - 1;
  while (i >= 0) {
    int j = i;
    double sum = lam[i];
    while (j - 1 >= 0 && lam[i] - lam[j - 1] <= tol * scale) {
      --j;
      sum += lam[j];
    }
    Matrix p = Matrix::Zero(n, n);
    for (int k = j; k <= i; ++k) p += v.col(k) * v.col(k).transpose();
    out.eigenvalues.push_back(sum / (i - j + 1));
    out.projections.push_back(0.5 * (p + p.transpose()));
    out.multiplicities.push_back(i - j + 1);
    i = j - 1;
  }
  return out;
}

ElasticTensor4 sqrt_spd(const ElasticTensor4& c) {
  return ElasticTensor4(c.dim(), spd_function(c, [](double x) { return std::sqrt(x); }));
}

ElasticTensor4 inverse_spd(const ElasticTensor4& c) {
  return ElasticTensor4(c.dim(), spd_function(c, [](double x) { return 1.0 / x; }));
}

ValidationReport validate_family(std::span<const ElasticTensor4> c, std::span<const double> eta) {
  ValidationReport rep;
  if (c.empty() || c.size() != eta.size()) {
    rep.failures.push_back("shape: need equally many (>= 1) tensors and viscosities, got " +
                           std::to_string(c.size()) + " and " + std::to_string(eta.size()));
    return rep;
  }
  rep.eta_min = *std::min_element(eta.begin(), eta.end());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!(eta[i] > 0.0)) {
      std::ostringstream os;
      os << "viscosity-positivity: eta[" << i << "] = " << eta[i] << " is not positive";
      rep.failures.push_back(os.str());
    }
  }
  rep.c_min = std::numeric_limits<double>::infinity();
  const int dim = c.front().dim();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].dim() != dim) {
      rep.failures.push_back("shape: C[" + std::to_string(i) + "] has a different dimension");
      rep.symmetry_residuals.push_back(0.0);
      rep.min_eigenvalues.push_back(0.0);
      continue;
    }
    const double sym = c[i].symmetry_residual();
    rep.symmetry_residuals.push_back(sym);
    if (!(sym <= 1e-12)) {
      std::ostringstream os;
      os << "full-symmetry: C[" << i << "] major symmetry residual " << sym;
      rep.failures.push_back(os.str());
    }
    const double lmin = c[i].min_eigenvalue();
    const double scale = c[i].kelvin().norm();
    rep.min_eigenvalues.push_back(lmin);
    rep.c_min = std::min(rep.c_min, lmin);
    // eigenvalues within roundoff of zero count as singular
    if (!(lmin > 1e-12 * scale)) {
      std::ostringstream os;
      os << "strong-convexity: C[" << i << "] smallest eigenvalue " << lmin;
      rep.failures.push_back(os.str());
    }
  }
  rep.passed = rep.failures.empty();
  return rep;
}

}  // namespace burgers
