#include "burgers/block_operator.hpp"

#include "burgers/error.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace burgers {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Vector sym_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "numerical", "symmetric eigensolver did not converge");
  return es.eigenvalues();
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

// BurgersMaterial -------------------------------------------------------------

BurgersMaterial::BurgersMaterial(int dim, double rho, std::vector<ElasticTensor4> c,
                                 std::vector<double> eta)
    : dim_(dim), rho_(rho), c_(std::move(c)), eta_(std::move(eta)) {
  require_dim(dim);
  std::ostringstream problems;
  if (c_.size() < 2) problems << "need a Maxwell element and at least one Kelvin-Voigt element; ";
  if (!(rho_ > 0.0) || !std::isfinite(rho_)) problems << "density must be positive; ";
  for (const auto& ci : c_) {
    if (ci.dim() != dim) {
      problems << "elasticity tensor dimension differs from model dimension; ";
      break;
    }
  }
  const std::string head = problems.str();
  if (!head.empty()) throw Error("invalid-material", head.substr(0, head.size() - 2));

  ValidationReport rep = validate_family(c_, eta_);
  for (std::size_t i = 1; i < eta_.size(); ++i) {
    if (std::isinf(eta_[i])) rep.failures.push_back("viscosity-positivity: eta[" +
                                                     std::to_string(i) + "] must be finite");
  }
  if (!rep.failures.empty()) {
    std::string msg;
    for (const auto& f : rep.failures) msg += (msg.empty() ? "" : "; ") + f;
    throw Error("invalid-material", msg);
  }
  for (auto& ci : c_) ci = ElasticTensor4(dim, symmetrized(ci.kelvin()));
}

double BurgersMaterial::inv_eta(int i) const {
  return std::isinf(eta_.at(i)) ? 0.0 : 1.0 / eta_[i];
}

double BurgersMaterial::inv_eta_sum() const {
  double s = 0.0;
  for (int i = 0; i <= n(); ++i) s += inv_eta(i);
  return s;
}

std::uint64_t BurgersMaterial::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  h = fnv1a(h, &dim_, sizeof dim_);
  h = fnv1a(h, &rho_, sizeof rho_);
  for (double e : eta_) h = fnv1a(h, &e, sizeof e);
  for (const auto& ci : c_) {
    const Matrix& k = ci.kelvin();
    for (Eigen::Index j = 0; j < k.cols(); ++j)
      for (Eigen::Index i = 0; i < k.rows(); ++i) {
        const double v = k(i, j);
        h = fnv1a(h, &v, sizeof v);
      }
  }
  return h;
}

// BlockVector ---------------------------------------------------------------------

BlockVector::BlockVector(int dim, int blocks)
    : dim_(dim), flat_(Vector::Zero(blocks * kelvin_size(dim))) {
  require_dim(dim);
}

BlockVector::BlockVector(int dim, Vector flat) : dim_(dim), flat_(std::move(flat)) {
  require_dim(dim);
  require(flat_.size() % kelvin_size(dim) == 0, "dimension-mismatch",
          "block vector length is not a multiple of the Kelvin size");
}

SymTensor2 BlockVector::block(int i) const {
  const int k = kelvin_size(dim_);
  return SymTensor2(dim_, flat_.segment(i * k, k));
}

void BlockVector::set_block(int i, const SymTensor2& v) {
  const int k = kelvin_size(dim_);
  require(v.dim() == dim_, "dimension-mismatch", "block dimension mismatch");
  flat_.segment(i * k, k) = v.kelvin();
}

// BlockMatrix ---------------------------------------------------------------------

BlockMatrix::BlockMatrix(int dim, int blocks)
    : dim_(dim),
      flat_(Matrix::Zero(blocks * kelvin_size(dim), blocks * kelvin_size(dim))) {
  require_dim(dim);
}

BlockMatrix::BlockMatrix(int dim, Matrix flat) : dim_(dim), flat_(std::move(flat)) {
  require_dim(dim);
  require(flat_.rows() == flat_.cols() && flat_.rows() % kelvin_size(dim) == 0,
          "dimension-mismatch", "block matrix shape is not a multiple of the Kelvin size");
}

ElasticTensor4 BlockMatrix::block(int i, int j) const {
  const int k = kelvin_size(dim_);
  return ElasticTensor4(dim_, flat_.block(i * k, j * k, k, k));
}

void BlockMatrix::set_block(int i, int j, const Matrix& kelvin) {
  const int k = kelvin_size(dim_);
  flat_.block(i * k, j * k, k, k) = kelvin;
}

double BlockMatrix::symmetry_residual() const {
  const double nrm = flat_.norm();
  if (nrm == 0.0) return 0.0;
  return (flat_ - flat_.transpose()).norm() / nrm;
}

double BlockMatrix::min_eigenvalue() const { return sym_eigenvalues(flat_).minCoeff(); }
double BlockMatrix::max_eigenvalue() const { return sym_eigenvalues(flat_).maxCoeff(); }

BlockMatrix BlockMatrix::operator*(const BlockMatrix& o) const {
  require(o.dim_ == dim_ && o.flat_.rows() == flat_.rows(), "dimension-mismatch",
          "block matrix product shape mismatch");
  return BlockMatrix(dim_, flat_ * o.flat_);
}

BlockVector BlockMatrix::operator*(const BlockVector& v) const {
  require(v.dim() == dim_ && v.flat().size() == flat_.cols(), "dimension-mismatch",
          "block matrix-vector shape mismatch");
  return BlockVector(dim_, flat_ * v.flat());
}

// operators ---------------------------------------------------------------------

BlockMatrix build_Lb(const BurgersMaterial& m) {
  const int n = m.n();
  BlockMatrix lb(m.dim(), n + 1);
  const Matrix& c0 = m.c()[0].kelvin();
  lb.set_block(0, 0, -m.inv_eta_sum() * c0);
  for (int i = 1; i <= n; ++i) {
    const Matrix& ci = m.c()[i].kelvin();
    const double a = m.inv_eta(i);
    lb.set_block(0, i, a * ci);
    lb.set_block(i, 0, a * c0);
    lb.set_block(i, i, -a * ci);
  }
  return lb;
}

BlockMatrix build_Cbar(const BurgersMaterial& m) {
  BlockMatrix cbar(m.dim(), m.n() + 1);
  for (int i = 0; i <= m.n(); ++i) cbar.set_block(i, i, m.c()[i].kelvin());
  return cbar;
}

BlockMatrix build_Dbar(const BurgersMaterial& m) {
  BlockMatrix dbar(m.dim(), m.n() + 1);
  for (int i = 0; i <= m.n(); ++i) dbar.set_block(i, i, sqrt_spd(m.c()[i]).kelvin());
  return dbar;
}

BlockMatrix build_Lbar(const BurgersMaterial& m) {
  const int n = m.n();
  const int k = m.kelvin();
  const Matrix id = Matrix::Identity(k, k);
  BlockMatrix lbar(m.dim(), n + 1);
  lbar.set_block(0, 0, -m.inv_eta_sum() * id);
  for (int i = 1; i <= n; ++i) {
    const double a = m.inv_eta(i);
    lbar.set_block(i, i, -a * id);
    lbar.set_block(0, i, a * id);
    lbar.set_block(i, 0, a * id);
  }
  return lbar;
}

SymmetrizedOperator build_A(const BurgersMaterial& m) {
  BlockMatrix dbar = build_Dbar(m);
  const BlockMatrix lbar = build_Lbar(m);
  const Matrix a = dbar.flat() * lbar.flat() * dbar.flat();
  return {BlockMatrix(m.dim(), symmetrized(a)), std::move(dbar)};
}

double quadratic_identity_residual(const BurgersMaterial& m, const BlockVector& y) {
  require(y.dim() == m.dim() && y.blocks() == m.n() + 1, "dimension-mismatch",
          "block vector does not match the material");
  const BlockMatrix clb = build_Cbar(m) * build_Lb(m);
  const double lhs = -(clb * y).dot(y);

  const Vector c0psi = m.c()[0].kelvin() * y.block(0).kelvin();
  double rhs = m.inv_eta(0) * c0psi.squaredNorm();
  for (int i = 1; i <= m.n(); ++i) {
    const Vector diff = c0psi - m.c()[i].kelvin() * y.block(i).kelvin();
    rhs += m.inv_eta(i) * diff.squaredNorm();
  }
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

SpectralBounds spectral_bounds(const BurgersMaterial& m) {
  const auto op = build_A(m);
  const Vector neg = sym_eigenvalues(-op.a.flat());
  const Vector d = sym_eigenvalues(op.dbar.flat());
  SpectralBounds b{neg.maxCoeff(), neg.minCoeff(), d.minCoeff(), d.maxCoeff()};
  if (!(b.alpha2 > 1e-13 * b.alpha1)) {
    std::ostringstream os;
    os << "-A is not positive definite (smallest eigenvalue " << b.alpha2
       << "); the Maxwell dashpot must be finite";
    throw Error("not-negative-definite", os.str());
  }
  return b;
}

}  // namespace burgers
