#include "burgers/relaxation.hpp"

#include "burgers/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace burgers {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Spectral norm of a symmetric matrix.
double sym_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

RelaxationEvaluator::RelaxationEvaluator(const BurgersMaterial& m)
    : dim_(m.dim()), n_(m.n()), material_hash_(m.hash()) {
  bounds_ = spectral_bounds(m);
  const auto op = build_A(m);
  dbar_ = op.dbar.flat();
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.a.flat());
  require(es.info() == Eigen::Success, "numerical", "eigendecomposition of A failed");
  q_ = es.eigenvectors();
  lambda_ = es.eigenvalues();
  const int k = kelvin_size(dim_);
  w_ = dbar_.topLeftCorner(k, k) * q_.topRows(k);
}

RelaxationEvaluator::RelaxationEvaluator(int dim, int n, Matrix dbar, Matrix eigenvectors,
                                         Vector eigenvalues, SpectralBounds bounds,
                                         std::uint64_t material_hash)
    : dim_(dim),
      n_(n),
      dbar_(std::move(dbar)),
      q_(std::move(eigenvectors)),
      lambda_(std::move(eigenvalues)),
      bounds_(bounds),
      material_hash_(material_hash) {
  require_dim(dim);
  const int k = kelvin_size(dim_);
  const int total = (n_ + 1) * k;
  require(n_ >= 1 && dbar_.rows() == total && dbar_.cols() == total && q_.rows() == total &&
              q_.cols() == total && lambda_.size() == total,
          "dimension-mismatch", "stored eigensystem has inconsistent shape");
  require(lambda_.maxCoeff() < 0.0, "invalid-evaluator", "stored eigenvalues must be negative");
  w_ = dbar_.topLeftCorner(k, k) * q_.topRows(k);
}

Matrix RelaxationEvaluator::sandwich(const Vector& v) const {
  return symmetrized(w_ * v.asDiagonal() * w_.transpose());
}

ElasticTensor4 RelaxationEvaluator::G_deriv(double t, int k) const {
  require(k >= 0, "invalid-argument", "derivative order must be non-negative");
  if (t < 0.0) return ElasticTensor4::zero(dim_);
  Vector v(lambda_.size());
  for (Eigen::Index i = 0; i < lambda_.size(); ++i) {
    v[i] = std::pow(lambda_[i], k) * std::exp(t * lambda_[i]);
  }
  return ElasticTensor4(dim_, sandwich(v));
}

Matrix RelaxationEvaluator::block_exponential(double t) const {
  if (t < 0.0) return Matrix::Zero(q_.rows(), q_.cols());
  const Vector e = (t * lambda_).array().exp().matrix();
  return symmetrized(q_ * e.asDiagonal() * q_.transpose());
}

ElasticTensor4 eval_G_deriv(const RelaxationEvaluator& ev, double t, int k) {
  require(t >= 0.0, "invalid-argument", "derivatives are evaluated for t >= 0");
  return ev.G_deriv(t, k);
}

EstimateReport verify_estimates(const RelaxationEvaluator& ev, std::span<const double> t_grid,
                                int j_max, OddBoundForm form, double tol) {
  const auto& b = ev.bounds();
  const int k_size = kelvin_size(ev.dim());
  const Matrix id = Matrix::Identity(k_size, k_size);
  EstimateReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  for (double t : t_grid) {
    require(t >= 0.0, "invalid-argument", "estimate grid must lie in [0, inf)");
    for (int k = 0; k <= 2 * j_max + 1; ++k) {
      const Matrix g = ev.G_deriv(t, k).kelvin();
      const double fast = std::exp(-b.alpha1 * t);
      const double slow = std::exp(-b.alpha2 * t);
      double lower = 0.0;
      double upper = 0.0;
      if (k % 2 == 0) {
        lower = b.beta1 * b.beta1 * std::pow(b.alpha2, k) * fast;
        upper = b.beta2 * b.beta2 * std::pow(b.alpha1, k) * slow;
      } else if (form == OddBoundForm::Proven) {
        lower = -b.beta2 * b.beta2 * std::pow(b.alpha1, k) * slow;
        upper = -b.beta1 * b.beta1 * std::pow(b.alpha2, k) * fast;
      } else {
        lower = -b.beta2 * b.beta2 * std::pow(b.alpha1, k) * fast;
        upper = -b.beta1 * b.beta1 * std::pow(b.alpha2, k) * slow;
      }
      const double scale =
          std::max({sym_norm(g), std::abs(lower), std::abs(upper), std::numeric_limits<double>::min()});
      const double lo_margin = min_eig(g - lower * id) / scale;
      const double up_margin = min_eig(upper * id - g) / scale;
      rep.checks += 2;
      rep.worst_margin = std::min({rep.worst_margin, lo_margin, up_margin});
      if (lo_margin < -tol) rep.violations.push_back({t, k, k / 2, "lower", lo_margin});
      if (up_margin < -tol) rep.violations.push_back({t, k, k / 2, "upper", up_margin});
    }
  }
  return rep;
}

KernelFn kernel_of(const RelaxationEvaluator& ev) {
  return [&ev](double t, int k) { return ev.G_deriv(t, k).kelvin(); };
}

DecayCertificate certify_kernel(const KernelFn& kernel, const SpectralBounds& b,
                                std::span<const double> t_grid, double tol) {
  require(t_grid.size() >= 2, "invalid-argument", "certificate grid needs at least two points");
  require(t_grid.front() == 0.0, "invalid-argument", "certificate grid must start at t = 0");
  require(std::is_sorted(t_grid.begin(), t_grid.end()) &&
              std::adjacent_find(t_grid.begin(), t_grid.end()) == t_grid.end(),
          "invalid-argument", "certificate grid must be strictly increasing");
  const double needed = 10.0 / b.alpha2;
  if (t_grid.back() < needed * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "certificate grid ends at " << t_grid.back() << " but must reach 10/alpha2 = " << needed;
    throw Error("invalid-argument", os.str());
  }

  DecayCertificate cert;
  cert.kappa1 = b.alpha1;
  cert.kappa2 = b.alpha2;
  cert.kappa3 = b.alpha1 * b.alpha1;
  cert.kappa4 = b.beta2 * b.beta2 * b.alpha1 * (1.0 + b.alpha1);
  cert.kappa4_tilde = b.alpha2;
  cert.kappa5 = b.alpha1;
  cert.kappa6 = b.alpha2;
  cert.prefactor_lower = b.beta1 * b.beta1;
  cert.prefactor_upper = b.beta2 * b.beta2;
  cert.pure_exponential = cert.prefactor_lower >= 1.0 && cert.prefactor_upper <= 1.0;
  cert.t_min = t_grid.front();
  cert.t_max = t_grid.back();
  cert.samples = t_grid.size();
  cert.worst_margin = std::numeric_limits<double>::infinity();
  cert.kappa5_fit = 0.0;
  cert.kappa6_fit = std::numeric_limits<double>::infinity();

  const Matrix k0 = kernel(0.0, 0);
  const Eigen::Index ks = k0.rows();
  const Matrix id = Matrix::Identity(ks, ks);
  const double k_norm = sym_norm(k0);

  auto check = [&](const char* item, double t, double margin, const char* what) {
    cert.worst_margin = std::min(cert.worst_margin, margin);
    if (margin < -tol) {
      std::ostringstream os;
      os << what << " (normalized margin " << margin << ")";
      throw CertificateError(item, t, os.str());
    }
  };
  auto h_of = [&](double t) -> Matrix { return -kernel(t, 1); };

  Matrix h_integral = Matrix::Zero(ks, ks);
  double prev_t = 0.0;
  for (double t : t_grid) {
    const Matrix h = -kernel(t, 1);
    const Matrix hd = -kernel(t, 2);
    const Matrix hdd = -kernel(t, 3);
    const double tiny = std::numeric_limits<double>::min();
    const double nh = sym_norm(h);
    const double nhd = sym_norm(hd);
    const double nhdd = sym_norm(hdd);
    const double s1 = std::max({cert.kappa1 * nh, nhd, tiny});
    const double s3 = std::max({cert.kappa3 * nh, nhdd, tiny});
    const double scale = std::max(nh, tiny);

    check("derivative-bounds", t, min_eig(hd + cert.kappa1 * h) / s1, "-kappa1 H <= H'");
    check("derivative-bounds", t, min_eig(-cert.kappa2 * h - hd) / s1, "H' <= -kappa2 H");
    check("derivative-bounds", t, min_eig(cert.kappa3 * h - hdd) / s3, "H'' <= kappa3 H");
    const double envelope = cert.kappa4 * std::exp(-cert.kappa4_tilde * t);
    check("derivative-bounds", t, (envelope - nh - nhd) / std::max({envelope, nh + nhd, tiny}),
          "|H| + |H'| <= kappa4 exp(-kappa4~ t)");

    const double sym_scale = std::max(h.norm(), std::numeric_limits<double>::min());
    check("major-symmetry", t, -(h - h.transpose()).norm() / sym_scale, "H is not symmetric");
    if (t == 0.0) {
      check("major-symmetry", t, -(k0 - k0.transpose()).norm() / std::max(k0.norm(), 1e-300),
            "K is not symmetric");
      check("strong-convexity", t, min_eig(k0) > 0.0 ? 0.0 : -1.0, "K is not positive definite");
    }
    // The smallest eigenvalue of H can sit below roundoff of |H| at large t
    // (it scales like exp(-alpha1 t)); it is held to the same tolerance.
    check("strong-convexity", t, min_eig(h) / scale, "H is not positive definite");

    if (t > prev_t) {
      h_integral += integrate_adaptive(h_of, prev_t, t, 1e-13, 1e-15 * k_norm);
    }
    prev_t = t;
    const Matrix relaxed = k0 - h_integral;
    const double lo = cert.prefactor_lower * std::exp(-cert.kappa5 * t);
    const double hi = cert.prefactor_upper * std::exp(-cert.kappa6 * t);
    const double v_scale = std::max({sym_norm(relaxed), hi, std::numeric_limits<double>::min()});
    check("relaxed-modulus-bounds", t, min_eig(relaxed - lo * id) / v_scale,
          "beta1^2 exp(-kappa5 T) <= K - int H");
    check("relaxed-modulus-bounds", t, min_eig(hi * id - relaxed) / v_scale,
          "K - int H <= beta2^2 exp(-kappa6 T)");

    const Matrix direct = kernel(t, 0);
    cert.ftc_residual = std::max(cert.ftc_residual, (relaxed - direct).norm() / k0.norm());
    if (t > 0.0) {
      const double lmin = min_eig(relaxed);
      const double lmax = max_eig(relaxed);
      if (lmin > 0.0) {
        cert.kappa5_fit = std::max(cert.kappa5_fit, -std::log(lmin / cert.prefactor_lower) / t);
      }
      if (lmax > 0.0) {
        cert.kappa6_fit = std::min(cert.kappa6_fit, -std::log(lmax / cert.prefactor_upper) / t);
      }
    }
  }
  return cert;
}

DecayCertificate decay_certificate(const RelaxationEvaluator& ev, std::span<const double> t_grid,
                                   double tol) {
  return certify_kernel(kernel_of(ev), ev.bounds(), t_grid, tol);
}

std::vector<double> make_grid(double start, double stop, int count, bool log_spaced) {
  require(count >= 1, "invalid-argument", "grid needs at least one point");
  std::vector<double> g(static_cast<std::size_t>(count));
  if (count == 1) {
    g[0] = start;
    return g;
  }
  if (log_spaced) {
    require(start > 0.0 && stop > 0.0, "invalid-argument", "log grid needs positive bounds");
    const double ls = std::log(start);
    const double le = std::log(stop);
    for (int i = 0; i < count; ++i) g[i] = std::exp(ls + (le - ls) * i / (count - 1));
    g.front() = start;
    g.back() = stop;
  } else {
    for (int i = 0; i < count; ++i) g[i] = start + (stop - start) * i / (count - 1);
    g.back() = stop;
  }
  return g;
}

}  // namespace burgers
