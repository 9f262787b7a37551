#pragma once

#include "burgers/block_operator.hpp"
#include "burgers/error.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace burgers {

/// Relaxation tensor of an extended Burgers material built from the
/// symmetrized block generator A = Dbar Lbar Dbar.
///
/// A is eigendecomposed once (A = Q diag(lambda) Q^T). The block exponential
/// is E(t) = Q diag(exp(t lambda)) Q^T for t >= 0 and zero for t < 0, and
/// G(t) is the (1,1) block of Dbar E(t) Dbar. With W = D0 Q_0 (the first block
/// row of Dbar Q) every derivative is a diagonal sandwich:
///
///   G^(k)(t) = W diag(lambda^k exp(t lambda)) W^T.
class RelaxationEvaluator {
 public:
  explicit RelaxationEvaluator(const BurgersMaterial& m);

  /// Reassemble from a stored eigensystem (see io.hpp).
  RelaxationEvaluator(int dim, int n, Matrix dbar, Matrix eigenvectors, Vector eigenvalues,
                      SpectralBounds bounds, std::uint64_t material_hash);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::uint64_t material_hash() const { return material_hash_; }
  const SpectralBounds& bounds() const { return bounds_; }
  const Matrix& dbar() const { return dbar_; }
  const Matrix& eigenvectors() const { return q_; }
  /// Eigenvalues of A, ascending, all <= -alpha2 < 0.
  const Vector& eigenvalues() const { return lambda_; }
  /// d~ x (n+1)d~ mode weights W.
  const Matrix& mode_weights() const { return w_; }

  ElasticTensor4 G(double t) const { return G_deriv(t, 0); }
  ElasticTensor4 G_deriv(double t, int k) const;

  /// Full block fundamental solution E(t), zero for t < 0.
  Matrix block_exponential(double t) const;

  /// W diag(v) W^T, symmetrized.
  Matrix sandwich(const Vector& v) const;

 private:
  int dim_;
  int n_;
  Matrix dbar_;
  Matrix q_;
  Vector lambda_;
  Matrix w_;
  SpectralBounds bounds_;
  std::uint64_t material_hash_;
};

inline RelaxationEvaluator build_evaluator(const BurgersMaterial& m) {
  return RelaxationEvaluator(m);
}

/// Causal: exact zero tensor for t < 0.
inline ElasticTensor4 eval_G(const RelaxationEvaluator& ev, double t) { return ev.G(t); }

/// k-th time derivative, t >= 0.
ElasticTensor4 eval_G_deriv(const RelaxationEvaluator& ev, double t, int k);

/// Which placement of the exponentials to use in the odd-order derivative
/// bounds. `Proven` is what the spectral argument actually yields:
///
///   -b2^2 a1^(2j+1) e^{-a2 t} <= G^(2j+1)(t) <= -b1^2 a2^(2j+1) e^{-a1 t}.
///
/// `AsPrinted` swaps e^{-a1 t} and e^{-a2 t}; it is kept so the discrepancy can
/// be demonstrated (it fails for the scalar Burgers model at moderate t).
enum class OddBoundForm { Proven, AsPrinted };

struct EstimateViolation {
  double t = 0.0;
  int order = 0;     // derivative order k
  int j = 0;         // k = 2j or 2j+1
  std::string side;  // "lower" or "upper"
  double margin = 0.0;
};

struct EstimateReport {
  std::size_t checks = 0;
  /// Smallest normalized margin seen; >= -tol means every check passed.
  double worst_margin = 0.0;
  std::vector<EstimateViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Two-sided eigenvalue bounds for G^(k), k = 0..2 j_max + 1, at every grid
/// time. A check passes when the smallest eigenvalue of the difference is at
/// least -tol * scale.
EstimateReport verify_estimates(const RelaxationEvaluator& ev, std::span<const double> t_grid,
                                int j_max, OddBoundForm form = OddBoundForm::Proven,
                                double tol = 1e-10);

/// G^(k)(t) as a Kelvin matrix. The certificate only sees the kernel through
/// this callback, so tests can inject a faulty kernel.
using KernelFn = std::function<Matrix(double t, int k)>;

/// Constants making the kernel admissible for exponential decay of the
/// associated Boltzmann system, with H(t) = -G'(t):
///
///   -kappa1 H <= H' <= -kappa2 H,   H'' <= kappa3 H,
///   |H| + |H'| <= kappa4 exp(-kappa4_tilde t),
///   beta1^2 e^{-kappa5 T} <= K - int_0^T H <= beta2^2 e^{-kappa6 T}.
///
/// The last line carries prefactors: without them it fails near T = 0 unless
/// beta1 >= 1 >= beta2. `pure_exponential` records whether the prefactors can
/// be dropped.
struct DecayCertificate {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double kappa4_tilde = 0.0;
  double kappa5 = 0.0;
  double kappa6 = 0.0;
  double prefactor_lower = 0.0;  // beta1^2
  double prefactor_upper = 0.0;  // beta2^2
  bool pure_exponential = false;
  /// Tightest exponents observed on the grid for the prefactored bound.
  double kappa5_fit = 0.0;
  double kappa6_fit = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
  /// max over grid of |K - int_0^T H - G(T)| / |K|
  double ftc_residual = 0.0;
  /// Most negative normalized inequality margin (>= -tol on success).
  double worst_margin = 0.0;
};

class CertificateError : public Error {
 public:
  CertificateError(std::string item, double t, const std::string& detail)
      : Error("certificate-failed", item + " violated at t=" + std::to_string(t) + ": " + detail),
        item_(std::move(item)),
        t_(t) {}

  const std::string& item() const { return item_; }
  double t() const { return t_; }

 private:
  std::string item_;
  double t_;
};

/// Checks run in this order at every grid point; the first failure throws a
/// CertificateError naming the item:
///   "derivative-bounds", "major-symmetry", "strong-convexity",
///   "relaxed-modulus-bounds".
/// The grid must start at 0, be increasing, and reach 10 / alpha2.
DecayCertificate certify_kernel(const KernelFn& kernel, const SpectralBounds& bounds,
                                std::span<const double> t_grid, double tol = 1e-9);

DecayCertificate decay_certificate(const RelaxationEvaluator& ev, std::span<const double> t_grid,
                                   double tol = 1e-9);

KernelFn kernel_of(const RelaxationEvaluator& ev);

/// Uniform (or log-spaced, starting at `start` > 0) grid helper.
std::vector<double> make_grid(double start, double stop, int count, bool log_spaced = false);

}  // namespace burgers
