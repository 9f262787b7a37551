#pragma once

#include "burgers/block_operator.hpp"

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace burgers {

/// Common spectral projections of a commuting family C_0..C_n together with
/// the eigenvalue of every C_l on every projection.
struct JointSpectral {
  int dim = 3;
  std::vector<Matrix> projections;  // P_k, k = 0..K-1
  std::vector<int> ranks;           // rank of P_k
  Matrix channel_eigs;              // (n+1) x K, entry (l, k) = lambda_k^(l)
  /// max_l |C_l - sum_k lambda_k^(l) P_k|_F / |C_l|_F
  double reconstruction_error = 0.0;

  int channels() const { return static_cast<int>(projections.size()); }
};

constexpr double kDefaultCommuteTol = 1e-10;

/// Simultaneous diagonalization: the eigenspaces of C_0 are split by the
/// restrictions of C_1, C_2, ... in turn. Throws "non-commuting" naming the
/// worst pair when some commute_residual exceeds `commute_tol`.
JointSpectral joint_spectral(const BurgersMaterial& m, double commute_tol = kDefaultCommuteTol,
                             double cluster_tol = kDefaultClusterTol);

/// Largest pairwise commute residual, with the offending indices.
struct CommuteCheck {
  double worst = 0.0;
  int i = 0;
  int j = 0;
};
CommuteCheck commutativity(const BurgersMaterial& m);

/// D(s;k) = a0 + b0 s + sum_i a_i s / (s + A_i), with a_i = 1/eta_i,
/// b0 = 1 / lambda_k^(0) and A_i = a_i lambda_k^(i). The channel relaxation
/// function is the inverse Laplace transform of 1/D.
struct ChannelRational {
  int k = 0;
  double a0 = 0.0;
  double b0 = 0.0;
  std::vector<double> a;   // a_1..a_n
  std::vector<double> A;   // A_1..A_n

  std::complex<double> eval(std::complex<double> s) const;
  double eval(double s) const;
  /// dD/ds at a real point.
  double derivative(double s) const;
};

ChannelRational channel_rational(const JointSpectral& js, const std::vector<double>& eta, int k);

constexpr double kDefaultMergeTol = 1e-8;

/// Poles and partial-fraction coefficients of 1/D(s;k):
///
///   1/D(s) = sum_l sum_{q=1}^{j_l} g[l][q-1] (s - r_l)^{-q}.
struct PronyChannel {
  int k = 0;
  double lambda0 = 0.0;                    // lambda_k^(0), the channel value at t = 0
  std::vector<double> group_A;             // merged A values
  std::vector<double> group_a;             // merged weights (sums of a_i)
  std::vector<double> roots;               // distinct poles, ascending, all < 0
  std::vector<int> multiplicities;         // j_l
  std::vector<std::vector<double>> coeffs; // g[l][q-1]
  double max_imag_ratio = 0.0;             // largest |Im r| / |Re r| from the companion matrix
  double reconstruction_error = 0.0;       // max relative error of the expansion on [0.1, 10]
  bool least_squares = false;              // coefficients came from the sample fit

  /// Channel relaxation function g_k(t), zero for t < 0.
  double eval(double t) const;
};

/// Merge near-coincident A_i, form Q(s) = prod(s + A) D(s), and take its
/// roots from the companion matrix. Throws "numerical-conditioning" when a
/// root is not real, not negative, or collides with some -A.
PronyChannel channel_poles(const ChannelRational& d, double merge_tol = kDefaultMergeTol);

/// Fill in coeffs. Confluent residues are used unless the pole configuration
/// is worse conditioned than 1e12, in which case the coefficients are fitted
/// to samples of 1/D. Throws "numerical-conditioning" if the expansion does
/// not reproduce 1/D to 1e-9 relative at 20 points of [0.1, 10].
void partial_fractions(PronyChannel& ch, const ChannelRational& d);

/// Residues of lead * prod(s - z) / prod(s - p_l)^{j_l} (proper rational
/// function, distinct p_l). Result indexed [l][q-1].
std::vector<std::vector<double>> confluent_residues(double lead, const std::vector<double>& zeros,
                                                    const std::vector<double>& poles,
                                                    const std::vector<int>& multiplicities);

struct PronyForm {
  JointSpectral joint;
  std::vector<PronyChannel> channels;
  /// Relative mismatch between the reconstructed G(0) and C_0.
  double initial_value_error = 0.0;
};

PronyForm build_prony(const BurgersMaterial& m, double commute_tol = kDefaultCommuteTol,
                      double merge_tol = kDefaultMergeTol);

/// sum_k g_k(t) P_k, exact zero for t < 0.
ElasticTensor4 eval_G_prony(const PronyForm& pf, double t);

/// Plain-text table, columns: channel root multiplicity_index coefficient,
/// followed by the projection matrices in Kelvin order.
void write_prony_table(std::ostream& os, const PronyForm& pf);

/// Laplace transform of the relaxation tensor, s^{-1} M(s)^{-1} with the
/// creep compliance transform
///   M(s) = [C0^{-1} + a0/s] + sum_i a_i (s I + a_i C_i)^{-1},
/// the bracket omitted when `with_maxwell` is false.
Matrix relaxation_transform(const BurgersMaterial& m, double s, bool with_maxwell = true);

struct NoMaxwellReport {
  /// (sum_i C_i^{-1})^{-1}: the t -> infinity limit of G without the Maxwell element.
  Matrix equilibrium_modulus;
  double equilibrium_min_eigenvalue = 0.0;
  std::vector<double> probe_s;               // decreasing s values
  std::vector<double> probe_without_maxwell; // |s Ghat(s)|_F without the Maxwell element
  std::vector<double> probe_with_maxwell;    // same with it restored
  /// Richardson estimates of lim_{s->0} |s Ghat(s)|_F.
  double limit_without_maxwell = 0.0;
  double limit_with_maxwell = 0.0;
  bool decays_without_maxwell = false;
  bool decays_with_maxwell = false;
  std::string verdict;
};

/// Drop the Maxwell element of m and show that the relaxation tensor tends
/// to a nonzero constant, while the full model relaxes to zero.
NoMaxwellReport no_maxwell_counterexample(const BurgersMaterial& m);

}  // namespace burgers
