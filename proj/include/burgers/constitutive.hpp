#pragma once

#include "burgers/relaxation.hpp"

#include <vector>

namespace burgers {

/// Piecewise-linear strain path: e(t) interpolates `values` at `times`, so the
/// strain rate is constant on every segment. times[0] = 0 and e(0) = 0.
struct StrainHistory {
  int dim = 3;
  std::vector<double> times;
  std::vector<SymTensor2> values;

  std::size_t size() const { return times.size(); }
  /// Throws "invalid-history" unless the grid starts at 0, is strictly
  /// increasing, carries e(0) = 0 and matches the dimension.
  void validate() const;
  /// Strain rate on segment [t_j, t_{j+1}].
  Vector rate(std::size_t j) const;

  static StrainHistory ramp(int dim, const SymTensor2& rate, double t_end, int segments);
  /// e(t) = e0 min(t / eps, 1), sampled on the union of {0, eps} and a
  /// uniform grid of `segments` steps on [eps, t_end].
  static StrainHistory smoothed_step(const SymTensor2& e0, double eps, double t_end,
                                     int segments);
};

/// Transformed internal state U = Dbar (psi, phi_1, ..., phi_n) and its
/// update over one step with constant strain rate:
///
///   U(h) = exp(hA) U(0) + A^{-1}(exp(hA) - I) Dbar F,  F = (edot, 0, ..., 0).
Vector advance_state(const RelaxationEvaluator& ev, const Vector& u, double h, const Vector& edot);

/// sigma = C0 psi = D0 U_0.
Vector stress_from_state(const RelaxationEvaluator& ev, const Vector& u);

struct InternalTrace {
  std::vector<SymTensor2> stress;
  std::vector<SymTensor2> psi;                // Maxwell spring strain
  std::vector<std::vector<SymTensor2>> phi;   // phi[j][i-1], Kelvin-Voigt strains
  std::vector<SymTensor2> phi0;               // Maxwell dashpot strain e - psi - sum phi_i
};

/// Exact exponential integration of the internal-variable system, starting
/// from zero internal strains.
InternalTrace integrate_internal(const BurgersMaterial& m, const RelaxationEvaluator& ev,
                                 const StrainHistory& history);
InternalTrace integrate_internal(const BurgersMaterial& m, const StrainHistory& history);

/// sigma(t_j) = sum over segments of int G(t_j - s) ds edot_seg, each
/// segment integral in closed form through the eigensystem.
std::vector<SymTensor2> convolve(const RelaxationEvaluator& ev, const StrainHistory& history);

/// Max relative residual of
///   edot = C0^{-1} sigma_dot + a0 sigma
///          + sum_i [a_i sigma - a_i^2 C_i int_0^t exp(-(t-s) a_i C_i) sigma(s) ds]
/// at the grid nodes, with sigma_dot by second-order differences and sigma
/// interpolated linearly inside the hereditary integrals.
double verify_integro_differential(const BurgersMaterial& m, const std::vector<SymTensor2>& stress,
                                   const StrainHistory& history);

/// int_0^{t_j} exp(-(t_j - s) a_i C_i) a_i sigma(s) ds on the nodes, sigma
/// linear between nodes. i in 1..n.
std::vector<SymTensor2> kelvin_voigt_strain(const BurgersMaterial& m, int i,
                                            const std::vector<SymTensor2>& stress,
                                            const std::vector<double>& times);

/// max relative L2 mismatch between the convolution and the internal-variable
/// stress traces.
double cross_check_ode_equivalence(const BurgersMaterial& m, const StrainHistory& history);

}  // namespace burgers
