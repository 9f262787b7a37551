#pragma once

#include "burgers/tensor.hpp"

#include <cstdint>
#include <vector>

namespace burgers {

/// One Maxwell element (C0, eta0) in series with n Kelvin-Voigt elements
/// (C_i, eta_i). Immutable once constructed; construction validates.
///
/// eta0 may be +inf, which locks the Maxwell dashpot (used to emulate a model
/// without Maxwell flow). Everything downstream of spectral_bounds requires a
/// finite eta0.
class BurgersMaterial {
 public:
  BurgersMaterial(int dim, double rho, std::vector<ElasticTensor4> c, std::vector<double> eta);

  int dim() const { return dim_; }
  int n() const { return static_cast<int>(c_.size()) - 1; }
  int kelvin() const { return kelvin_size(dim_); }
  double rho() const { return rho_; }
  const std::vector<ElasticTensor4>& c() const { return c_; }
  const std::vector<double>& eta() const { return eta_; }

  /// 1/eta_i, exactly zero for a locked dashpot.
  double inv_eta(int i) const;
  /// sum_{i=0}^n 1/eta_i
  double inv_eta_sum() const;

  /// FNV-1a over dim, rho, viscosities and Kelvin entries; identifies cached builds.
  std::uint64_t hash() const;

 private:
  int dim_;
  double rho_;
  std::vector<ElasticTensor4> c_;
  std::vector<double> eta_;
};

/// Stacked strains (psi, phi_1, ..., phi_n) as one flat vector of length
/// (n+1) d~. The inner product is the sum of blockwise Frobenius products.
class BlockVector {
 public:
  BlockVector(int dim, int blocks);
  BlockVector(int dim, Vector flat);

  int dim() const { return dim_; }
  int blocks() const { return static_cast<int>(flat_.size()) / kelvin_size(dim_); }
  const Vector& flat() const { return flat_; }
  Vector& flat() { return flat_; }

  SymTensor2 block(int i) const;
  void set_block(int i, const SymTensor2& v);
  double dot(const BlockVector& o) const { return flat_.dot(o.flat_); }

 private:
  int dim_;
  Vector flat_;
};

/// (n+1) x (n+1) array of d~ x d~ Kelvin blocks held as one flat matrix.
class BlockMatrix {
 public:
  BlockMatrix(int dim, int blocks);
  BlockMatrix(int dim, Matrix flat);

  int dim() const { return dim_; }
  int blocks() const { return static_cast<int>(flat_.rows()) / kelvin_size(dim_); }
  const Matrix& flat() const { return flat_; }

  ElasticTensor4 block(int i, int j) const;
  void set_block(int i, int j, const Matrix& kelvin);

  double symmetry_residual() const;
  /// Block-symmetric with symmetric blocks, to the given relative tolerance.
  bool in_symmetric_algebra(double tol = 1e-13) const { return symmetry_residual() <= tol; }
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  BlockMatrix operator*(const BlockMatrix& o) const;
  BlockVector operator*(const BlockVector& v) const;

 private:
  int dim_;
  Matrix flat_;
};

BlockMatrix build_Lb(const BurgersMaterial& m);
BlockMatrix build_Cbar(const BurgersMaterial& m);
BlockMatrix build_Dbar(const BurgersMaterial& m);
BlockMatrix build_Lbar(const BurgersMaterial& m);

struct SymmetrizedOperator {
  BlockMatrix a;     // Dbar Lbar Dbar, symmetric negative (semi)definite
  BlockMatrix dbar;  // blockwise square root of Cbar
};

/// Symmetrized generator of the internal-variable system. The raw generator
/// factors as L_b = Lbar Cbar, hence Cbar exp(t L_b) = Dbar exp(t A) Dbar.
SymmetrizedOperator build_A(const BurgersMaterial& m);

/// Relative mismatch between <-(Cbar L_b) Y, Y> and the dissipation sum
/// eta0^{-1}|C0 psi|^2 + sum_i eta_i^{-1}|C0 psi - C_i phi_i|^2.
double quadratic_identity_residual(const BurgersMaterial& m, const BlockVector& y);

struct SpectralBounds {
  double alpha1 = 0.0;  // largest eigenvalue of -A
  double alpha2 = 0.0;  // smallest eigenvalue of -A
  double beta1 = 0.0;   // smallest eigenvalue of Dbar
  double beta2 = 0.0;   // largest eigenvalue of Dbar
};

/// Throws "not-negative-definite" when -A is not positive definite, which
/// happens for a locked Maxwell dashpot.
SpectralBounds spectral_bounds(const BurgersMaterial& m);

}  // namespace burgers
