#pragma once

#include "burgers/block_operator.hpp"

#include <random>

namespace burgers {

using Rng = std::mt19937_64;

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign fixed).
Matrix random_orthogonal(int size, Rng& rng);

/// Q diag(e) Q^T with eigenvalues uniform in [lo, hi].
Matrix random_spd(int size, Rng& rng, double lo = 0.5, double hi = 5.0);

/// Unconstrained random material: independent SPD tensors, log-uniform
/// viscosities in [0.1, 10], rho = 1.
BurgersMaterial random_material(int dim, int n, Rng& rng);

enum class CommutingKind { Isotropic, SharedEigenbasis };

/// Commuting family: random isotropic tensors, or anisotropic tensors
/// diagonal in one random orthonormal Kelvin basis.
BurgersMaterial random_commuting_material(int dim, int n, CommutingKind kind, Rng& rng);

Vector random_vector(int size, Rng& rng);

}  // namespace burgers
