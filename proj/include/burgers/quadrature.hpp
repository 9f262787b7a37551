#pragma once

#include "burgers/tensor.hpp"

#include <functional>

namespace burgers {

/// Adaptive Gauss-Kronrod (7/15) integration of a matrix-valued function.
/// Intervals are bisected until the Gauss/Kronrod difference, in Frobenius
/// norm, is below max(abs_tol, rel_tol * |integral|) or max_depth is reached.
Matrix integrate_adaptive(const std::function<Matrix(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 0.0, int max_depth = 40);

}  // namespace burgers
