#include "burgers/quadrature.hpp"

#include <array>
#include <cmath>

namespace burgers {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  Matrix kronrod;
  double error;
};

Estimate gk15(const std::function<Matrix(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Matrix fc = f(c);
  Matrix k = kWgk[7] * fc;
  Matrix g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    Matrix pair = f(c - dx) + f(c + dx);
    k += kWgk[i] * pair;
    if (i % 2 == 1) g += kWg[i / 2] * pair;
  }
  k *= h;
  g *= h;
  return {k, (k - g).norm()};
}

Matrix recurse(const std::function<Matrix(double)>& f, double a, double b, double rel_tol,
               double abs_tol, int depth, const Estimate& est) {
  const double target = std::max(abs_tol, rel_tol * est.kronrod.norm());
  if (est.error <= target || depth <= 0) return est.kronrod;
  const double mid = 0.5 * (a + b);
  const Estimate left = gk15(f, a, mid);
  const Estimate right = gk15(f, mid, b);
  // Halve the absolute budget per side; keep the relative one.
  return recurse(f, a, mid, rel_tol, 0.5 * abs_tol, depth - 1, left) +
         recurse(f, mid, b, rel_tol, 0.5 * abs_tol, depth - 1, right);
}

}  // namespace

Matrix integrate_adaptive(const std::function<Matrix(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int max_depth) {
  const Estimate whole = gk15(f, a, b);
  return recurse(f, a, b, rel_tol, abs_tol, max_depth, whole);
}

}  // namespace burgers
