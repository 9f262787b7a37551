#include "burgers/constitutive.hpp"

#include "burgers/error.hpp"

#include <cmath>
#include <sstream>

namespace burgers {

// history ---------------------------------------------------------------------

void StrainHistory::validate() const {
  require_dim(dim);
  require(!times.empty() && times.size() == values.size(), "invalid-history",
          "strain history needs matching, nonempty time and value lists");
  require(times[0] == 0.0, "invalid-history", "strain history must start at t = 0");
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (!(times[j] > times[j - 1])) {
      std::ostringstream os;
      os << "times are not strictly increasing at row " << j;
      throw Error("invalid-history", os.str());
    }
  }
  for (const auto& v : values)
    require(v.dim() == dim, "invalid-history", "strain dimension differs from the model");
  require(values[0].norm() == 0.0, "invalid-history", "initial strain e(0) must vanish");
}

Vector StrainHistory::rate(std::size_t j) const {
  return (values[j + 1].kelvin() - values[j].kelvin()) / (times[j + 1] - times[j]);
}

StrainHistory StrainHistory::ramp(int dim, const SymTensor2& rate, double t_end, int segments) {
  require(segments >= 1 && t_end > 0.0, "invalid-history", "ramp needs t_end > 0 and a segment");
  StrainHistory h;
  h.dim = dim;
  for (int j = 0; j <= segments; ++j) {
    const double t = t_end * j / segments;
    h.times.push_back(t);
    h.values.push_back(rate * t);
  }
  return h;
}

StrainHistory StrainHistory::smoothed_step(const SymTensor2& e0, double eps, double t_end,
                                           int segments) {
  require(eps > 0.0 && t_end > eps && segments >= 1, "invalid-history",
          "smoothed step needs 0 < eps < t_end");
  StrainHistory h;
  h.dim = e0.dim();
  h.times.push_back(0.0);
  h.values.push_back(e0 * 0.0);
  for (int j = 0; j <= segments; ++j) {
    h.times.push_back(eps + (t_end - eps) * j / segments);
    h.values.push_back(e0);
  }
  return h;
}

// internal variables ---------------------------------------------------------------

Vector advance_state(const RelaxationEvaluator& ev, const Vector& u, double h, const Vector& edot) {
  const int kd = kelvin_size(ev.dim());
  const Matrix& q = ev.eigenvectors();
  const Vector& lam = ev.eigenvalues();
  Vector y = q.transpose() * u;
  const Vector z = q.transpose() * (ev.dbar().leftCols(kd) * edot);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double x = h * lam(i);
    y(i) = std::exp(x) * y(i) + std::expm1(x) / lam(i) * z(i);
  }
  return q * y;
}

Vector stress_from_state(const RelaxationEvaluator& ev, const Vector& u) {
  const int kd = kelvin_size(ev.dim());
  return ev.dbar().topLeftCorner(kd, kd) * u.head(kd);
}

InternalTrace integrate_internal(const BurgersMaterial& m, const RelaxationEvaluator& ev,
                                 const StrainHistory& history) {
  history.validate();
  require(history.dim == m.dim(), "dimension-mismatch", "history dimension differs from the model");
  const int kd = m.kelvin();
  const int n = m.n();
  std::vector<Matrix> dinv;
  for (int i = 0; i <= n; ++i)
    dinv.push_back(inverse_spd(ElasticTensor4(m.dim(), ev.dbar().block(i * kd, i * kd, kd, kd)))
                       .kelvin());

  InternalTrace tr;
  Vector u = Vector::Zero((n + 1) * kd);
  auto record = [&](std::size_t j) {
    tr.stress.emplace_back(m.dim(), stress_from_state(ev, u));
    SymTensor2 psi(m.dim(), dinv[0] * u.head(kd));
    std::vector<SymTensor2> phi;
    SymTensor2 phi0 = history.values[j] - psi;
    for (int i = 1; i <= n; ++i) {
      phi.emplace_back(m.dim(), dinv[i] * u.segment(i * kd, kd));
      phi0 = phi0 - phi.back();
    }
    tr.psi.push_back(std::move(psi));
    tr.phi.push_back(std::move(phi));
    tr.phi0.push_back(std::move(phi0));
  };
  record(0);
  for (std::size_t j = 0; j + 1 < history.size(); ++j) {
    u = advance_state(ev, u, history.times[j + 1] - history.times[j], history.rate(j));
    record(j + 1);
  }
  return tr;
}

InternalTrace integrate_internal(const BurgersMaterial& m, const StrainHistory& history) {
  return integrate_internal(m, RelaxationEvaluator(m), history);
}

// convolution -------------------------------------------------------------------------

std::vector<SymTensor2> convolve(const RelaxationEvaluator& ev, const StrainHistory& history) {
  history.validate();
  require(history.dim == ev.dim(), "dimension-mismatch",
          "history dimension differs from the evaluator");
  const Matrix& w = ev.mode_weights();
  const Vector& lam = ev.eigenvalues();
  const std::size_t segs = history.size() - 1;

  // Per segment: modal rate W^T edot scaled by int_0^dt exp(lambda u) du.
  std::vector<Vector> load(segs);
  for (std::size_t s = 0; s < segs; ++s) {
    const double dt = history.times[s + 1] - history.times[s];
    Vector y = w.transpose() * history.rate(s);
    for (Eigen::Index i = 0; i < lam.size(); ++i) y(i) *= std::expm1(lam(i) * dt) / lam(i);
    load[s] = std::move(y);
  }

  std::vector<SymTensor2> out;
  out.reserve(history.size());
  for (std::size_t j = 0; j < history.size(); ++j) {
    const double t = history.times[j];
    Vector acc = Vector::Zero(lam.size());
    for (std::size_t s = 0; s < j; ++s) {
      const double lag = t - history.times[s + 1];
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc(i) += std::exp(lam(i) * lag) * load[s](i);
    }
    out.emplace_back(history.dim, w * acc);
  }
  return out;
}

// integro-differential form ----------------------------------------------------------

namespace {

// Weights of sigma_j and sigma_{j+1} in int_0^h exp(-mu (h - tau)) sigma(t_j + tau) dtau
// for linear sigma.
std::pair<double, double> hereditary_weights(double mu, double h) {
  const double x = mu * h;
  double p1;
  double p2;
  if (x < 1e-3) {
    p1 = h * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
    p2 = h * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0);
  } else {
    p1 = -h * std::expm1(-x) / x;
    p2 = h * (x + std::expm1(-x)) / (x * x);
  }
  return {p1 - p2, p2};
}

// int_0^{t_j} exp(-(t_j - s) B) sigma(s) ds with B SPD and sigma linear between nodes.
std::vector<Vector> hereditary_integral(const Matrix& b, const std::vector<SymTensor2>& stress,
                                        const std::vector<double>& times) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.transpose()));
  require(es.info() == Eigen::Success, "numerical", "symmetric eigensolver did not converge");
  const Matrix& v = es.eigenvectors();
  const Vector& mu = es.eigenvalues();
  std::vector<Vector> out;
  Vector acc = Vector::Zero(mu.size());
  out.push_back(v * acc);
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const double h = times[j + 1] - times[j];
    const Vector s0 = v.transpose() * stress[j].kelvin();
    const Vector s1 = v.transpose() * stress[j + 1].kelvin();
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const auto [w0, w1] = hereditary_weights(mu(i), h);
      acc(i) = std::exp(-mu(i) * h) * acc(i) + w0 * s0(i) + w1 * s1(i);
    }
    out.push_back(v * acc);
  }
  return out;
}

// Second-order derivative of nodal data on a nonuniform grid.
std::vector<Vector> nodal_derivative(const std::vector<SymTensor2>& f,
                                     const std::vector<double>& t) {
  const std::size_t n = t.size();
  std::vector<Vector> d(n);
  if (n == 1) {
    d[0] = Vector::Zero(f[0].kelvin().size());
    return d;
  }
  if (n == 2) {
    d[0] = d[1] = (f[1].kelvin() - f[0].kelvin()) / (t[1] - t[0]);
    return d;
  }
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double h1 = t[j] - t[j - 1];
    const double h2 = t[j + 1] - t[j];
    d[j] = -h2 / (h1 * (h1 + h2)) * f[j - 1].kelvin() + (h2 - h1) / (h1 * h2) * f[j].kelvin() +
           h1 / (h2 * (h1 + h2)) * f[j + 1].kelvin();
  }
  {
    const double h1 = t[1] - t[0];
    const double h2 = t[2] - t[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0].kelvin() + (h1 + h2) / (h1 * h2) * f[1].kelvin() -
           h1 / (h2 * (h1 + h2)) * f[2].kelvin();
  }
  {
    const double h1 = t[n - 1] - t[n - 2];
    const double h2 = t[n - 2] - t[n - 3];
    d[n - 1] = (2 * h1 + h2) / (h1 * (h1 + h2)) * f[n - 1].kelvin() -
               (h1 + h2) / (h1 * h2) * f[n - 2].kelvin() + h1 / (h2 * (h1 + h2)) * f[n - 3].kelvin();
  }
  return d;
}

}  // namespace

std::vector<SymTensor2> kelvin_voigt_strain(const BurgersMaterial& m, int i,
                                            const std::vector<SymTensor2>& stress,
                                            const std::vector<double>& times) {
  require(i >= 1 && i <= m.n(), "dimension-mismatch", "Kelvin-Voigt index out of range");
  require(stress.size() == times.size(), "dimension-mismatch", "stress and time lists differ");
  const double a = m.inv_eta(i);
  const auto integral = hereditary_integral(a * m.c()[i].kelvin(), stress, times);
  std::vector<SymTensor2> out;
  for (const auto& v : integral) out.emplace_back(m.dim(), a * v);
  return out;
}

double verify_integro_differential(const BurgersMaterial& m, const std::vector<SymTensor2>& stress,
                                   const StrainHistory& history) {
  history.validate();
  require(stress.size() == history.size(), "dimension-mismatch",
          "stress trace and strain history differ in length");
  const std::size_t nt = history.size();
  if (nt < 2) return 0.0;
  const Matrix c0inv = inverse_spd(m.c()[0]).kelvin();
  const auto sdot = nodal_derivative(stress, history.times);

  std::vector<std::vector<Vector>> memory;
  for (int i = 1; i <= m.n(); ++i)
    memory.push_back(hereditary_integral(m.inv_eta(i) * m.c()[i].kelvin(), stress, history.times));

  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < nt; ++j) {
    Vector edot;
    if (j == 0) {
      edot = history.rate(0);
    } else if (j + 1 == nt) {
      edot = history.rate(j - 1);
    } else {
      edot = 0.5 * (history.rate(j - 1) + history.rate(j));
    }
    const Vector& s = stress[j].kelvin();
    Vector rhs = c0inv * sdot[j] + m.inv_eta(0) * s;
    for (int i = 1; i <= m.n(); ++i) {
      const double a = m.inv_eta(i);
      rhs += a * s - a * a * (m.c()[i].kelvin() * memory[i - 1][j]);
    }
    worst = std::max(worst, (edot - rhs).norm());
    scale = std::max(scale, edot.norm());
  }
  return scale > 0.0 ? worst / scale : worst;
}

double cross_check_ode_equivalence(const BurgersMaterial& m, const StrainHistory& history) {
  const RelaxationEvaluator ev(m);
  const auto ode = integrate_internal(m, ev, history).stress;
  const auto conv = convolve(ev, history);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < ode.size(); ++j) {
    num += (ode[j] - conv[j]).kelvin().squaredNorm();
    den += ode[j].kelvin().squaredNorm();
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace burgers
