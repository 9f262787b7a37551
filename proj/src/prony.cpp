#include "burgers/prony.hpp"

#include "burgers/error.hpp"
#include "burgers/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace burgers {

namespace {

using Poly = std::vector<double>;  // ascending coefficients

Poly poly_mul(const Poly& p, const Poly& q) {
  Poly r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

Poly poly_add(Poly p, const Poly& q) {
  if (q.size() > p.size()) p.resize(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) p[i] += q[i];
  return p;
}

Poly poly_from_linear_factors(const std::vector<double>& shifts) {
  Poly p{1.0};
  for (double c : shifts) p = poly_mul(p, {c, 1.0});
  return p;
}

// Split an orthonormal basis V into eigenspaces of V^T C V.
std::vector<Matrix> split_subspace(const Matrix& v, const Matrix& c, double cluster_tol,
                                   double scale) {
  if (v.cols() == 1) return {v};
  Matrix r = v.transpose() * c * v;
  r = 0.5 * (r + r.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  require(es.info() == Eigen::Success, "numerical", "symmetric eigensolver did not converge");
  const Vector& lam = es.eigenvalues();
  const Matrix y = v * es.eigenvectors();
  std::vector<Matrix> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= lam.size(); ++i) {
    if (i == lam.size() || lam(i) - lam(i - 1) > cluster_tol * scale) {
      out.push_back(y.middleCols(start, i - start));
      start = i;
    }
  }
  return out;
}

double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

// joint spectral decomposition ------------------------------------------------

CommuteCheck commutativity(const BurgersMaterial& m) {
  CommuteCheck out;
  for (int i = 0; i <= m.n(); ++i)
    for (int j = i + 1; j <= m.n(); ++j) {
      const double r = commute_residual(m.c()[i], m.c()[j]);
      if (r > out.worst) out = {r, i, j};
    }
  return out;
}

JointSpectral joint_spectral(const BurgersMaterial& m, double commute_tol, double cluster_tol) {
  const CommuteCheck cc = commutativity(m);
  if (cc.worst > commute_tol) {
    std::ostringstream os;
    os << "C" << cc.i << " and C" << cc.j << " do not commute (residual " << cc.worst
       << " > " << commute_tol << ")";
    throw Error("non-commuting", os.str());
  }

  const int kd = m.kelvin();
  std::vector<Matrix> bases{Matrix::Identity(kd, kd)};
  for (int l = 0; l <= m.n(); ++l) {
    const Matrix& c = m.c()[l].kelvin();
    const double scale = spectral_norm(c);
    std::vector<Matrix> next;
    for (const auto& v : bases) {
      auto parts = split_subspace(v, c, cluster_tol, scale);
      for (auto& p : parts) next.push_back(std::move(p));
    }
    bases = std::move(next);
  }

  // Order channels by decreasing eigenvalue of C0, then of C1, ...
  const int kc = static_cast<int>(bases.size());
  Matrix eigs(m.n() + 1, kc);
  for (int k = 0; k < kc; ++k)
    for (int l = 0; l <= m.n(); ++l) {
      const Matrix r = bases[k].transpose() * m.c()[l].kelvin() * bases[k];
      eigs(l, k) = r.trace() / static_cast<double>(bases[k].cols());
    }
  std::vector<int> order(kc);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    for (int l = 0; l <= m.n(); ++l) {
      if (eigs(l, x) != eigs(l, y)) return eigs(l, x) > eigs(l, y);
    }
    return false;
  });

  JointSpectral js;
  js.dim = m.dim();
  js.channel_eigs.resize(m.n() + 1, kc);
  for (int k = 0; k < kc; ++k) {
    const Matrix& v = bases[order[k]];
    Matrix p = v * v.transpose();
    js.projections.push_back(0.5 * (p + p.transpose()));
    js.ranks.push_back(static_cast<int>(v.cols()));
    js.channel_eigs.col(k) = eigs.col(order[k]);
  }
  for (int l = 0; l <= m.n(); ++l) {
    Matrix rec = Matrix::Zero(kd, kd);
    for (int k = 0; k < kc; ++k) rec += js.channel_eigs(l, k) * js.projections[k];
    const Matrix& c = m.c()[l].kelvin();
    js.reconstruction_error = std::max(js.reconstruction_error, (rec - c).norm() / c.norm());
  }
  return js;
}

// channel rational function ---------------------------------------------------

std::complex<double> ChannelRational::eval(std::complex<double> s) const {
  std::complex<double> d = a0 + b0 * s;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * s / (s + A[i]);
  return d;
}

double ChannelRational::eval(double s) const {
  double d = a0 + b0 * s;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * s / (s + A[i]);
  return d;
}

double ChannelRational::derivative(double s) const {
  double d = b0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = s + A[i];
    d += a[i] * A[i] / (u * u);
  }
  return d;
}

ChannelRational channel_rational(const JointSpectral& js, const std::vector<double>& eta, int k) {
  require(k >= 0 && k < js.channels(), "dimension-mismatch", "channel index out of range");
  require(static_cast<Eigen::Index>(eta.size()) == js.channel_eigs.rows(), "dimension-mismatch",
          "viscosity count does not match the joint decomposition");
  require(std::isfinite(eta[0]) && eta[0] > 0.0, "invalid-material",
          "the Laplace method needs a finite Maxwell dashpot");
  ChannelRational d;
  d.k = k;
  d.a0 = 1.0 / eta[0];
  d.b0 = 1.0 / js.channel_eigs(0, k);
  for (std::size_t i = 1; i < eta.size(); ++i) {
    const double a = 1.0 / eta[i];
    d.a.push_back(a);
    d.A.push_back(a * js.channel_eigs(static_cast<Eigen::Index>(i), k));
  }
  return d;
}

// poles ---------------------------------------------------------------------------

PronyChannel channel_poles(const ChannelRational& d, double merge_tol) {
  PronyChannel ch;
  ch.k = d.k;
  ch.lambda0 = 1.0 / d.b0;

  // Merge coincident A_i: a s/(s+A) + a' s/(s+A) = (a+a') s/(s+A).
  std::vector<std::size_t> idx(d.A.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return d.A[x] < d.A[y]; });
  for (std::size_t i : idx) {
    const double ai = d.a[i];
    const double Ai = d.A[i];
    if (!ch.group_A.empty() &&
        std::abs(Ai - ch.group_A.back()) <= merge_tol * std::max(Ai, ch.group_A.back())) {
      const double w = ch.group_a.back() + ai;
      ch.group_A.back() = (ch.group_a.back() * ch.group_A.back() + ai * Ai) / w;
      ch.group_a.back() = w;
    } else {
      ch.group_A.push_back(Ai);
      ch.group_a.push_back(ai);
    }
  }
  const std::size_t g = ch.group_A.size();

  // Q in the scaled variable z = s / sigma, leading coefficient b0 sigma.
  double asum = 0.0;
  for (double w : ch.group_a) asum += w;
  const double sigma = std::max(g ? ch.group_A.back() : 0.0, (d.a0 + asum) / d.b0);
  std::vector<double> shifted(g);
  for (std::size_t i = 0; i < g; ++i) shifted[i] = ch.group_A[i] / sigma;
  Poly q = poly_mul({d.a0, d.b0 * sigma}, poly_from_linear_factors(shifted));
  for (std::size_t i = 0; i < g; ++i) {
    std::vector<double> others;
    for (std::size_t h = 0; h < g; ++h)
      if (h != i) others.push_back(shifted[h]);
    q = poly_add(q, poly_mul({0.0, ch.group_a[i]}, poly_from_linear_factors(others)));
  }

  const int deg = static_cast<int>(q.size()) - 1;
  Matrix comp = Matrix::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -q[i] / q[deg];
  Eigen::EigenSolver<Matrix> es(comp, false);
  require(es.info() == Eigen::Success, "numerical-conditioning",
          "companion matrix eigensolver did not converge");

  std::vector<double> roots;
  for (int i = 0; i < deg; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    const double re = sigma * z.real();
    const double im = sigma * z.imag();
    if (std::abs(im) > 1e-9 * (1.0 + std::abs(re))) {
      std::ostringstream os;
      os << "channel " << d.k << ": root " << re << (im < 0 ? "-" : "+") << std::abs(im)
         << "i is not real";
      throw Error("numerical-conditioning", os.str());
    }
    ch.max_imag_ratio = std::max(ch.max_imag_ratio, std::abs(im) / std::max(std::abs(re), 1e-300));
    roots.push_back(re);
  }
  std::sort(roots.begin(), roots.end());

  // Polish with Newton on D, which is increasing between consecutive poles.
  std::vector<double> walls{-std::numeric_limits<double>::infinity()};
  for (auto it = ch.group_A.rbegin(); it != ch.group_A.rend(); ++it) walls.push_back(-*it);
  walls.push_back(0.0);
  require(roots.size() + 1 == walls.size(), "numerical-conditioning",
          "unexpected number of roots");
  for (std::size_t i = 0; i < roots.size(); ++i) {
    double r = roots[i];
    const double lo = walls[i];
    const double hi = walls[i + 1];
    if (!(r > lo && r < hi)) {
      std::ostringstream os;
      os << "channel " << d.k << ": root " << r << " lies outside its interlacing interval";
      throw Error("numerical-conditioning", os.str());
    }
    for (int it = 0; it < 60; ++it) {
      const double f = d.eval(r);
      const double fp = d.derivative(r);
      if (!(fp > 0.0)) break;
      double step = f / fp;
      while (!(r - step > lo && r - step < hi)) step *= 0.5;
      r -= step;
      if (std::abs(step) <= 4e-16 * std::abs(r)) break;
    }
    roots[i] = r;
  }

  for (double r : roots) {
    if (!(r < 0.0)) {
      std::ostringstream os;
      os << "channel " << d.k << ": root " << r << " is not negative";
      throw Error("numerical-conditioning", os.str());
    }
    for (double a : ch.group_A) {
      if (std::abs(r + a) <= 1e-12 * std::max(std::abs(r), a)) {
        std::ostringstream os;
        os << "channel " << d.k << ": root " << r << " collides with pole " << -a;
        throw Error("numerical-conditioning", os.str());
      }
    }
  }

  // Coalesce roots closer than roundoff into one multiple root.
  for (double r : roots) {
    if (!ch.roots.empty() && std::abs(r - ch.roots.back()) <= 1e-10 * std::abs(r)) {
      const int j = ch.multiplicities.back();
      ch.roots.back() = (ch.roots.back() * j + r) / (j + 1);
      ch.multiplicities.back() = j + 1;
    } else {
      ch.roots.push_back(r);
      ch.multiplicities.push_back(1);
    }
  }
  return ch;
}

// partial fractions -------------------------------------------------------------

std::vector<std::vector<double>> confluent_residues(double lead, const std::vector<double>& zeros,
                                                    const std::vector<double>& poles,
                                                    const std::vector<int>& multiplicities) {
  std::vector<std::vector<double>> out;
  for (std::size_t l = 0; l < poles.size(); ++l) {
    const double p = poles[l];
    const int j = multiplicities[l];
    // Taylor coefficients of lead * prod(s - z) / prod_{m != l}(s - p_m)^{j_m} at p.
    std::vector<double> f(j, 0.0);
    f[0] = lead;
    auto mul_linear = [&](double c0) {  // times (c0 + h)
      for (int i = j - 1; i >= 0; --i) f[i] = c0 * f[i] + (i > 0 ? f[i - 1] : 0.0);
    };
    auto div_linear = [&](double delta) {  // divided by (delta + h)
      for (int i = 0; i < j; ++i) f[i] = (f[i] - (i > 0 ? f[i - 1] : 0.0)) / delta;
    };
    for (double z : zeros) mul_linear(p - z);
    for (std::size_t m = 0; m < poles.size(); ++m) {
      if (m == l) continue;
      for (int e = 0; e < multiplicities[m]; ++e) div_linear(p - poles[m]);
    }
    std::vector<double> g(j);
    for (int q = 1; q <= j; ++q) g[q - 1] = f[j - q];
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

double expansion(const PronyChannel& ch, double s) {
  double v = 0.0;
  for (std::size_t l = 0; l < ch.roots.size(); ++l) {
    const double u = 1.0 / (s - ch.roots[l]);
    double up = u;
    for (double g : ch.coeffs[l]) {
      v += g * up;
      up *= u;
    }
  }
  return v;
}

double expansion_error(const PronyChannel& ch, const ChannelRational& d) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double s = 0.1 * std::pow(100.0, i / 19.0);
    const double exact = 1.0 / d.eval(s);
    worst = std::max(worst, std::abs(expansion(ch, s) - exact) / std::abs(exact));
  }
  return worst;
}

void fit_least_squares(PronyChannel& ch, const ChannelRational& d) {
  int unknowns = 0;
  for (int j : ch.multiplicities) unknowns += j;
  double scale = 1.0;
  for (double r : ch.roots) scale = std::max(scale, std::abs(r));
  const int samples = 8 * unknowns + 40;
  Matrix a(samples, unknowns);
  Vector b(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = 0.1 * std::pow(10.0 * scale / 0.1, i / double(samples - 1));
    const double w = std::abs(d.eval(s));  // relative weighting
    int col = 0;
    for (std::size_t l = 0; l < ch.roots.size(); ++l) {
      const double u = 1.0 / (s - ch.roots[l]);
      double up = u;
      for (int q = 0; q < ch.multiplicities[l]; ++q, ++col) {
        a(i, col) = w * up;
        up *= u;
      }
    }
    b(i) = w / d.eval(s);
  }
  const Vector x = a.colPivHouseholderQr().solve(b);
  ch.coeffs.clear();
  int col = 0;
  for (int j : ch.multiplicities) {
    ch.coeffs.emplace_back(x.data() + col, x.data() + col + j);
    col += j;
  }
  ch.least_squares = true;
}

}  // namespace

void partial_fractions(PronyChannel& ch, const ChannelRational& d) {
  double scale = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < ch.roots.size(); ++l) {
    scale = std::max(scale, std::abs(ch.roots[l]));
    for (std::size_t m = l + 1; m < ch.roots.size(); ++m)
      gap = std::min(gap, std::abs(ch.roots[l] - ch.roots[m]));
  }
  const double cond = std::isinf(gap) ? 1.0 : scale / gap;
  const bool simple = std::all_of(ch.multiplicities.begin(), ch.multiplicities.end(),
                                  [](int j) { return j == 1; });

  ch.least_squares = false;
  if (cond > 1e12) {
    fit_least_squares(ch, d);
  } else if (simple) {
    ch.coeffs.clear();
    for (double r : ch.roots) ch.coeffs.push_back({1.0 / d.derivative(r)});
  } else {
    // 1/D = prod(s + A) / (b0 prod(s - r)^j)
    std::vector<double> zeros;
    for (double a : ch.group_A) zeros.push_back(-a);
    ch.coeffs = confluent_residues(1.0 / d.b0, zeros, ch.roots, ch.multiplicities);
  }
  ch.reconstruction_error = expansion_error(ch, d);
  if (ch.reconstruction_error > 1e-9 && !ch.least_squares) {
    fit_least_squares(ch, d);
    ch.reconstruction_error = expansion_error(ch, d);
  }
  if (ch.reconstruction_error > 1e-9) {
    std::ostringstream os;
    os << "channel " << ch.k << ": partial fractions reproduce 1/D only to "
       << ch.reconstruction_error << "; increase the merge tolerance";
    throw Error("numerical-conditioning", os.str());
  }
}

double PronyChannel::eval(double t) const {
  if (t < 0.0) return 0.0;
  double v = 0.0;
  for (std::size_t l = 0; l < roots.size(); ++l) {
    double poly = 0.0;
    double tp = 1.0;  // t^(q-1) / (q-1)!
    for (std::size_t q = 0; q < coeffs[l].size(); ++q) {
      poly += coeffs[l][q] * tp;
      tp *= t / static_cast<double>(q + 1);
    }
    v += poly * std::exp(roots[l] * t);
  }
  return v;
}

// Prony form ---------------------------------------------------------------------

PronyForm build_prony(const BurgersMaterial& m, double commute_tol, double merge_tol) {
  PronyForm pf;
  pf.joint = joint_spectral(m, commute_tol);
  Matrix g0 = Matrix::Zero(m.kelvin(), m.kelvin());
  for (int k = 0; k < pf.joint.channels(); ++k) {
    const ChannelRational d = channel_rational(pf.joint, m.eta(), k);
    PronyChannel ch = channel_poles(d, merge_tol);
    partial_fractions(ch, d);
    g0 += ch.eval(0.0) * pf.joint.projections[k];
    pf.channels.push_back(std::move(ch));
  }
  const Matrix& c0 = m.c()[0].kelvin();
  pf.initial_value_error = (g0 - c0).norm() / c0.norm();
  if (pf.initial_value_error > 1e-9) {
    std::ostringstream os;
    os << "Prony form reproduces C0 at t=0 only to " << pf.initial_value_error;
    throw Error("numerical-conditioning", os.str());
  }
  return pf;
}

ElasticTensor4 eval_G_prony(const PronyForm& pf, double t) {
  const int dim = pf.joint.dim;
  if (t < 0.0) return ElasticTensor4::zero(dim);
  const int kd = kelvin_size(dim);
  Matrix g = Matrix::Zero(kd, kd);
  for (std::size_t k = 0; k < pf.channels.size(); ++k)
    g += pf.channels[k].eval(t) * pf.joint.projections[k];
  return ElasticTensor4(dim, g);
}

void write_prony_table(std::ostream& os, const PronyForm& pf) {
  os << "# channel root multiplicity_index coefficient\n";
  for (std::size_t k = 0; k < pf.channels.size(); ++k) {
    const auto& ch = pf.channels[k];
    for (std::size_t l = 0; l < ch.roots.size(); ++l)
      for (std::size_t q = 0; q < ch.coeffs[l].size(); ++q)
        os << k << ' ' << format_double(ch.roots[l]) << ' ' << q + 1 << ' '
           << format_double(ch.coeffs[l][q]) << '\n';
  }
  const int kd = kelvin_size(pf.joint.dim);
  for (std::size_t k = 0; k < pf.joint.projections.size(); ++k) {
    os << "# projection " << k << " rank " << pf.joint.ranks[k] << '\n';
    for (int i = 0; i < kd; ++i) {
      for (int j = 0; j < kd; ++j)
        os << (j ? " " : "") << format_double(pf.joint.projections[k](i, j));
      os << '\n';
    }
  }
}

// Maxwell counterexample -----------------------------------------------------------

Matrix relaxation_transform(const BurgersMaterial& m, double s, bool with_maxwell) {
  require(s > 0.0, "domain", "transform is evaluated at positive real s");
  const int kd = m.kelvin();
  const Matrix id = Matrix::Identity(kd, kd);
  Matrix mm = Matrix::Zero(kd, kd);
  if (with_maxwell) {
    mm += inverse_spd(m.c()[0]).kelvin() + (m.inv_eta(0) / s) * id;
  }
  for (int i = 1; i <= m.n(); ++i) {
    const double a = m.inv_eta(i);
    Matrix blk = s * id + a * m.c()[i].kelvin();
    mm += a * blk.ldlt().solve(id);
  }
  mm = 0.5 * (mm + mm.transpose());
  Matrix g = (s * mm).ldlt().solve(id);
  return 0.5 * (g + g.transpose());
}

NoMaxwellReport no_maxwell_counterexample(const BurgersMaterial& m) {
  NoMaxwellReport rep;
  const int kd = m.kelvin();
  Matrix compliance = Matrix::Zero(kd, kd);
  for (int i = 1; i <= m.n(); ++i) compliance += inverse_spd(m.c()[i]).kelvin();
  rep.equilibrium_modulus = inverse_spd(ElasticTensor4(m.dim(), compliance)).kelvin();
  rep.equilibrium_min_eigenvalue = ElasticTensor4(m.dim(), rep.equilibrium_modulus).min_eigenvalue();

  for (int e = 1; e <= 8; ++e) {
    const double s = std::pow(10.0, -e);
    rep.probe_s.push_back(s);
    rep.probe_without_maxwell.push_back((s * relaxation_transform(m, s, false)).norm());
    rep.probe_with_maxwell.push_back((s * relaxation_transform(m, s, true)).norm());
  }
  const double s = rep.probe_s.back();
  auto limit = [&](bool with) {
    const double p1 = (s * relaxation_transform(m, s, with)).norm();
    const double p2 = (0.5 * s * relaxation_transform(m, 0.5 * s, with)).norm();
    return std::abs(2.0 * p2 - p1);
  };
  rep.limit_without_maxwell = limit(false);
  rep.limit_with_maxwell = limit(true);
  const double ref = m.c()[0].kelvin().norm();
  rep.decays_without_maxwell = rep.limit_without_maxwell <= 1e-6 * ref;
  rep.decays_with_maxwell = rep.limit_with_maxwell <= 1e-6 * ref;
  if (!rep.decays_without_maxwell) {
    rep.verdict = "equilibrium modulus > 0 => no exponential decay without the Maxwell element";
  } else {
    rep.verdict = "equilibrium modulus vanished unexpectedly";
  }
  return rep;
}

}  // namespace burgers
