#include "dss/numerics.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace dss {

namespace {

GaussLegendreRule compute_gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2 * j + 1) * z * p2 - j * p3) / (j + 1);
      }
      pp = order * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[order - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[order - 1 - i] = rule.weights[i];
  }
  return rule;
}

double panel_value(const std::function<double(double)>& f, double a, double b,
                   const GaussLegendreRule& rule) {
  const double mid = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  KahanSum sum;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum.add(rule.weights[i] * f(mid + hw * rule.nodes[i]));
  return hw * sum.value();
}

struct AdaptiveState {
  const std::function<double(double)>* f;
  const GaussLegendreRule* rule;
  double tol_per_length = 0.0;  // absolute tolerance per unit length
  int evaluations = 0;
  bool converged = true;
  KahanSum total;
  KahanSum err;
};

void adapt(AdaptiveState& st, double a, double b, double whole, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = panel_value(*st.f, a, mid, *st.rule);
  const double right = panel_value(*st.f, mid, b, *st.rule);
  st.evaluations += 2 * static_cast<int>(st.rule->nodes.size());
  const double diff = std::abs(left + right - whole);
  if (diff <= st.tol_per_length * (b - a) || depth <= 0) {
    st.total.add(left);
    st.total.add(right);
    st.err.add(diff);
    if (depth <= 0 && diff > st.tol_per_length * (b - a)) st.converged = false;
    return;
  }
  adapt(st, a, mid, left, depth - 1);
  adapt(st, mid, b, right, depth - 1);
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

LegendrePair legendre_costheta(int k, double theta) {
  if (k < 0) throw std::invalid_argument("legendre_costheta: k must be >= 0");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  double u0 = 1.0, du0 = 0.0;
  if (k == 0) return {u0, du0};
  double u1 = c, du1 = -s;
  for (int j = 1; j < k; ++j) {
    const double u2 = ((2 * j + 1) * c * u1 - j * u0) / (j + 1);
    const double du2 = ((2 * j + 1) * (c * du1 - s * u1) - j * du0) / (j + 1);
    u0 = u1;
    du0 = du1;
    u1 = u2;
    du1 = du2;
  }
  return {u1, du1};
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol,
                                    double abs_floor, int max_depth) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  const GaussLegendreRule& rule = gauss_legendre(20);
  const double whole = panel_value(f, a, b, rule);
  // Scale estimate from a refined first pass so that rel_tol means relative
  // to the value of the integral, not to a single panel.
  const double half_sum = panel_value(f, a, 0.5 * (a + b), rule) +
                          panel_value(f, 0.5 * (a + b), b, rule);
  const double scale = std::max({std::abs(whole), std::abs(half_sum), abs_floor});

  AdaptiveState st;
  st.f = &f;
  st.rule = &rule;
  st.tol_per_length = std::max(rel_tol * scale, abs_floor) / std::abs(b - a);
  st.evaluations = 3 * static_cast<int>(rule.nodes.size());
  adapt(st, a, b, whole, max_depth);
  out.value = st.total.value();
  out.error = st.err.value();
  out.evaluations = st.evaluations;
  out.converged = st.converged;
  return out;
}

QuadratureResult integrate_2d(const std::function<double(double, double)>& f,
                              double a1, double b1, double a2, double b2,
                              double rel_tol, int max_order) {
  QuadratureResult out;
  double previous = 0.0;
  bool have_previous = false;
  for (int order = 24; order <= max_order; order = (3 * order) / 2) {
    const GaussLegendreRule& rule = gauss_legendre(order);
    const double m1 = 0.5 * (a1 + b1), h1 = 0.5 * (b1 - a1);
    const double m2 = 0.5 * (a2 + b2), h2 = 0.5 * (b2 - a2);
    KahanSum sum;
    for (int i = 0; i < order; ++i) {
      const double x = m1 + h1 * rule.nodes[i];
      KahanSum inner;
      for (int j = 0; j < order; ++j)
        inner.add(rule.weights[j] * f(x, m2 + h2 * rule.nodes[j]));
      sum.add(rule.weights[i] * inner.value());
    }
    const double value = h1 * h2 * sum.value();
    out.evaluations += order * order;
    if (have_previous) {
      out.error = std::abs(value - previous);
      if (out.error <= rel_tol * std::max(std::abs(value), 1e-300)) {
        out.value = value;
        out.converged = true;
        return out;
      }
    }
    previous = value;
    have_previous = true;
    out.value = value;
  }
  out.converged = false;
  return out;
}

RootResult find_root(const std::function<double(double)>& f, double lo,
                     double hi, double x_tol, int max_iter) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  RootResult out;
  if (fa == 0.0) return {a, 0, true};
  if (fb == 0.0) return {b, 0, true};
  if (fa * fb > 0.0)
    throw std::invalid_argument("find_root: endpoints do not bracket a root");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1.11e-16 * std::abs(b) + 0.5 * x_tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return {b, iter, true};
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double rr = fb / fc;
        p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
        q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
  }
  out.x = b;
  out.iterations = max_iter;
  out.converged = false;
  return out;
}

std::vector<std::pair<double, double>> bracket_roots(
    const std::function<double(double)>& f, double lo, double hi, int samples) {
  if (samples < 2) throw std::invalid_argument("bracket_roots: samples must be >= 2");
  std::vector<std::pair<double, double>> out;
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = lo + (hi - lo) * i / samples;
    const double f1 = f(x1);
    if (f0 == 0.0)
      out.emplace_back(x0, x0);
    else if (f0 * f1 < 0.0)
      out.emplace_back(x0, x1);
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0) out.emplace_back(x0, x0);
  return out;
}

std::pair<double, double> fit_line(std::span<const double> xs,
                                   std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matching points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  const double b = (n * sxy - sx * sy) / denom;
  const double a = (sy - b * sx) / n;
  return {a, b};
}

PowerFit fit_power_law(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_power_law: need >= 2 matching points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0.0 || ys[i] <= 0.0)
      throw std::invalid_argument("fit_power_law: data must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const auto [a, b] = fit_line(lx, ly);
  PowerFit fit;
  fit.exponent = b;
  fit.amplitude = std::exp(a);
  for (std::size_t i = 0; i < lx.size(); ++i)
    fit.max_log_residual = std::max(fit.max_log_residual,
                                    std::abs(a + b * lx[i] - ly[i]));
  return fit;
}

BarycentricDiff::BarycentricDiff(std::vector<double> nodes) : x_(std::move(nodes)) {
  const int n = static_cast<int>(x_.size());
  if (n < 2) throw std::invalid_argument("BarycentricDiff: need >= 2 nodes");
  // log-scaled barycentric weights; only ratios w_k/w_j are ever used.
  std::vector<double> logw(n, 0.0);
  std::vector<double> sign(n, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const double d = x_[j] - x_[k];
      if (d == 0.0) throw std::invalid_argument("BarycentricDiff: repeated node");
      logw[j] -= std::log(std::abs(d));
      if (d < 0.0) sign[j] = -sign[j];
    }
  }
  d1_.assign(static_cast<std::size_t>(n) * n, 0.0);
  d2_.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto ratio = [&](int k, int j) {
    return sign[k] * sign[j] * std::exp(logw[k] - logw[j]);
  };
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const double v = ratio(k, j) / (x_[j] - x_[k]);
      d1_[j * n + k] = v;
      diag -= v;
    }
    d1_[j * n + j] = diag;
  }
  // Welfert recursion for the second derivative.
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const double v = 2.0 / (x_[j] - x_[k]) *
                       (ratio(k, j) * d1_[j * n + j] - d1_[j * n + k]);
      d2_[j * n + k] = v;
      diag -= v;
    }
    d2_[j * n + j] = diag;
  }
}

void BarycentricDiff::derivatives(std::span<const double> u, std::span<double> du,
                                  std::span<double> d2u) const {
  const int n = size();
  if (static_cast<int>(u.size()) != n || static_cast<int>(du.size()) != n ||
      static_cast<int>(d2u.size()) != n)
    throw std::invalid_argument("BarycentricDiff: size mismatch");
  for (int j = 0; j < n; ++j) {
    KahanSum s1, s2;
    for (int k = 0; k < n; ++k) {
      s1.add(d1_[j * n + k] * u[k]);
      s2.add(d2_[j * n + k] * u[k]);
    }
    du[j] = s1.value();
    d2u[j] = s2.value();
  }
}

}  // namespace dss
