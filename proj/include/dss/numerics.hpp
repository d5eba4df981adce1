#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Shared numerical kernel: Gauss-Legendre rules, adaptive quadrature,
// bracketed root finding, barycentric spectral differentiation, power-law
// fits and a few small helpers used throughout the library.

namespace dss {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Area of the unit sphere S^k in R^{k+1}.
inline double unit_sphere_area(int k) {
  if (k < 0) throw std::invalid_argument("unit_sphere_area: k must be >= 0");
  return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

// Compensated accumulator; quadrature sums need the extra digits when
// downstream consumers subtract results agreeing to 12+ digits.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Nodes by Newton iteration on P_n; cached per order, thread-safe.
const GaussLegendreRule& gauss_legendre(int order);

// P_k(cos(theta)) together with the theta-derivative, by joint recurrence.
struct LegendrePair {
  double value;
  double dtheta;
};
LegendrePair legendre_costheta(int k, double theta);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;       // estimated absolute error
  int evaluations = 0;
  bool converged = false;
};

// Adaptive panel-bisection Gauss-Legendre quadrature. The error of a panel
// is estimated from the difference between one parent rule and the sum of
// its two children.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol = 1e-12,
                                    double abs_floor = 0.0, int max_depth = 28);

// Fixed tensor-product rule on [a1,b1] x [a2,b2], escalating the order until
// the relative change drops below rel_tol.
QuadratureResult integrate_2d(const std::function<double(double, double)>& f,
                              double a1, double b1, double a2, double b2,
                              double rel_tol = 1e-12, int max_order = 384);

struct RootResult {
  double x = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Brent-Dekker on a sign-changing bracket.
RootResult find_root(const std::function<double(double)>& f, double lo,
                     double hi, double x_tol = 1e-14, int max_iter = 200);

// Scan [lo, hi] with `samples` points and return sign-change brackets.
std::vector<std::pair<double, double>> bracket_roots(
    const std::function<double(double)>& f, double lo, double hi, int samples);

// Least-squares fit of y = C * x^p through (log x, log y).
struct PowerFit {
  double exponent = 0.0;
  double amplitude = 0.0;      // C
  double max_log_residual = 0.0;
};
PowerFit fit_power_law(std::span<const double> xs, std::span<const double> ys);

// Straight-line least squares y = a + b*x; returns {a, b}.
std::pair<double, double> fit_line(std::span<const double> xs,
                                   std::span<const double> ys);

// Polynomial interpolation derivatives at arbitrary (distinct) nodes via
// barycentric weights and the Welfert recursion. Stable for Chebyshev-like
// node distributions up to several hundred points.
class BarycentricDiff {
 public:
  explicit BarycentricDiff(std::vector<double> nodes);

  int size() const { return static_cast<int>(x_.size()); }
  const std::vector<double>& nodes() const { return x_; }

  // First and second derivative of the interpolant at the nodes.
  void derivatives(std::span<const double> u, std::span<double> du,
                   std::span<double> d2u) const;

 private:
  std::vector<double> x_;
  std::vector<double> d1_;  // row-major N x N
  std::vector<double> d2_;
};

}  // namespace dss
