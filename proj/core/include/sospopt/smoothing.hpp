#pragma once

#include <cmath>

#include "sospopt/errors.hpp"

namespace sospopt {

/// Smooth ReLU: relu_iota(x) = (1/iota) * log(1 + exp(iota*x)).
/// Evaluated in the overflow-safe form max(0,x) + (1/iota)*log1p(exp(-iota*|x|)).
struct SmoothRelu {
  double iota = 1.0;

  explicit SmoothRelu(double iota_) : iota(iota_) {
    if (!(iota > 0) || !std::isfinite(iota))
      throw std::invalid_argument("SmoothRelu: iota must be finite and positive");
  }

  double value(double x) const {
    return std::max(0.0, x) + std::log1p(std::exp(-iota * std::abs(x))) / iota;
  }

  /// logistic(iota*x), computed without overflow for either sign.
  double d1(double x) const {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-iota * x));
    const double e = std::exp(iota * x);
    return e / (1.0 + e);
  }

  double d2(double x) const {
    const double s = d1(x);
    return iota * s * (1.0 - s);
  }

  /// Gradient Lipschitz constant: sup |d2| = iota/4.
  double grad_lipschitz() const { return iota / 4.0; }
  /// Hessian Lipschitz constant: sqrt(3)*iota^2/9 (upper bound on sup |d3|).
  double hessian_lipschitz() const { return std::sqrt(3.0) * iota * iota / 9.0; }
};

/// Piecewise-quadratic step: 0 below eps/2, 1 above eps, C^1 smoothstep in
/// between. Exact breakpoints belong to the closed quadratic branches, which
/// agree with the constant branches there.
struct StepSmoothing {
  double eps = 1.0;

  explicit StepSmoothing(double eps_) : eps(eps_) {
    if (!(eps > 0) || !std::isfinite(eps))
      throw std::invalid_argument("StepSmoothing: eps must be finite and positive");
  }

  double value(double x) const {
    if (x >= eps) return 1.0;
    if (x <= 0.5 * eps) return 0.0;
    const double q = 8.0 / (eps * eps);
    if (x <= 0.75 * eps) {
      const double u = x - 0.5 * eps;
      return q * u * u;
    }
    const double u = x - eps;
    return 1.0 - q * u * u;
  }

  double d1(double x) const {
    if (x >= eps || x <= 0.5 * eps) return 0.0;
    const double q = 16.0 / (eps * eps);
    if (x <= 0.75 * eps) return q * (x - 0.5 * eps);
    return -q * (x - eps);
  }

  /// sup |S''| over the quadratic branches.
  double grad_lipschitz() const { return 16.0 / (eps * eps); }
  /// Nominal Hessian Lipschitz order: S'' is piecewise constant with bounded
  /// jumps, so only an O(1/eps^3) nominal constant is declared; SOSP
  /// certification of step-smoothed objectives uses this value.
  double hessian_lipschitz_nominal() const { return 128.0 / (eps * eps * eps); }

  /// Smoothed sign-disagreement indicator I(x,y) = S(x)S(-y) + S(-x)S(y).
  /// Equals 1 when xy < 0 with both margins at least eps, 0 when xy > 0 or
  /// either margin is at most eps/2.
  double disagree(double x, double y) const {
    return value(x) * value(-y) + value(-x) * value(y);
  }

  double disagree_dx(double x, double y) const {
    return d1(x) * value(-y) - d1(-x) * value(y);
  }

  double disagree_dy(double x, double y) const {
    return -value(x) * d1(-y) + value(-x) * d1(y);
  }
};

/// Piecewise-cubic ramp over a nonnegative distortion magnitude t: 0 up to
/// eps, 1 beyond eps+eps1, C^1 cubic smoothstep in between. The cubic
/// coefficient 4/eps1^3 makes the two branches meet with matching value and
/// derivative at the midpoint.
struct JLIndicatorSmoothing {
  double eps = 1.0;
  double eps1 = 1.0;

  JLIndicatorSmoothing(double eps_, double eps1_) : eps(eps_), eps1(eps1_) {
    if (!(eps > 0) || !std::isfinite(eps))
      throw std::invalid_argument("JLIndicatorSmoothing: eps must be positive");
    if (!(eps1 > 0) || !std::isfinite(eps1))
      throw std::invalid_argument("JLIndicatorSmoothing: eps1 must be positive");
  }

  /// eps1 <= eps is the recommended regime; callers may warn otherwise.
  bool width_exceeds_threshold() const { return eps1 > eps; }

  double value(double t) const {
    check(t);
    if (t <= eps) return 0.0;
    if (t >= eps + eps1) return 1.0;
    const double c = 4.0 / (eps1 * eps1 * eps1);
    if (t <= eps + 0.5 * eps1) {
      const double u = t - eps;
      return c * u * u * u;
    }
    const double u = eps + eps1 - t;
    return 1.0 - c * u * u * u;
  }

  double d1(double t) const {
    check(t);
    if (t <= eps || t >= eps + eps1) return 0.0;
    const double c = 4.0 / (eps1 * eps1 * eps1);
    if (t <= eps + 0.5 * eps1) {
      const double u = t - eps;
      return 3.0 * c * u * u;
    }
    const double u = eps + eps1 - t;
    return 3.0 * c * u * u;
  }

  double d2(double t) const {
    check(t);
    if (t <= eps || t >= eps + eps1) return 0.0;
    const double c = 4.0 / (eps1 * eps1 * eps1);
    if (t <= eps + 0.5 * eps1) return 6.0 * c * (t - eps);
    return -6.0 * c * (eps + eps1 - t);
  }

  /// sup |d1| = 3/eps1, attained at the branch midpoint.
  double d1_bound() const { return 3.0 / eps1; }
  /// sup |d2| = 12/eps1^2.
  double grad_lipschitz() const { return 12.0 / (eps1 * eps1); }
  /// Nominal O(1/eps1^3) constant covering the in-branch slope of d2 and its
  /// midpoint jump.
  double hessian_lipschitz_nominal() const { return 48.0 / (eps1 * eps1 * eps1); }

 private:
  static void check(double t) {
    if (t < 0)
      throw std::invalid_argument("JLIndicatorSmoothing: t must be nonnegative");
  }
};

}  // namespace sospopt
