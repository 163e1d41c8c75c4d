#include <doctest.h>

#include <cmath>
#include <random>

#include "sospopt/smoothing.hpp"

using sospopt::JLIndicatorSmoothing;
using sospopt::SmoothRelu;
using sospopt::StepSmoothing;

namespace {

// Max |f(x+h)-f(x)|/h over a uniform grid.
template <typename F>
double max_grid_slope(F&& f, double lo, double hi, int points) {
  const double h = (hi - lo) / (points - 1);
  double worst = 0.0;
  double prev = f(lo);
  for (int i = 1; i < points; ++i) {
    const double cur = f(lo + i * h);
    worst = std::max(worst, std::abs(cur - prev) / h);
    prev = cur;
  }
  return worst;
}

}  // namespace

TEST_SUITE("smoothing") {

TEST_CASE("relu_iota closed forms at zero") {
  for (double iota : {1.0, 2.0, 8.0}) {
    SmoothRelu relu(iota);
    CHECK(relu.value(0.0) == doctest::Approx(std::log(2.0) / iota).epsilon(1e-14));
    CHECK(relu.d1(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(relu.d2(0.0) == doctest::Approx(iota / 4.0).epsilon(1e-14));
  }
}

TEST_CASE("relu_iota has no overflow for large arguments") {
  SmoothRelu relu(2.0);
  CHECK(relu.value(100.0) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(relu.value(1e8) == doctest::Approx(1e8).epsilon(1e-15));
  CHECK(relu.value(-1e8) == 0.0);
  CHECK(relu.d1(1e8) == 1.0);
  CHECK(relu.d1(-1e8) == 0.0);
}

TEST_CASE("relu_iota Lipschitz constants dominate grid measurements") {
  for (double iota : {1.0, 2.0, 8.0}) {
    SmoothRelu relu(iota);
    const double lo = -30.0 / iota, hi = 30.0 / iota;
    const int n = 20001;
    double max_d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = lo + (hi - lo) * i / (n - 1);
      max_d2 = std::max(max_d2, std::abs(relu.d2(x)));
    }
    CHECK(max_d2 <= iota / 4.0 + 1e-9);
    const double d2_slope =
        max_grid_slope([&](double x) { return relu.d2(x); }, lo, hi, n);
    CHECK(d2_slope <= relu.hessian_lipschitz() * 1.01);
    // d1 slope is bounded by the gradient Lipschitz constant.
    const double d1_slope =
        max_grid_slope([&](double x) { return relu.d1(x); }, lo, hi, n);
    CHECK(d1_slope <= relu.grad_lipschitz() * 1.01);
  }
}

TEST_CASE("relu_iota converges to relu at rate ln(2)/iota") {
  for (double iota : {1.0, 2.0, 8.0, 32.0}) {
    SmoothRelu relu(iota);
    double sup = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double x = -10.0 + 20.0 * i / 20000.0;
      sup = std::max(sup, std::abs(relu.value(x) - std::max(0.0, x)));
    }
    CHECK(sup <= std::log(2.0) / iota + 1e-12);
  }
}

TEST_CASE("step_smooth branch boundaries") {
  for (double eps : {0.1, 1.0, 3.0}) {
    StepSmoothing s(eps);
    CHECK(s.value(eps) == 1.0);
    CHECK(s.value(eps / 2.0) == 0.0);
    CHECK(s.value(2.0 * eps) == 1.0);
    CHECK(s.value(-eps) == 0.0);
    // Both closed forms meet at 3*eps/4 with value 1/2 and slope 4/eps.
    const double q = 8.0 / (eps * eps);
    const double lower = q * std::pow(0.75 * eps - 0.5 * eps, 2);
    const double upper = 1.0 - q * std::pow(0.75 * eps - eps, 2);
    CHECK(lower == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(upper == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.value(0.75 * eps) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.d1(0.75 * eps) == doctest::Approx(4.0 / eps).epsilon(1e-12));
  }
}

TEST_CASE("step_smooth is monotone nondecreasing on a dense grid") {
  StepSmoothing s(0.7);
  double prev = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = -1.0 + 3.0 * i / 10000.0;
    const double v = s.value(x);
    CHECK(v >= prev - 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("step_smooth is C1: grid jumps bounded by declared slopes") {
  StepSmoothing s(0.35);
  const int n = 100001;
  const double lo = -1.0, hi = 1.0;
  const double spacing = (hi - lo) / (n - 1);
  const double v_slope = max_grid_slope([&](double x) { return s.value(x); }, lo, hi, n);
  const double d_slope = max_grid_slope([&](double x) { return s.d1(x); }, lo, hi, n);
  CHECK(v_slope <= 4.0 / s.eps + 1e-6 / spacing);
  CHECK(d_slope <= s.grad_lipschitz() + 1e-6 / spacing);
}

TEST_CASE("sign disagreement indicator cases") {
  const double eps = 0.2;
  StepSmoothing s(eps);
  CHECK(s.disagree(2 * eps, -2 * eps) == 1.0);
  CHECK(s.disagree(eps, eps) == 0.0);
  CHECK(s.disagree(eps / 4.0, -5.0 * eps) == 0.0);
  CHECK(s.disagree(-5.0 * eps, eps / 4.0) == 0.0);
  CHECK(s.disagree(3 * eps, 3 * eps) == 0.0);
}

TEST_CASE("sign disagreement symmetry on random pairs") {
  const double eps = 0.31;
  StepSmoothing s(eps);
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = unif(eng), y = unif(eng);
    const double v = s.disagree(x, y);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == doctest::Approx(s.disagree(y, x)).epsilon(1e-14));
    CHECK(v == doctest::Approx(s.disagree(-x, -y)).epsilon(1e-14));
  }
}

TEST_CASE("jl indicator branch boundaries and midpoint") {
  const double eps = 0.3, eps1 = 0.1;
  JLIndicatorSmoothing ind(eps, eps1);
  CHECK(ind.value(0.0) == 0.0);
  CHECK(ind.value(eps) == 0.0);
  CHECK(ind.value(eps + eps1) == 1.0);
  CHECK(ind.value(eps + 2 * eps1) == 1.0);
  const double mid = eps + 0.5 * eps1;
  const double c = 4.0 / (eps1 * eps1 * eps1);
  CHECK(c * std::pow(0.5 * eps1, 3) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(1.0 - c * std::pow(0.5 * eps1, 3) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ind.value(mid) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(ind.d1(mid) == doctest::Approx(3.0 / eps1).epsilon(1e-12));
  CHECK_THROWS_AS(ind.value(-0.1), std::invalid_argument);
}

TEST_CASE("jl indicator sandwich and range") {
  const double eps = 0.25, eps1 = 0.15;
  JLIndicatorSmoothing ind(eps, eps1);
  for (int i = 0; i <= 100000; ++i) {
    const double t = 1.2 * i / 100000.0;
    const double v = ind.value(t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v <= (t > eps ? 1.0 : 0.0));
    CHECK(v >= (t > eps + eps1 ? 1.0 : 0.0));
  }
}

TEST_CASE("jl indicator is C1 with declared derivative bounds") {
  const double eps = 0.2, eps1 = 0.08;
  JLIndicatorSmoothing ind(eps, eps1);
  const int n = 100001;
  const double spacing = 1.0 / (n - 1);
  const double v_slope =
      max_grid_slope([&](double t) { return ind.value(t); }, 0.0, 1.0, n);
  const double d_slope =
      max_grid_slope([&](double t) { return ind.d1(t); }, 0.0, 1.0, n);
  CHECK(v_slope <= ind.d1_bound() + 1e-6 / spacing);
  CHECK(d_slope <= ind.grad_lipschitz() + 1e-6 / spacing);
  double max_d2 = 0.0;
  for (int i = 0; i < n; ++i)
    max_d2 = std::max(max_d2, std::abs(ind.d2(i * spacing)));
  CHECK(max_d2 <= ind.grad_lipschitz() + 1e-12);
  CHECK(ind.grad_lipschitz() <= ind.hessian_lipschitz_nominal() * eps1);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SmoothRelu(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothRelu(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSmoothing(0.0), std::invalid_argument);
  CHECK_THROWS_AS(JLIndicatorSmoothing(0.2, 0.0), std::invalid_argument);
  CHECK(JLIndicatorSmoothing(0.1, 0.2).width_exceeds_threshold());
  CHECK_FALSE(JLIndicatorSmoothing(0.2, 0.1).width_exceeds_threshold());
}

}  // TEST_SUITE
