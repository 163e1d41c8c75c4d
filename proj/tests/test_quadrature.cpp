#include <doctest.h>

#include <cmath>

#include "sospopt/quadrature.hpp"

using sospopt::gauss_hermite;

TEST_SUITE("quadrature") {

TEST_CASE("standard normal moments are exact") {
  const auto rule = gauss_hermite(30);
  CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rule.expect([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rule.expect([](double x) { return x; }) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(rule.expect([](double x) { return x * x; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rule.expect([](double x) { return std::pow(x, 6); }) ==
        doctest::Approx(15.0).epsilon(1e-11));
}

TEST_CASE("smooth non-polynomial expectations") {
  const auto rule = gauss_hermite(60);
  // E[cosh(X)] = exp(1/2), E[exp(aX)] = exp(a^2/2).
  CHECK(rule.expect([](double x) { return std::cosh(x); }) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  CHECK(rule.expect([](double x) { return std::exp(0.7 * x); }) ==
        doctest::Approx(std::exp(0.49 / 2.0)).epsilon(1e-12));
}

TEST_CASE("piecewise-smooth integrands converge at the measured n^-2 rate") {
  // E[relu(X)^3] = 2/sqrt(2*pi); the kink limits Gauss-Hermite to an
  // algebraic rate, about 3e-6 absolute at 300 nodes and n^-2 beyond.
  const double expected = 2.0 / std::sqrt(2.0 * M_PI);
  const auto err = [&](int n) {
    return std::abs(gauss_hermite(n).expect(
               [](double x) { return x > 0 ? x * x * x : 0.0; }) -
           expected);
  };
  CHECK(err(300) < 5e-6);
  CHECK(err(1000) < 5e-7);
  CHECK(err(2000) < 1e-7);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
}

}  // TEST_SUITE
