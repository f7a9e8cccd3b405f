#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "aitc/normal.hpp"

using namespace aitc;

// Reference values frozen from an independent high-precision implementation.
TEST_CASE("normal quantile matches reference values") {
  struct Row { double p, x; };
  const Row rows[] = {
      {1e-300, -37.047096299361201},
      {1e-16, -8.2220822161304348},
      {1e-10, -6.3613409024040557},
      {0.0013498980316300946, -3.0},
      {0.025, -1.9599639845400545},
      {0.1, -1.2815515655446004},
      {0.25, -0.67448975019608171},
      {0.5, 0.0},
      {0.75, 0.67448975019608171},
      {0.9, 1.2815515655446004},
      {0.975, 1.959963984540054},
      {0.99999, 4.2648907939238407},
  };
  for (const auto& r : rows) {
    const double got = normal::quantile(r.p);
    const double tol = std::abs(r.x) > 10.0 ? 1e-9 : 2e-13;
    CHECK(std::abs(got - r.x) <= tol * std::max(1.0, std::abs(r.x)));
  }
  CHECK_THROWS_AS(normal::quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal::quantile(1.0), std::domain_error);
}

TEST_CASE("cdf and quantile are inverse") {
  // upper-tail round trips are limited by the double representation of
  // p near 1, so the tight check stays below ~4.5
  for (double x = -8.0; x <= 4.5; x += 0.37) {
    CHECK(normal::quantile(normal::cdf(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  for (double p = 1e-300; p < 0.4; p *= 1e6) {
    CHECK(normal::cdf(normal::quantile(p)) == doctest::Approx(p).epsilon(1e-11));
  }
  for (double p : {0.01, 0.2, 0.37}) {
    CHECK(normal::quantile(p) + normal::quantile(1.0 - p) ==
          doctest::Approx(0.0).epsilon(1e-13));
  }
}

TEST_CASE("bivariate normal cdf matches reference values") {
  struct Row { double h, k, r, v; };
  const Row rows[] = {
      {0.0, 0.0, 0.0, 0.25},
      {0.0, 0.0, 0.5, 1.0 / 3.0},
      {0.0, 0.0, -0.5, 0.16666666666666669},
      {1.0, -0.5, 0.3, 0.28313842024448105},
      {-1.2, 0.7, -0.8, 0.019676583805697978},
      {2.0, 2.0, 0.95, 0.97052421980790815},
      {-2.0, 1.0, 0.99, 0.022750131948179229},
      {0.3, -0.2, -0.999, 0.038727952002828289},
      {1.5, 1.5, 0.0, 0.87084879960366157},
      {-0.43072729929545761, -0.43072729929545761, 0.6, 0.19979592705169436},
  };
  for (const auto& r : rows) {
    CHECK(normal::bvn_cdf(r.h, r.k, r.r) == doctest::Approx(r.v).epsilon(1e-12));
  }
}

TEST_CASE("bivariate cdf limits: independence and comonotone") {
  CHECK(normal::bvn_cdf(0.7, 1.1, 0.0) ==
        doctest::Approx(normal::cdf(0.7) * normal::cdf(1.1)).epsilon(1e-13));
  CHECK(normal::bvn_cdf(0.7, 1.1, 0.999999) ==
        doctest::Approx(normal::cdf(0.7)).epsilon(1e-4));
}
