#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "aitc/kernels.hpp"

using namespace aitc;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n,
                               double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

constexpr std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9,
                                    15, 16, 17, 31, 33, 1000, 4097};

}  // namespace

TEST_CASE("scalar reductions match straightforward accumulation") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.5};
  std::vector<double> y = {2.0, -1.0, 0.5, 2.0};
  std::vector<double> z = {1.0, 1.0, 2.0, 0.0};
  kernels::set_backend(kernels::Backend::scalar);
  CHECK(kernels::sum(x) == doctest::Approx(10.5));
  CHECK(kernels::dot(x, y) == doctest::Approx(2.0 - 2.0 + 1.5 + 9.0));
  CHECK(kernels::dot3(x, y, z) == doctest::Approx(2.0 - 2.0 + 3.0 + 0.0));
}

TEST_CASE("logistic kernel: values, clamping, symmetry") {
  kernels::set_backend(kernels::Backend::scalar);
  std::vector<double> eta = {0.0, 1.0, -1.0, 40.0, -40.0, 800.0, -800.0,
                             std::log(2.0)};
  std::vector<double> p(eta.size());
  kernels::logistic(eta, p);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(p[1] + p[2] == doctest::Approx(1.0));
  CHECK(p[7] == doctest::Approx(2.0 / 3.0));
  for (double v : p) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  CHECK(p[5] == 1.0 - kernels::kProbFloor);
  CHECK(p[6] == kernels::kProbFloor);
}

TEST_CASE("avx2 variants agree with the scalar reference") {
  if (!kernels::avx2_supported()) {
    MESSAGE("avx2 not available on this host; equivalence suite skipped");
    return;
  }
  std::mt19937_64 rng(12345);
  for (std::size_t n : kLengths) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    const auto z = random_vec(rng, n, 0.0, 2.0);

    kernels::set_backend(kernels::Backend::scalar);
    const double s_sum = kernels::sum(x);
    const double s_dot = kernels::dot(x, y);
    const double s_dot3 = kernels::dot3(x, y, z);
    std::vector<double> s_log(n);
    kernels::logistic(x, s_log);

    kernels::set_backend(kernels::Backend::avx2);
    const double v_sum = kernels::sum(x);
    const double v_dot = kernels::dot(x, y);
    const double v_dot3 = kernels::dot3(x, y, z);
    std::vector<double> v_log(n);
    kernels::logistic(x, v_log);
    kernels::set_backend(kernels::Backend::scalar);

    // tolerance scaled by the sum of absolute terms (reassociation bound)
    double cond_sum = 0.0, cond_dot = 0.0, cond_dot3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cond_sum += std::abs(x[i]);
      cond_dot += std::abs(x[i] * y[i]);
      cond_dot3 += std::abs(x[i] * y[i] * z[i]);
    }
    CHECK(std::abs(v_sum - s_sum) <= 1e-13 * (1.0 + cond_sum));
    CHECK(std::abs(v_dot - s_dot) <= 1e-13 * (1.0 + cond_dot));
    CHECK(std::abs(v_dot3 - s_dot3) <= 1e-13 * (1.0 + cond_dot3));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(v_log[i] - s_log[i]) <= 5e-16);
    }
  }
}

TEST_CASE("avx2 logistic across the full argument range") {
  if (!kernels::avx2_supported()) return;
  std::vector<double> eta, s_p, v_p;
  for (double v = -60.0; v <= 60.0; v += 0.0103) eta.push_back(v);
  s_p.resize(eta.size());
  v_p.resize(eta.size());
  kernels::set_backend(kernels::Backend::scalar);
  kernels::logistic(eta, s_p);
  kernels::set_backend(kernels::Backend::avx2);
  kernels::logistic(eta, v_p);
  kernels::set_backend(kernels::Backend::scalar);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    CHECK(std::abs(v_p[i] - s_p[i]) <= 5e-16);
  }
}

TEST_CASE("backend selection is sticky and queryable") {
  const auto original = kernels::active_backend();
  kernels::set_backend(kernels::Backend::scalar);
  CHECK(kernels::backend_name() == "scalar");
  if (kernels::avx2_supported()) {
    kernels::set_backend(kernels::Backend::avx2);
    CHECK(kernels::backend_name() == "avx2");
  }
  kernels::set_backend(original);
}
