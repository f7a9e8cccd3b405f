#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "aitc/errors.hpp"
#include "aitc/fixtures.hpp"
#include "aitc/propensity.hpp"

using namespace aitc;

namespace {

// pooled trial-membership design: AC rows (T=1) stacked on BC rows (T=0)
std::pair<linalg::Matrix, std::vector<double>> pooled_race() {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const IpdTrial bc = fixtures::hypothetical_bc();
  linalg::Matrix x(ac.n() + bc.n(), 1);
  std::vector<double> t(ac.n() + bc.n(), 0.0);
  for (std::size_t i = 0; i < ac.n(); ++i) {
    x(i, 0) = ac.records[i].covariates[0];
    t[i] = 1.0;
  }
  for (std::size_t i = 0; i < bc.n(); ++i) {
    x(ac.n() + i, 0) = bc.records[i].covariates[0];
  }
  return {x, t};
}

double loglik(const linalg::Matrix& x, const std::vector<double>& t,
              const std::vector<double>& beta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double eta = beta[0];
    for (std::size_t j = 0; j < x.cols(); ++j) eta += beta[j + 1] * x(i, j);
    ll += t[i] * eta - std::log1p(std::exp(eta));
  }
  return ll;
}

}  // namespace

TEST_CASE("saturated race model reproduces the stratum proportions") {
  const auto [x, t] = pooled_race();
  const PropensityModel m = fit_logistic(x, t);
  CHECK(m.converged);
  CHECK(predict(m, std::vector<double>{1.0}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(predict(m, std::vector<double>{0.0}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("intercept-only fit equals the sample proportion") {
  linalg::Matrix x(10, 0);
  std::vector<double> t = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  const PropensityModel m = fit_logistic(x, t);
  CHECK(m.coefficients.size() == 1);
  CHECK(predict(m, std::vector<double>{}) == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("single-class labels are rejected") {
  linalg::Matrix x(5, 1);
  std::vector<double> ones(5, 1.0);
  CHECK_THROWS_AS(fit_logistic(x, ones), std::invalid_argument);
}

TEST_CASE("complete separation raises SeparationError") {
  const std::size_t n = 40;
  linalg::Matrix x(n, 1);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i);
    t[i] = i < n / 2 ? 0.0 : 1.0;  // perfectly separated at the midpoint
  }
  CHECK_THROWS_AS(fit_logistic(x, t), SeparationError);
}

TEST_CASE("zero-variance covariate is rejected with its index") {
  linalg::Matrix x(6, 1);
  for (std::size_t i = 0; i < 6; ++i) x(i, 0) = 2.5;
  std::vector<double> t = {1, 0, 1, 0, 1, 0};
  CHECK_THROWS_WITH_AS(fit_logistic(x, t),
                       doctest::Contains("zero-variance covariate at index 0"),
                       std::invalid_argument);
}

TEST_CASE("label swap negates coefficients and flips predictions") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution bd(0.5);
  const std::size_t n = 300;
  linalg::Matrix x(n, 2);
  std::vector<double> t(n), t_flip(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = nd(rng);
    x(i, 1) = bd(rng) ? 1.0 : 0.0;
    const double eta = -0.3 + 0.8 * x(i, 0) - 0.5 * x(i, 1);
    t[i] = std::bernoulli_distribution(1.0 / (1.0 + std::exp(-eta)))(rng) ? 1.0 : 0.0;
    t_flip[i] = 1.0 - t[i];
  }
  const PropensityModel m = fit_logistic(x, t);
  const PropensityModel mf = fit_logistic(x, t_flip);
  for (std::size_t j = 0; j < m.coefficients.size(); ++j) {
    CHECK(m.coefficients[j] == doctest::Approx(-mf.coefficients[j]).epsilon(1e-6));
  }
  const std::vector<double> probe = {0.4, 1.0};
  CHECK(predict(m, probe) + predict(mf, probe) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("analytic score matches central finite differences") {
  const auto [x, t] = pooled_race();
  const PropensityModel m = fit_logistic(x, t);
  // probe near the optimum where the score components are O(n)
  std::vector<double> beta = m.coefficients;
  beta[0] += 0.15;
  beta[1] -= 0.2;
  std::vector<double> score(beta.size(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double eta = beta[0] + beta[1] * x(i, 0);
    const double mu = 1.0 / (1.0 + std::exp(-eta));
    score[0] += t[i] - mu;
    score[1] += (t[i] - mu) * x(i, 0);
  }
  const double h = 1e-5;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    auto bp = beta, bm = beta;
    bp[j] += h;
    bm[j] -= h;
    const double fd = (loglik(x, t, bp) - loglik(x, t, bm)) / (2.0 * h);
    CHECK(std::abs(fd - score[j]) <= 1e-5 * std::max(1.0, std::abs(score[j])));
  }
  // and at the returned optimum both are numerically zero
  CHECK(m.max_score <= 1e-8);
}

TEST_CASE("predictions are invariant under affine covariate rescaling") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const std::size_t n = 200;
  linalg::Matrix x(n, 1), xr(n, 1);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = nd(rng) * 2.0 + 1.0;
    xr(i, 0) = 1000.0 * x(i, 0) - 377.0;  // affine rescale
    const double eta = 0.4 - 0.7 * x(i, 0);
    t[i] = std::bernoulli_distribution(1.0 / (1.0 + std::exp(-eta)))(rng) ? 1.0 : 0.0;
  }
  const PropensityModel m = fit_logistic(x, t);
  const PropensityModel mr = fit_logistic(xr, t);
  for (std::size_t i = 0; i < 10; ++i) {
    const std::vector<double> a = {x(i, 0)};
    const std::vector<double> b = {xr(i, 0)};
    CHECK(predict(m, a) == doctest::Approx(predict(mr, b)).epsilon(1e-8));
  }
}

TEST_CASE("predict rejects dimension mismatch and stays inside (0,1)") {
  PropensityModel m;
  m.coefficients = {0.0, 100.0};
  CHECK_THROWS_AS(predict(m, std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
  CHECK(predict(m, std::vector<double>{1000.0}) < 1.0);
  CHECK(predict(m, std::vector<double>{-1000.0}) > 0.0);
  PropensityModel zero;
  zero.coefficients = {0.0, 0.0, 0.0};
  CHECK(predict(zero, std::vector<double>{3.0, -4.0}) == 0.5);
}

TEST_CASE("exact discrete propensity: table values, symmetry, positivity") {
  const StratumCounts counts[] = {{"Black", 400, 800}, {"non-Black", 800, 400}};
  const auto eps = exact_discrete_propensity(counts);
  CHECK(eps[0].epsilon == 1.0 / 3.0);
  CHECK(eps[1].epsilon == 2.0 / 3.0);
  CHECK_FALSE(eps[0].positivity_warning);

  const StratumCounts equal[] = {{"s", 17, 17}};
  CHECK(exact_discrete_propensity(equal)[0].epsilon == 0.5);

  const StratumCounts absent[] = {{"s", 0, 50}};
  const auto w = exact_discrete_propensity(absent);
  CHECK(w[0].epsilon == 0.0);
  CHECK(w[0].positivity_warning);

  const StratumCounts empty[] = {{"s", 0, 0}};
  CHECK_THROWS_AS(exact_discrete_propensity(empty), std::invalid_argument);
}

TEST_CASE("label-swap symmetry is exact for the discrete formula") {
  const StratumCounts counts[] = {{"a", 3, 11}, {"b", 9, 2}};
  const StratumCounts swapped[] = {{"a", 11, 3}, {"b", 2, 9}};
  const auto e1 = exact_discrete_propensity(counts);
  const auto e2 = exact_discrete_propensity(swapped);
  // exact up to one rounding of the ratio
  CHECK(e1[0].epsilon == doctest::Approx(1.0 - e2[0].epsilon).epsilon(1e-15));
  CHECK(e1[1].epsilon == doctest::Approx(1.0 - e2[1].epsilon).epsilon(1e-15));
}

TEST_CASE("saturated logistic matches the discrete formula on two strata") {
  const auto [x, t] = pooled_race();
  const PropensityModel m = fit_logistic(x, t);
  const StratumCounts counts[] = {{"Black", 400, 800}, {"non-Black", 800, 400}};
  const auto eps = exact_discrete_propensity(counts);
  CHECK(predict(m, std::vector<double>{1.0}) ==
        doctest::Approx(eps[0].epsilon).epsilon(1e-8));
  CHECK(predict(m, std::vector<double>{0.0}) ==
        doctest::Approx(eps[1].epsilon).epsilon(1e-8));
}

TEST_CASE("iteration cap reports non-convergence instead of throwing") {
  const auto [x, t] = pooled_race();
  LogisticFitOptions opts;
  opts.max_iterations = 1;
  const PropensityModel m = fit_logistic(x, t, opts);
  CHECK_FALSE(m.converged);
  CHECK(m.max_score > opts.tolerance);
}

TEST_CASE("model JSON round trip") {
  const auto [x, t] = pooled_race();
  const PropensityModel m = fit_logistic(x, t);
  const PropensityModel back = PropensityModel::from_json(m.to_json());
  CHECK(back.coefficients == m.coefficients);
  CHECK(back.converged == m.converged);
  CHECK(back.iterations == m.iterations);
}
