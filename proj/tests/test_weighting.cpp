#include <doctest.h>

#include <cmath>
#include <random>

#include "aitc/errors.hpp"
#include "aitc/fixtures.hpp"
#include "aitc/kernels.hpp"
#include "aitc/weighting.hpp"

using namespace aitc;

TEST_CASE("tilt family") {
  std::vector<double> eps = {0.2, 1.0 / 3.0, 0.7};
  CHECK(tilt(EstimandKind::ATE, eps) == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(tilt(EstimandKind::ATT, eps) == eps);
  const auto atc = tilt(EstimandKind::ATC, eps);
  CHECK(atc[0] == doctest::Approx(0.8));
  const auto ato = tilt(EstimandKind::ATO, eps);
  CHECK(ato[1] == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  for (double h : ato) CHECK(h <= 0.25);
  CHECK_THROWS_AS(tilt_value(EstimandKind::ATO, 1.2), std::invalid_argument);
}

TEST_CASE("ess: table values and bounds") {
  // 400 weights of 1/600 plus 800 of 1/2400
  std::vector<double> w(1200);
  for (std::size_t i = 0; i < 1200; ++i)
    w[i] = i < 400 ? 1.0 / 600.0 : 1.0 / 2400.0;
  CHECK(effective_sample_size(w) == doctest::Approx(800.0).epsilon(1e-12));

  CHECK(effective_sample_size(std::vector<double>(17, 0.25)) ==
        doctest::Approx(17.0));
  std::vector<double> single(9, 0.0);
  single[4] = 1.0;
  CHECK(effective_sample_size(single) == doctest::Approx(1.0));
}

TEST_CASE("ess equals n only for constant weights") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<double> w(50);
  for (double& v : w) v = u(rng);
  CHECK(effective_sample_size(w) < 50.0);
  CHECK(effective_sample_size(w) >= 1.0);
}

TEST_CASE("maic weights reproduce the worked example: 1/600 and 1/2400") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const WeightVector w =
      maic_weights(ac.covariate_matrix(), std::vector<double>{2.0 / 3.0});
  for (std::size_t i = 0; i < ac.n(); ++i) {
    const double expected =
        ac.records[i].covariates[0] == 1.0 ? 1.0 / 600.0 : 1.0 / 2400.0;
    REQUIRE(w.weights[i] == doctest::Approx(expected).epsilon(1e-10));
  }
  CHECK(w.ess == doctest::Approx(800.0).epsilon(1e-9));
  CHECK(kernels::sum(w.weights) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("targets at the sample means give uniform weights") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const WeightVector w =
      maic_weights(ac.covariate_matrix(), std::vector<double>{1.0 / 3.0});
  for (double v : w.weights) {
    CHECK(v == doctest::Approx(1.0 / 1200.0).epsilon(1e-10));
  }
}

TEST_CASE("two binary covariates: moment match verified by direct summation "
          "and alpha cross-checked by grid search") {
  // all 8 rows of {0,1}^3 projected to 2 covariates, with duplicates
  linalg::Matrix x(8, 2);
  const double rows[8][2] = {{0, 0}, {0, 0}, {0, 1}, {0, 1},
                             {1, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int i = 0; i < 8; ++i) {
    x(i, 0) = rows[i][0];
    x(i, 1) = rows[i][1];
  }
  const std::vector<double> target = {0.5, 0.25};
  const WeightVector w = maic_weights(x, target);
  double m0 = 0.0, m1 = 0.0;
  for (int i = 0; i < 8; ++i) {
    m0 += w.weights[i] * x(i, 0);
    m1 += w.weights[i] * x(i, 1);
  }
  CHECK(m0 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(m1 == doctest::Approx(0.25).epsilon(1e-9));

  // independent oracle: coarse-to-fine grid search over the tilt (a0, a1)
  double best_a0 = 0.0, best_a1 = 0.0, best_res = 1e300;
  double lo0 = -6.0, hi0 = 6.0, lo1 = -6.0, hi1 = 6.0;
  for (int refine = 0; refine < 6; ++refine) {
    const int g = 41;
    for (int i0 = 0; i0 < g; ++i0) {
      for (int i1 = 0; i1 < g; ++i1) {
        const double a0 = lo0 + (hi0 - lo0) * i0 / (g - 1);
        const double a1 = lo1 + (hi1 - lo1) * i1 / (g - 1);
        double s = 0.0, s0 = 0.0, s1 = 0.0;
        for (int i = 0; i < 8; ++i) {
          const double wi =
              std::exp(a0 * (x(i, 0) - 0.5) + a1 * (x(i, 1) - 0.25));
          s += wi;
          s0 += wi * (x(i, 0) - 0.5);
          s1 += wi * (x(i, 1) - 0.25);
        }
        const double res = std::max(std::abs(s0 / s), std::abs(s1 / s));
        if (res < best_res) {
          best_res = res;
          best_a0 = a0;
          best_a1 = a1;
        }
      }
    }
    const double w0 = (hi0 - lo0) / 8.0, w1 = (hi1 - lo1) / 8.0;
    lo0 = best_a0 - w0; hi0 = best_a0 + w0;
    lo1 = best_a1 - w1; hi1 = best_a1 + w1;
  }
  // grid optimum implies the same weights as the Newton solver
  std::vector<double> wg(8);
  double sg = 0.0;
  for (int i = 0; i < 8; ++i) {
    wg[i] = std::exp(best_a0 * (x(i, 0) - 0.5) + best_a1 * (x(i, 1) - 0.25));
    sg += wg[i];
  }
  for (int i = 0; i < 8; ++i) {
    CHECK(wg[i] / sg == doctest::Approx(w.weights[i]).epsilon(1e-4));
  }
}

TEST_CASE("infeasible targets raise InfeasibleTargetError") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  CHECK_THROWS_AS(
      maic_weights(ac.covariate_matrix(), std::vector<double>{1.2}),
      InfeasibleTargetError);
  // zero-variance covariate whose target differs from the constant
  linalg::Matrix x(5, 1);
  for (int i = 0; i < 5; ++i) x(i, 0) = 1.0;
  CHECK_THROWS_AS(maic_weights(x, std::vector<double>{0.5}),
                  InfeasibleTargetError);
  // but a matching constant target is trivially satisfied
  const WeightVector w = maic_weights(x, std::vector<double>{1.0});
  for (double v : w.weights) CHECK(v == doctest::Approx(0.2));
}

TEST_CASE("randomized moment-matching property: 100 feasible instances") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 40 + rng() % 200;
    const std::size_t p = 1 + rng() % 5;
    linalg::Matrix x(n, p);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> nd;
    std::vector<bool> binary(p);
    for (std::size_t j = 0; j < p; ++j) binary[j] = rng() % 2 == 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j)
        x(i, j) = binary[j] ? (u01(rng) < 0.5 ? 1.0 : 0.0) : nd(rng);
    // feasible target: weighted mean under random positive weights
    std::vector<double> t(p, 0.0), v(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = 0.05 + u01(rng);
      s += v[i];
    }
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t i = 0; i < n; ++i) t[j] += v[i] * x(i, j);
      t[j] /= s;
    }
    const WeightVector w = maic_weights(x, t);
    for (std::size_t j = 0; j < p; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i) m += w.weights[i] * x(i, j);
      REQUIRE(std::abs(m - t[j]) <= 1e-8);
    }
  }
}

TEST_CASE("variance matching augments the solve") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(0.0, 1.5);
  const std::size_t n = 400;
  linalg::Matrix x(n, 1);
  for (std::size_t i = 0; i < n; ++i) x(i, 0) = nd(rng);
  const std::vector<CovariateSpec> specs = {{"x", CovariateKind::continuous}};
  const std::vector<double> means = {0.3}, vars = {1.0};
  const WeightVector w =
      maic_weights_matching_variances(x, means, vars, specs);
  double m = 0.0, v = 0.0;
  for (std::size_t i = 0; i < n; ++i) m += w.weights[i] * x(i, 0);
  for (std::size_t i = 0; i < n; ++i)
    v += w.weights[i] * (x(i, 0) - 0.3) * (x(i, 0) - 0.3);
  CHECK(m == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("overlap weights from the worked example") {
  const std::vector<double> eps = {1.0 / 3.0, 2.0 / 3.0};
  const WeightVector w1 = overlap_weights(eps, OverlapSide::ipd_trial_is_t1);
  CHECK(w1.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w1.weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w1.normalization == Normalization::raw);
  const WeightVector w0 = overlap_weights(eps, OverlapSide::ipd_trial_is_t0);
  CHECK(w0.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w0.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const std::vector<double> half = {0.5, 0.5, 0.5};
  CHECK(overlap_weights(half, OverlapSide::ipd_trial_is_t1).weights ==
        overlap_weights(half, OverlapSide::ipd_trial_is_t0).weights);

  CHECK_THROWS_AS(overlap_weights(std::vector<double>{1.2},
                                  OverlapSide::ipd_trial_is_t1),
                  std::invalid_argument);
}

TEST_CASE("overlap weights equal tilt(ATO)/e and tilt(ATO)/(1-e)") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<double> eps(64);
  for (double& e : eps) e = u(rng);
  const auto h = tilt(EstimandKind::ATO, eps);
  const auto w1 = overlap_weights(eps, OverlapSide::ipd_trial_is_t1);
  const auto w0 = overlap_weights(eps, OverlapSide::ipd_trial_is_t0);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    CHECK(w1.weights[i] == doctest::Approx(h[i] / eps[i]).epsilon(1e-12));
    CHECK(w0.weights[i] ==
          doctest::Approx(h[i] / (1.0 - eps[i])).epsilon(1e-12));
  }
}

TEST_CASE("weighted covariate summary: worked example values") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const WeightVector maic =
      maic_weights(ac.covariate_matrix(), std::vector<double>{2.0 / 3.0});
  CHECK(weighted_covariate_summary(ac, maic).covariate_means[0] ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  std::vector<double> om1(ac.n());
  for (std::size_t i = 0; i < ac.n(); ++i)
    om1[i] = ac.records[i].covariates[0] == 1.0 ? 2.0 / 3.0 : 1.0 / 3.0;
  const WeightVector w1 = WeightVector::make(om1, Normalization::raw);
  CHECK(weighted_covariate_summary(ac, w1).covariate_means[0] ==
        doctest::Approx(0.5).epsilon(1e-12));

  CHECK(weighted_covariate_summary(ac, WeightVector::uniform(ac.n()))
            .covariate_means[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("balance theorem: omega-weighted stratum shares coincide across "
          "trials under exact discrete propensities") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    // two binary covariates -> 4 strata with random counts per trial
    std::vector<double> n1(4), n0(4);
    for (int s = 0; s < 4; ++s) {
      n1[s] = 5.0 + static_cast<double>(rng() % 200);
      n0[s] = 5.0 + static_cast<double>(rng() % 200);
    }
    double tot1 = 0.0, tot0 = 0.0;
    std::vector<double> m1(4), m0(4);
    for (int s = 0; s < 4; ++s) {
      const double eps = n1[s] / (n1[s] + n0[s]);
      m1[s] = n1[s] * (1.0 - eps);
      m0[s] = n0[s] * eps;
      tot1 += m1[s];
      tot0 += m0[s];
    }
    for (int s = 0; s < 4; ++s) {
      REQUIRE(std::abs(m1[s] / tot1 - m0[s] / tot0) <= 1e-12);
    }
  }
}

TEST_CASE("weight vector validation and normalizations") {
  CHECK_THROWS_AS(WeightVector::make({1.0, -0.5}, Normalization::raw),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightVector::make({0.0, 0.0}, Normalization::raw),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightVector::make({}, Normalization::raw),
                  std::invalid_argument);
  const WeightVector mean1 = WeightVector::make({1.0, 3.0}, Normalization::mean_one);
  CHECK(mean1.weights[0] == doctest::Approx(0.5));
  CHECK(mean1.weights[1] == doctest::Approx(1.5));
  const WeightVector raw = WeightVector::make({1.0, 3.0}, Normalization::raw);
  CHECK(raw.weights == std::vector<double>{1.0, 3.0});
  CHECK(raw.ess == doctest::Approx(1.6));
}

TEST_CASE("weights JSON round trip carries ids, normalization, ess") {
  const WeightVector w = WeightVector::make({0.25, 0.5}, Normalization::raw);
  const std::vector<std::string> ids = {"s1", "s2"};
  const auto j = w.to_json(ids);
  CHECK(j.at("subject_ids")[1] == "s2");
  const WeightVector back = WeightVector::from_json(j);
  CHECK(back.weights == w.weights);
  CHECK(back.ess == doctest::Approx(w.ess));
}
