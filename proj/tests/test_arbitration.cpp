#include <doctest.h>

#include <cmath>

#include "aitc/arbitration.hpp"
#include "aitc/errors.hpp"
#include "aitc/fixtures.hpp"
#include "aitc/json_canon.hpp"
#include "aitc/simharness.hpp"

using namespace aitc;

namespace {

ArbitrationConfig protocol1_config() {
  ArbitrationConfig c;
  c.protocol = ArbitrationConfig::Protocol::ipd_shared;
  c.covariates = {{"black", CovariateKind::binary}};
  return c;
}

ArbitrationConfig protocol2_config(std::uint64_t seed) {
  ArbitrationConfig c;
  c.protocol = ArbitrationConfig::Protocol::covariate_simulation;
  c.covariates = {{"black", CovariateKind::binary}};
  c.covgen_source = CorrelationSource::published;
  c.covgen_rounding = BinaryRounding::exact_count;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("config validation: protocol invariants") {
  ArbitrationConfig c = protocol1_config();
  CHECK_NOTHROW(c.validate());
  c.seed = 42;
  CHECK_THROWS_AS(c.validate(), SchemaError);

  ArbitrationConfig c2 = protocol2_config(9);
  CHECK_NOTHROW(c2.validate());
  c2.seed.reset();
  CHECK_THROWS_AS(c2.validate(), SchemaError);

  ArbitrationConfig c3 = protocol1_config();
  c3.estimand = EstimandKind::ATT;
  CHECK_THROWS_AS(c3.validate(), SchemaError);

  ArbitrationConfig c4 = protocol1_config();
  c4.propensity_covariates = {"unknown"};
  CHECK_THROWS_AS(c4.validate(), SchemaError);
}

TEST_CASE("config hash is stable and sensitive") {
  const ArbitrationConfig a = protocol1_config();
  const ArbitrationConfig b = protocol1_config();
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 64);
  ArbitrationConfig c = protocol2_config(1);
  ArbitrationConfig d = protocol2_config(2);
  CHECK(c.hash() != d.hash());
  CHECK(a.hash() != c.hash());

  const ArbitrationConfig back = ArbitrationConfig::from_json(a.to_json());
  CHECK(back.hash() == a.hash());
}

TEST_CASE("canonical JSON: sorted keys and 17-digit floats") {
  nlohmann::json j;
  j["zeta"] = 1.0 / 3.0;
  j["alpha"] = {{"b", 2}, {"a", true}};
  const std::string s = canonical_json_dump(j);
  CHECK(s ==
        "{\"alpha\":{\"a\":true,\"b\":2},\"zeta\":0.33333333333333331}");
  CHECK(canonical_json_sha256(j) == canonical_json_sha256(j));
}

TEST_CASE("arbitrate_ipd reproduces the worked-example weights packages") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const IpdTrial bc = fixtures::hypothetical_bc();
  const ArbitrationConfig config = protocol1_config();
  const auto [pa, pb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                      CovariateSet::from_trial(bc), config);
  CHECK(pa.recipient == "sponsorA");
  CHECK(pa.trial_id == "AC");
  CHECK(pa.subject_ids.size() == 1200);
  CHECK(pa.config_hash == config.hash());
  for (std::size_t i = 0; i < ac.n(); ++i) {
    const double expected =
        ac.records[i].covariates[0] == 1.0 ? 2.0 / 3.0 : 1.0 / 3.0;
    REQUIRE(pa.weights[i] == doctest::Approx(expected).epsilon(1e-8));
  }
  for (std::size_t i = 0; i < bc.n(); ++i) {
    const double expected =
        bc.records[i].covariates[0] == 1.0 ? 1.0 / 3.0 : 2.0 / 3.0;
    REQUIRE(pb.weights[i] == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("identical covariate distributions give all weights 1/2") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  IpdTrial mirror = ac;
  mirror.trial_id = "BC";
  mirror.arms = {"B", "C"};
  for (auto& rec : mirror.records) {
    rec.id = "BC" + rec.id.substr(2);
    if (rec.arm == "A") rec.arm = "B";
  }
  const auto [pa, pb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                      CovariateSet::from_trial(mirror),
                                      protocol1_config());
  for (double w : pa.weights) CHECK(w == doctest::Approx(0.5).epsilon(1e-8));
  for (double w : pb.weights) CHECK(w == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("covariate list mismatch is a protocol error") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  IpdTrial bc = fixtures::hypothetical_bc();
  bc.covariates[0].name = "race";
  CHECK_THROWS_AS(arbitrate_ipd(CovariateSet::from_trial(ac),
                                CovariateSet::from_trial(bc),
                                protocol1_config()),
                  ProtocolError);
}

TEST_CASE("sponsor_run: worked-example estimates and guard rails") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const IpdTrial bc = fixtures::hypothetical_bc();
  const ArbitrationConfig config = protocol1_config();
  auto [pa, pb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                CovariateSet::from_trial(bc), config);

  const ResultsPackage ra = sponsor_run(ac, pa, config);
  CHECK(ra.sender == "sponsorA");
  CHECK(ra.estimate.estimand == "ATO");
  CHECK(ra.estimate.point == doctest::Approx(1.2992830).epsilon(1e-6));
  CHECK(ra.estimate.se.has_value());
  CHECK(ra.balance_means[0] == doctest::Approx(0.5).epsilon(1e-8));

  const ResultsPackage rb = sponsor_run(bc, pb, config);
  CHECK(rb.estimate.point == doctest::Approx(1.2992830).epsilon(1e-6));
  CHECK(rb.balance_means[0] == doctest::Approx(0.5).epsilon(1e-8));

  // uniform weights package reproduces the unweighted trial logOR
  WeightsPackage uniform = pa;
  std::fill(uniform.weights.begin(), uniform.weights.end(), 1.0);
  CHECK(sponsor_run(ac, uniform, config).estimate.point ==
        doctest::Approx(1.1180304).epsilon(1e-6));

  // wrong recipient
  WeightsPackage wrong = pb;
  CHECK_THROWS_AS(sponsor_run(ac, wrong, config), ProtocolError);
  // stale hash
  WeightsPackage stale = pa;
  stale.config_hash = "0000";
  CHECK_THROWS_AS(sponsor_run(ac, stale, config), ProtocolError);
  // misaligned ids
  WeightsPackage shuffled = pa;
  std::swap(shuffled.subject_ids[0], shuffled.subject_ids[1]);
  CHECK_THROWS_AS(sponsor_run(ac, shuffled, config), ProtocolError);
}

TEST_CASE("protocol-1 balance summaries agree across sponsors (saturated)") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const IpdTrial bc = fixtures::hypothetical_bc();
  const ArbitrationConfig config = protocol1_config();
  auto [pa, pb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                CovariateSet::from_trial(bc), config);
  const ResultsPackage ra = sponsor_run(ac, pa, config);
  const ResultsPackage rb = sponsor_run(bc, pb, config);
  REQUIRE(ra.balance_means.size() == rb.balance_means.size());
  for (std::size_t j = 0; j < ra.balance_means.size(); ++j) {
    CHECK(std::abs(ra.balance_means[j] - rb.balance_means[j]) <= 1e-10);
  }
}

TEST_CASE("arbitrator_combine: zero difference, error paths") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const IpdTrial bc = fixtures::hypothetical_bc();
  const ArbitrationConfig config = protocol1_config();
  auto [pa, pb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                CovariateSet::from_trial(bc), config);
  const ResultsPackage ra = sponsor_run(ac, pa, config);
  const ResultsPackage rb = sponsor_run(bc, pb, config);
  const EffectEstimate final_est = arbitrator_combine(ra, rb);
  CHECK(std::abs(final_est.point) <= 1e-10);
  CHECK(*final_est.se ==
        doctest::Approx(std::hypot(*ra.estimate.se, *rb.estimate.se)));

  ResultsPackage tampered = rb;
  tampered.config_hash = "beef";
  CHECK_THROWS_AS(arbitrator_combine(ra, tampered), ProtocolError);

  ResultsPackage not_ato = rb;
  not_ato.estimate.estimand = "trial-matched";
  CHECK_THROWS_AS(arbitrator_combine(ra, not_ato), ProtocolError);

  CHECK_THROWS_AS(arbitrator_combine(rb, ra), ProtocolError);  // swapped roles
}

TEST_CASE("role symmetry: relabeling the trials negates the estimate") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const IpdTrial bc = fixtures::hypothetical_bc();
  const ArbitrationConfig config = protocol1_config();

  auto run_both = [&](const IpdTrial& t1, const IpdTrial& t0) {
    auto [p1, p0] = arbitrate_ipd(CovariateSet::from_trial(t1),
                                  CovariateSet::from_trial(t0), config);
    return arbitrator_combine(sponsor_run(t1, p1, config),
                              sponsor_run(t0, p0, config));
  };
  const EffectEstimate forward = run_both(ac, bc);

  // relabel: BC plays the T=1 role
  IpdTrial ac_as_bc = ac;
  ac_as_bc.trial_id = "BC";
  for (auto& r : ac_as_bc.records) r.id = "X" + r.id;
  IpdTrial bc_as_ac = bc;
  bc_as_ac.trial_id = "AC";
  for (auto& r : bc_as_ac.records) r.id = "Y" + r.id;
  const EffectEstimate reversed = run_both(bc_as_ac, ac_as_bc);

  CHECK(std::abs(forward.point + reversed.point) <= 1e-10);
  CHECK(*forward.se == doctest::Approx(*reversed.se).epsilon(1e-10));
}

TEST_CASE("selfservice protocol reproduces protocol 1 exactly on the "
          "single-binary example") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const IpdTrial bc = fixtures::hypothetical_bc();
  const AgdSummary ac_agd = summarize_ipd(ac);
  const AgdSummary bc_agd = summarize_ipd(bc);

  const ArbitrationConfig c1 = protocol1_config();
  auto [pa, pb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                CovariateSet::from_trial(bc), c1);
  const double p1_ac = sponsor_run(ac, pa, c1).estimate.point;
  const double p1_bc = sponsor_run(bc, pb, c1).estimate.point;

  for (std::uint64_t seed : {1ULL, 42ULL, 7777ULL}) {
    const ArbitrationConfig c2 = protocol2_config(seed);
    const ResultsPackage ra = sponsor_run_selfservice(ac, bc_agd, c2);
    const ResultsPackage rb = sponsor_run_selfservice(bc, ac_agd, c2);
    CHECK(ra.estimate.point == doctest::Approx(p1_ac).epsilon(1e-12));
    CHECK(rb.estimate.point == doctest::Approx(p1_bc).epsilon(1e-12));
    REQUIRE(ra.covariate_matrix_hash.has_value());
    const EffectEstimate final_est = arbitrator_combine(ra, rb);
    CHECK(std::abs(final_est.point) <= 1e-12);
  }
}

TEST_CASE("selfservice falls back to borrowed covariance when the "
          "counterpart publishes means only") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  AgdSummary bc_agd = summarize_ipd(fixtures::hypothetical_bc());
  bc_agd.covariance.reset();
  const ArbitrationConfig c2 = protocol2_config(5);
  const ResultsPackage ra = sponsor_run_selfservice(ac, bc_agd, c2);
  CHECK(ra.estimate.point == doctest::Approx(1.2992830).epsilon(1e-6));
}

TEST_CASE("selfservice on identical populations gives the unweighted limit") {
  // counterpart AgD equal to own summary: propensities ~1/2, estimate ~raw
  const ScenarioSpec spec = fixtures::continuous_scenario(5000, 1, 99);
  const auto [ac, bc_unused] = simulate_pair(spec, 0);
  AgdSummary own_agd = summarize_ipd(ac);
  own_agd.trial_id = "BC";
  own_agd.arms = {"B", "C"};
  ArbitrationConfig c2;
  c2.protocol = ArbitrationConfig::Protocol::covariate_simulation;
  c2.covariates = spec.covariates;
  c2.covgen_source = CorrelationSource::published;
  c2.seed = 31;
  const ResultsPackage ra = sponsor_run_selfservice(ac, own_agd, c2);
  const double raw =
      weighted_contrast(ac, WeightVector::uniform(ac.n()),
                        EffectScale::log_odds_ratio).point;
  CHECK(std::abs(ra.estimate.point - raw) <= 0.05);
}

TEST_CASE("selfservice rejects the wrong protocol and missing seed") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const AgdSummary bc_agd = summarize_ipd(fixtures::hypothetical_bc());
  CHECK_THROWS_AS(sponsor_run_selfservice(ac, bc_agd, protocol1_config()),
                  ProtocolError);
}

TEST_CASE("packages survive their JSON round trips") {
  const IpdTrial ac = fixtures::hypothetical_ac();
  const IpdTrial bc = fixtures::hypothetical_bc();
  const ArbitrationConfig config = protocol1_config();
  auto [pa, pb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                CovariateSet::from_trial(bc), config);
  const WeightsPackage wp = WeightsPackage::from_json(pa.to_json());
  CHECK(wp.recipient == pa.recipient);
  CHECK(wp.weights == pa.weights);
  CHECK(wp.subject_ids == pa.subject_ids);
  CHECK(wp.config_hash == pa.config_hash);

  const ResultsPackage ra = sponsor_run(ac, pa, config);
  const ResultsPackage back = ResultsPackage::from_json(ra.to_json());
  CHECK(back.sender == "sponsorA");
  CHECK(back.estimate.point == ra.estimate.point);
  CHECK(back.ess == ra.ess);
  CHECK(back.balance_means == ra.balance_means);

  nlohmann::json bad = pa.to_json();
  bad["weights"][0] = 1.5;  // outside [0,1]
  CHECK_THROWS_AS(WeightsPackage::from_json(bad), SchemaError);
}
