#include "aitc/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "aitc/arbitration.hpp"
#include "aitc/errors.hpp"
#include "aitc/kernels.hpp"
#include "aitc/prng.hpp"
#include "aitc/weighting.hpp"

namespace aitc {

namespace {

constexpr std::uint32_t kCovariatePurpose = 0x5343;  // scenario covariates
constexpr std::uint32_t kOutcomePurpose = 0x534F;    // scenario outcomes
constexpr std::uint32_t kSeedPurpose = 0x5350;       // protocol-2 seeds

double logistic1(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double cell_probability(const TrialOutcomeModel& m,
                        const std::vector<double>& x, bool active) {
  double eta = m.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) eta += m.covariate_main[j] * x[j];
  if (active) {
    eta += m.treatment;
    for (std::size_t j = 0; j < x.size(); ++j) eta += m.interaction[j] * x[j];
  }
  return logistic1(eta);
}

}  // namespace

void ScenarioSpec::validate() const {
  if (n_per_arm < 1) throw SchemaError("scenario: n_per_arm must be >= 1");
  if (replicates < 1) throw SchemaError("scenario: replicate count must be >= 1");
  const std::size_t np = p();
  if (np == 0) throw SchemaError("scenario: no covariates");
  for (const auto* cm : {&ac_covariates, &bc_covariates}) {
    if (cm->means.size() != np) throw SchemaError("scenario: means length mismatch");
    if (!cm->sds.empty() && cm->sds.size() != np)
      throw SchemaError("scenario: sds length mismatch");
  }
  for (const auto* om : {&ac_outcomes, &bc_outcomes}) {
    if (om->covariate_main.size() != np || om->interaction.size() != np)
      throw SchemaError("scenario: outcome model coefficient length mismatch");
  }
  for (std::size_t j = 0; j < np; ++j) {
    if (covariates[j].kind == CovariateKind::binary) {
      for (const auto* cm : {&ac_covariates, &bc_covariates}) {
        if (cm->means[j] <= 0.0 || cm->means[j] >= 1.0)
          throw SchemaError("scenario: binary covariate mean must be in (0,1)");
      }
    }
  }
  // all-binary patterns must give outcome probabilities strictly inside (0,1);
  // the logistic link guarantees it for finite coefficients
  for (const auto* om : {&ac_outcomes, &bc_outcomes}) {
    double mag = std::abs(om->intercept) + std::abs(om->treatment);
    for (std::size_t j = 0; j < np; ++j)
      mag += std::abs(om->covariate_main[j]) + std::abs(om->interaction[j]);
    if (!std::isfinite(mag) || mag > 35.0)
      throw SchemaError(
          "scenario: outcome model implies probabilities numerically at 0/1");
  }
  if (event_value != 0 && event_value != 1)
    throw SchemaError("scenario: event_value must be 0 or 1");
}

nlohmann::json ScenarioSpec::to_json() const {
  nlohmann::json j;
  j["schema"] = std::string(kSchemaVersion);
  j["name"] = name;
  j["n_per_arm"] = n_per_arm;
  nlohmann::json covs = nlohmann::json::array();
  for (const auto& s : covariates)
    covs.push_back({{"name", s.name}, {"kind", to_string(s.kind)}});
  j["covariates"] = covs;
  auto covmodel = [](const TrialCovariateModel& m) {
    nlohmann::json c;
    c["means"] = m.means;
    if (!m.sds.empty()) c["sds"] = m.sds;
    return c;
  };
  auto outmodel = [](const TrialOutcomeModel& m) {
    return nlohmann::json{{"intercept", m.intercept},
                          {"main", m.covariate_main},
                          {"treatment", m.treatment},
                          {"interaction", m.interaction}};
  };
  j["ac"] = covmodel(ac_covariates);
  j["bc"] = covmodel(bc_covariates);
  j["outcome_ac"] = outmodel(ac_outcomes);
  j["outcome_bc"] = outmodel(bc_outcomes);
  j["replicates"] = replicates;
  j["master_seed"] = master_seed;
  j["event_value"] = event_value;
  return j;
}

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& j) {
  try {
    ScenarioSpec s;
    s.name = j.value("name", "scenario");
    s.n_per_arm = j.at("n_per_arm").get<std::size_t>();
    for (const auto& c : j.at("covariates")) {
      s.covariates.push_back(
          {c.at("name").get<std::string>(),
           covariate_kind_from_string(c.at("kind").get<std::string>())});
    }
    auto covmodel = [](const nlohmann::json& c) {
      TrialCovariateModel m;
      m.means = c.at("means").get<std::vector<double>>();
      if (c.contains("sds")) m.sds = c.at("sds").get<std::vector<double>>();
      return m;
    };
    auto outmodel = [](const nlohmann::json& c) {
      TrialOutcomeModel m;
      m.intercept = c.at("intercept").get<double>();
      m.covariate_main = c.at("main").get<std::vector<double>>();
      m.treatment = c.at("treatment").get<double>();
      m.interaction = c.at("interaction").get<std::vector<double>>();
      return m;
    };
    s.ac_covariates = covmodel(j.at("ac"));
    s.bc_covariates = covmodel(j.at("bc"));
    s.ac_outcomes = outmodel(j.at("outcome_ac"));
    s.bc_outcomes = outmodel(j.at("outcome_bc"));
    s.replicates = j.at("replicates").get<std::size_t>();
    s.master_seed = j.at("master_seed").get<std::uint64_t>();
    s.event_value = j.value("event_value", kDefaultEventValue);
    s.validate();
    return s;
  } catch (const SchemaError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed scenario: ") + e.what());
  }
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return ScenarioSpec::from_json(j);
}

std::pair<IpdTrial, IpdTrial> simulate_pair(const ScenarioSpec& spec,
                                            std::uint64_t replicate) {
  spec.validate();
  const std::size_t n = 2 * spec.n_per_arm;
  const std::size_t np = spec.p();
  const prng::Stream cov_stream(spec.master_seed,
                                prng::stream_id(kCovariatePurpose, replicate));
  const prng::Stream out_stream(spec.master_seed,
                                prng::stream_id(kOutcomePurpose, replicate));

  auto make = [&](int trial_index) {
    const bool is_ac = trial_index == 0;
    const TrialCovariateModel& cm = is_ac ? spec.ac_covariates : spec.bc_covariates;
    const TrialOutcomeModel& om = is_ac ? spec.ac_outcomes : spec.bc_outcomes;
    IpdTrial trial;
    trial.trial_id = is_ac ? "AC" : "BC";
    trial.arms = is_ac ? ArmLabels{"A", "C"} : ArmLabels{"B", "C"};
    trial.outcome_type = OutcomeType::binary;
    trial.covariates = spec.covariates;
    trial.records.resize(n);
    const std::uint64_t cov_base = static_cast<std::uint64_t>(trial_index) * n * np;
    const std::uint64_t out_base = static_cast<std::uint64_t>(trial_index) * n;
    for (std::size_t i = 0; i < n; ++i) {
      SubjectRecord& rec = trial.records[i];
      const bool active = i < spec.n_per_arm;
      rec.id = trial.trial_id + "-" + std::to_string(replicate) + "-" +
               std::to_string(i + 1);
      rec.arm = active ? trial.arms.active : trial.arms.anchor;
      rec.covariates.resize(np);
      for (std::size_t j = 0; j < np; ++j) {
        const std::uint64_t idx = cov_base + i * np + j;
        if (spec.covariates[j].kind == CovariateKind::binary) {
          rec.covariates[j] = cov_stream.uniform(idx) < cm.means[j] ? 1.0 : 0.0;
        } else {
          const double sd = cm.sds.empty() ? 1.0 : cm.sds[j];
          rec.covariates[j] = cm.means[j] + sd * cov_stream.normal(idx);
        }
      }
      const double pe = cell_probability(om, rec.covariates, active);
      const bool event = out_stream.uniform(out_base + i) < pe;
      rec.outcome = event ? static_cast<double>(spec.event_value)
                          : static_cast<double>(1 - spec.event_value);
    }
    return trial;
  };
  return {make(0), make(1)};
}

namespace {

struct PatternEnumeration {
  std::vector<std::vector<double>> patterns;
  std::vector<double> phi_ac, phi_bc;
};

PatternEnumeration enumerate_patterns(const ScenarioSpec& spec) {
  for (const auto& c : spec.covariates) {
    if (c.kind != CovariateKind::binary) {
      throw AnalysisError(
          "exact enumeration requires all-binary covariates (scenario '" +
          spec.name + "')");
    }
  }
  const std::size_t np = spec.p();
  PatternEnumeration e;
  const std::size_t count = std::size_t{1} << np;
  for (std::size_t mask = 0; mask < count; ++mask) {
    std::vector<double> x(np);
    double pa = 1.0, pb = 1.0;
    for (std::size_t j = 0; j < np; ++j) {
      const bool one = (mask >> j) & 1U;
      x[j] = one ? 1.0 : 0.0;
      pa *= one ? spec.ac_covariates.means[j] : 1.0 - spec.ac_covariates.means[j];
      pb *= one ? spec.bc_covariates.means[j] : 1.0 - spec.bc_covariates.means[j];
    }
    e.patterns.push_back(std::move(x));
    e.phi_ac.push_back(pa);
    e.phi_bc.push_back(pb);
  }
  return e;
}

double logor(double p_active, double p_anchor) {
  return std::log(p_active / (1.0 - p_active)) -
         std::log(p_anchor / (1.0 - p_anchor));
}

// marginal event rates under pattern weights `mass`
double weighted_trial_logor(const ScenarioSpec& spec, bool ac_trial,
                            const std::vector<double>& mass,
                            const PatternEnumeration& e) {
  const TrialOutcomeModel& om = ac_trial ? spec.ac_outcomes : spec.bc_outcomes;
  double total = 0.0, act = 0.0, anc = 0.0;
  for (std::size_t k = 0; k < e.patterns.size(); ++k) {
    total += mass[k];
    act += mass[k] * cell_probability(om, e.patterns[k], true);
    anc += mass[k] * cell_probability(om, e.patterns[k], false);
  }
  return logor(act / total, anc / total);
}

}  // namespace

double true_ato(const ScenarioSpec& spec) {
  const PatternEnumeration e = enumerate_patterns(spec);
  // equal trial sizes: combined density is the average, eps = phi1/(phi1+phi0)
  std::vector<double> mass(e.patterns.size());
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double phi = 0.5 * (e.phi_ac[k] + e.phi_bc[k]);
    const double eps = e.phi_ac[k] / (e.phi_ac[k] + e.phi_bc[k]);
    mass[k] = phi * eps * (1.0 - eps);
  }
  return weighted_trial_logor(spec, true, mass, e) -
         weighted_trial_logor(spec, false, mass, e);
}

double true_classic(const ScenarioSpec& spec, bool by_sponsor_a) {
  const PatternEnumeration e = enumerate_patterns(spec);
  // target population is the counterpart trial's covariate distribution
  const std::vector<double>& target = by_sponsor_a ? e.phi_bc : e.phi_ac;
  const double own = weighted_trial_logor(spec, by_sponsor_a, target, e);
  const double other = weighted_trial_logor(spec, !by_sponsor_a, target, e);
  return own - other;
}

namespace {

struct ReplicateRow {
  bool ok = false;
  double classic_ac = 0.0, classic_ac_se = 0.0;
  double classic_bc = 0.0, classic_bc_se = 0.0;
  double p1 = 0.0, p1_se = 0.0;
  double p2 = 0.0, p2_se = 0.0;
};

ReplicateRow run_replicate(const ScenarioSpec& spec, std::uint64_t r) {
  ReplicateRow row;
  auto [ac, bc] = simulate_pair(spec, r);
  const AgdSummary ac_agd = summarize_ipd(ac);
  const AgdSummary bc_agd = summarize_ipd(bc);

  // (i) classic MAIC by sponsor A (A-vs-B in the BC population)
  {
    const WeightVector w = maic_weights(ac.covariate_matrix(), bc_agd.covariate_means);
    EffectEstimate own = weighted_contrast(ac, w, EffectScale::log_odds_ratio,
                                           spec.event_value);
    const EffectEstimate other = published_effect(bc_agd, spec.event_value);
    const EffectEstimate est = anchored_combine(own, other);
    row.classic_ac = est.point;
    row.classic_ac_se = *est.se;
  }
  // (ii) classic MAIC by sponsor B (B-vs-A in the AC population)
  {
    const WeightVector w = maic_weights(bc.covariate_matrix(), ac_agd.covariate_means);
    EffectEstimate own = weighted_contrast(bc, w, EffectScale::log_odds_ratio,
                                           spec.event_value);
    const EffectEstimate other = published_effect(ac_agd, spec.event_value);
    const EffectEstimate est = anchored_combine(own, other);
    row.classic_bc = est.point;
    row.classic_bc_se = *est.se;
  }
  // (iii) arbitrated protocol 1
  ArbitrationConfig c1;
  c1.protocol = ArbitrationConfig::Protocol::ipd_shared;
  c1.covariates = spec.covariates;
  c1.event_value = spec.event_value;
  {
    auto [wa, wb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                  CovariateSet::from_trial(bc), c1);
    const ResultsPackage ra = sponsor_run(ac, wa, c1);
    const ResultsPackage rb = sponsor_run(bc, wb, c1);
    const EffectEstimate est = arbitrator_combine(ra, rb);
    row.p1 = est.point;
    row.p1_se = *est.se;
  }
  // (iv) arbitrated protocol 2 with a replicate-specific prespecified seed
  ArbitrationConfig c2;
  c2.protocol = ArbitrationConfig::Protocol::covariate_simulation;
  c2.covariates = spec.covariates;
  c2.event_value = spec.event_value;
  c2.covgen_source = CorrelationSource::published;
  c2.covgen_rounding = BinaryRounding::exact_count;
  c2.seed = prng::Stream(spec.master_seed, prng::stream_id(kSeedPurpose, r)).u64(0);
  {
    const ResultsPackage ra = sponsor_run_selfservice(ac, bc_agd, c2);
    const ResultsPackage rb = sponsor_run_selfservice(bc, ac_agd, c2);
    const EffectEstimate est = arbitrator_combine(ra, rb);
    row.p2 = est.point;
    row.p2_se = *est.se;
  }
  row.ok = true;
  return row;
}

MethodStats summarize_method(const std::string& name,
                             const std::vector<ReplicateRow>& rows,
                             double ReplicateRow::*point,
                             double ReplicateRow::*se, double truth) {
  MethodStats s;
  s.name = name;
  double sum = 0.0, sum_se = 0.0;
  std::size_t covered = 0;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    ++s.n_ok;
    sum += r.*point;
    sum_se += r.*se;
    const double lo = r.*point - kZ975 * r.*se;
    const double hi = r.*point + kZ975 * r.*se;
    if (lo <= truth && truth <= hi) ++covered;
  }
  if (s.n_ok == 0) return s;
  s.mean = sum / static_cast<double>(s.n_ok);
  s.mean_model_se = sum_se / static_cast<double>(s.n_ok);
  double ss = 0.0;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    const double d = r.*point - s.mean;
    ss += d * d;
  }
  s.empirical_se =
      s.n_ok > 1 ? std::sqrt(ss / static_cast<double>(s.n_ok - 1)) : 0.0;
  s.coverage = static_cast<double>(covered) / static_cast<double>(s.n_ok);
  return s;
}

}  // namespace

StudyReport run_study(const ScenarioSpec& spec, int threads) {
  spec.validate();
  const std::size_t R = spec.replicates;
  std::vector<ReplicateRow> rows(R);

  unsigned nthreads = threads > 0 ? static_cast<unsigned>(threads)
                                  : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, R);
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= R) break;
      try {
        rows[r] = run_replicate(spec, r);
      } catch (const std::exception&) {
        rows[r].ok = false;
      }
    }
  };
  if (nthreads <= 1) {
    worker();
  } else {
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  StudyReport rep;
  rep.scenario = spec.name;
  rep.replicates = R;
  rep.true_ato_value = true_ato(spec);
  rep.classic_ac = summarize_method("classic-maic-by-A", rows,
                                    &ReplicateRow::classic_ac,
                                    &ReplicateRow::classic_ac_se,
                                    rep.true_ato_value);
  rep.classic_bc = summarize_method("classic-maic-by-B", rows,
                                    &ReplicateRow::classic_bc,
                                    &ReplicateRow::classic_bc_se,
                                    -rep.true_ato_value);
  rep.protocol1 = summarize_method("arbitrated-protocol-1", rows,
                                   &ReplicateRow::p1, &ReplicateRow::p1_se,
                                   rep.true_ato_value);
  rep.protocol2 = summarize_method("arbitrated-protocol-2", rows,
                                   &ReplicateRow::p2, &ReplicateRow::p2_se,
                                   rep.true_ato_value);

  std::size_t paradox = 0, both_ok = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++rep.aborts;
      continue;
    }
    ++both_ok;
    // sponsor B's estimate is B-vs-A; in A-vs-B orientation it flips sign
    if (r.classic_ac > 0.0 && -r.classic_bc < 0.0) ++paradox;
  }
  rep.paradox_rate = both_ok > 0
                         ? static_cast<double>(paradox) / static_cast<double>(both_ok)
                         : 0.0;
  rep.failed = static_cast<double>(rep.aborts) >
               0.01 * static_cast<double>(R);

  // agreement flag: all four A-vs-B means within 3 combined MC standard errors
  auto mcse = [](const MethodStats& m) {
    return m.n_ok > 0 ? m.empirical_se / std::sqrt(static_cast<double>(m.n_ok))
                      : 0.0;
  };
  const double means[4] = {rep.classic_ac.mean, -rep.classic_bc.mean,
                           rep.protocol1.mean, rep.protocol2.mean};
  const double errs[4] = {mcse(rep.classic_ac), mcse(rep.classic_bc),
                          mcse(rep.protocol1), mcse(rep.protocol2)};
  rep.all_agree = true;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const double tol = 3.0 * std::sqrt(errs[a] * errs[a] + errs[b] * errs[b]);
      if (std::abs(means[a] - means[b]) > std::max(tol, 1e-12)) {
        rep.all_agree = false;
      }
    }
  }
  return rep;
}

nlohmann::json StudyReport::to_json() const {
  auto method = [](const MethodStats& m) {
    return nlohmann::json{{"name", m.name},
                          {"n_ok", m.n_ok},
                          {"mean", m.mean},
                          {"empirical_se", m.empirical_se},
                          {"mean_model_se", m.mean_model_se},
                          {"coverage", m.coverage}};
  };
  return nlohmann::json{{"schema", std::string(kSchemaVersion)},
                        {"scenario", scenario},
                        {"replicates", replicates},
                        {"true_ato", true_ato_value},
                        {"classic_ac", method(classic_ac)},
                        {"classic_bc", method(classic_bc)},
                        {"protocol1", method(protocol1)},
                        {"protocol2", method(protocol2)},
                        {"paradox_rate", paradox_rate},
                        {"aborts", aborts},
                        {"failed", failed},
                        {"all_agree", all_agree}};
}

std::string StudyReport::to_text() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "scenario: " << scenario << "  replicates: " << replicates
     << "  aborts: " << aborts << "\n";
  os << "true ATO (A-vs-B logOR): " << true_ato_value << "\n";
  os << "method                     mean      emp.SE   model.SE  coverage\n";
  for (const MethodStats* m :
       {&classic_ac, &classic_bc, &protocol1, &protocol2}) {
    os << m->name;
    for (std::size_t pad = m->name.size(); pad < 25; ++pad) os << ' ';
    os << "  " << m->mean << "   " << m->empirical_se << "   "
       << m->mean_model_se << "   " << m->coverage << "\n";
  }
  os << "paradox (sign-flip) rate: " << paradox_rate << "\n";
  os << "all methods agree: " << (all_agree ? "yes" : "no") << "\n";
  if (failed) os << "STUDY FAILED: more than 1% of replicates aborted\n";
  return os.str();
}

}  // namespace aitc
