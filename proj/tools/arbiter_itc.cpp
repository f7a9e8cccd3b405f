// arbiter-itc: matching-adjusted indirect comparison with overlap-weight
// arbitration.  Subcommands: reproduce-paper, maic, arbitrate, simulate.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "aitc/arbitration.hpp"
#include "aitc/errors.hpp"
#include "aitc/estimators.hpp"
#include "aitc/fixtures.hpp"
#include "aitc/json_canon.hpp"
#include "aitc/propensity.hpp"
#include "aitc/simharness.hpp"
#include "aitc/weighting.hpp"

namespace {

using nlohmann::json;

#ifndef AITC_DEFAULT_DATA_DIR
#define AITC_DEFAULT_DATA_DIR "data"
#endif

struct Options {
  std::string out_dir = ".";
  bool json_output = false;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string data_dir = AITC_DEFAULT_DATA_DIR;
};

void write_file(const std::string& dir, const std::string& name,
                const json& j) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream f(path);
  if (!f) throw aitc::SchemaError("cannot write " + path);
  f << j.dump(2) << '\n';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct Check {
  std::string name;
  double value;
  double expected;
  double tolerance;
  bool pass() const { return std::abs(value - expected) <= tolerance; }
};

json checks_to_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"expected", c.expected},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass()}});
  }
  return arr;
}

aitc::ArmLabels default_arms(const std::string& trial_id) {
  return trial_id == "BC" ? aitc::ArmLabels{"B", "C"} : aitc::ArmLabels{"A", "C"};
}

// Which trial does this CSV hold?  Decided by its arm labels under the
// A/C vs B/C convention.
std::string infer_trial_id(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw aitc::SchemaError("cannot open IPD file: " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  bool saw_a = false, saw_b = false;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    if (c1 == std::string::npos) continue;
    const auto c2 = line.find(',', c1 + 1);
    const std::string arm = line.substr(c1 + 1, c2 - c1 - 1);
    saw_a = saw_a || arm == "A";
    saw_b = saw_b || arm == "B";
  }
  if (saw_a && !saw_b) return "AC";
  if (saw_b && !saw_a) return "BC";
  throw aitc::SchemaError(csv_path +
                          ": cannot infer the trial from its arm labels "
                          "(expected A/C or B/C)");
}

void require_valid(const aitc::IpdTrial& trial) {
  const auto violations = aitc::validate_trial(trial);
  if (!violations.empty()) {
    std::string msg = "IPD validation failed for trial " + trial.trial_id + ":";
    std::size_t shown = 0;
    for (const auto& v : violations) {
      msg += "\n  " + (v.subject.empty() ? std::string("<trial>") : v.subject) +
             ": " + v.message;
      if (++shown >= 5) {
        msg += "\n  ... (" + std::to_string(violations.size()) + " total)";
        break;
      }
    }
    throw aitc::SchemaError(msg);
  }
}

// ---------------------------------------------------------------------------
// reproduce-paper
// ---------------------------------------------------------------------------

void check_fixture_integrity(const aitc::AgdSummary& agd,
                             const std::string& trial,
                             std::size_t active_y0, std::size_t active_y1,
                             std::size_t anchor_y0, std::size_t anchor_y1,
                             double black_mean) {
  const bool ok = agd.n_active == active_y0 + active_y1 &&
                  agd.n_anchor == anchor_y0 + anchor_y1 &&
                  agd.active_outcome.count_y0 == active_y0 &&
                  agd.active_outcome.count_y1 == active_y1 &&
                  agd.anchor_outcome.count_y0 == anchor_y0 &&
                  agd.anchor_outcome.count_y1 == anchor_y1 &&
                  std::abs(agd.covariate_means.at(0) - black_mean) < 1e-12;
  if (!ok) {
    throw aitc::AnalysisError("fixture corruption: trial " + trial +
                              " does not match the bundled example tables");
  }
}

int cmd_reproduce_paper(const Options& opt) {
  using namespace aitc;
  const std::vector<CovariateSpec> specs = {{"black", CovariateKind::binary}};
  const IpdTrial ac = load_ipd_csv(opt.data_dir + "/hypothetical_ac.csv", "AC",
                                   specs, {"A", "C"}, OutcomeType::binary);
  const IpdTrial bc = load_ipd_csv(opt.data_dir + "/hypothetical_bc.csv", "BC",
                                   specs, {"B", "C"}, OutcomeType::binary);
  require_valid(ac);
  require_valid(bc);
  const AgdSummary ac_agd = summarize_ipd(ac);
  const AgdSummary bc_agd = summarize_ipd(bc);
  check_fixture_integrity(ac_agd, "AC", 260, 340, 120, 480, 1.0 / 3.0);
  check_fixture_integrity(bc_agd, "BC", 340, 260, 180, 420, 2.0 / 3.0);

  std::vector<Check> checks;
  std::ostringstream rep;

  // unweighted trial effects
  const auto unif_ac = WeightVector::uniform(ac.n());
  const auto unif_bc = WeightVector::uniform(bc.n());
  const double logor_ac = weighted_logodds(ac, unif_ac).point;
  const double logor_bc = weighted_logodds(bc, unif_bc).point;
  checks.push_back({"unweighted logOR AC", logor_ac, 1.12, 0.005});
  checks.push_back({"unweighted logOR BC", logor_bc, 1.12, 0.005});

  // classic MAIC, sponsor A
  const WeightVector w_ac =
      maic_weights(ac.covariate_matrix(), bc_agd.covariate_means);
  double w_black = 0.0, w_nonblack = 0.0;
  for (std::size_t i = 0; i < ac.n(); ++i) {
    (ac.records[i].covariates[0] == 1.0 ? w_black : w_nonblack) = w_ac.weights[i];
  }
  const double maic_logor_ac = weighted_logodds(ac, w_ac).point;
  const double theta_ab_ac = maic_logor_ac - logor_bc;
  checks.push_back({"MAIC weight (Black)", w_black, 1.0 / 600.0, 1e-10});
  checks.push_back({"MAIC weight (non-Black)", w_nonblack, 1.0 / 2400.0, 1e-10});
  checks.push_back({"classic MAIC A-vs-B (AC side)", theta_ab_ac, 0.42, 0.005});

  // classic MAIC, sponsor B
  const WeightVector w_bc =
      maic_weights(bc.covariate_matrix(), ac_agd.covariate_means);
  const double maic_logor_bc = weighted_logodds(bc, w_bc).point;
  const double theta_ba_bc = maic_logor_bc - logor_ac;
  checks.push_back({"classic MAIC B-vs-A (BC side)", theta_ba_bc, 0.40, 0.005});

  // propensities: exact and fitted
  const StratumCounts strata[] = {{"Black", 400, 800}, {"non-Black", 800, 400}};
  const auto eps = exact_discrete_propensity(strata);
  checks.push_back({"eps(Black) exact", eps[0].epsilon, 1.0 / 3.0, 0.0});
  checks.push_back({"eps(non-Black) exact", eps[1].epsilon, 2.0 / 3.0, 0.0});

  ArbitrationConfig config;
  config.protocol = ArbitrationConfig::Protocol::ipd_shared;
  config.covariates = specs;
  const auto [pkg_a, pkg_b] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                            CovariateSet::from_trial(bc), config);
  const double eps_black_fit =
      predict(pkg_a.propensity, std::vector<double>{1.0});
  const double eps_nonblack_fit =
      predict(pkg_a.propensity, std::vector<double>{0.0});
  checks.push_back({"eps(Black) IRLS", eps_black_fit, 1.0 / 3.0, 1e-8});
  checks.push_back({"eps(non-Black) IRLS", eps_nonblack_fit, 2.0 / 3.0, 1e-8});

  // arbitrated ATO
  const ResultsPackage res_a = sponsor_run(ac, pkg_a, config);
  const ResultsPackage res_b = sponsor_run(bc, pkg_b, config);
  const EffectEstimate final_est = arbitrator_combine(res_a, res_b);
  checks.push_back({"ATO logOR AC", res_a.estimate.point, 1.2993, 1e-4});
  checks.push_back({"ATO logOR BC", res_b.estimate.point, 1.2993, 1e-4});
  checks.push_back({"arbitrated A-vs-B", final_est.point, 0.0, 1e-10});

  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass();

  rep << "== bundled two-trial example ==\n";
  rep << "unweighted logOR: AC " << fmt(logor_ac) << ", BC " << fmt(logor_bc)
      << "  (1.12 at 2 decimals)\n";
  rep << "classic MAIC by sponsor A: weighted logOR " << fmt(maic_logor_ac)
      << ", A-vs-B = " << fmt(theta_ab_ac) << "\n";
  rep << "classic MAIC by sponsor B: weighted logOR " << fmt(maic_logor_bc)
      << ", B-vs-A = " << fmt(theta_ba_bc) << "\n";
  rep << "  -> opposite superiority conclusions from the same data\n";
  rep << "MAIC weights in AC: Black " << w_black << " (= 1/600), non-Black "
      << w_nonblack << " (= 1/2400), ESS " << fmt(w_ac.ess) << "\n";
  rep << "trial-membership propensities: eps(Black) = " << fmt(eps[0].epsilon)
      << ", eps(non-Black) = " << fmt(eps[1].epsilon)
      << " (IRLS agrees to 1e-8)\n";
  rep << "overlap weights: omega1 = (" << fmt(1 - eps[0].epsilon) << ", "
      << fmt(1 - eps[1].epsilon) << "), omega0 = (" << fmt(eps[0].epsilon)
      << ", " << fmt(eps[1].epsilon) << ")\n";
  rep << "arbitrated overlap analysis: logOR(AC) = " << fmt(res_a.estimate.point)
      << ", logOR(BC) = " << fmt(res_b.estimate.point)
      << "  (1.30 at 2 decimals)\n";
  rep << "arbitrated A-vs-B = " << fmt(final_est.point) << " (se "
      << fmt(*final_est.se) << ")\n";
  for (const auto& c : checks) {
    rep << (c.pass() ? "  [ok] " : "  [FAIL] ") << c.name << " = " << c.value
        << "\n";
  }
  rep << (all_pass ? "ALL CHECKS PASSED\n" : "CHECKS FAILED\n");

  if (opt.json_output) {
    json j = {{"schema", std::string(kSchemaVersion)},
              {"command", "reproduce-paper"},
              {"classic_maic", {{"ab_given_ac", theta_ab_ac},
                                {"ba_given_bc", theta_ba_bc}}},
              {"unweighted_logor", {{"ac", logor_ac}, {"bc", logor_bc}}},
              {"propensities", {{"black", eps[0].epsilon},
                                {"non_black", eps[1].epsilon}}},
              {"ato", {{"ac", res_a.estimate.point},
                       {"bc", res_b.estimate.point},
                       {"difference", final_est.point},
                       {"se", *final_est.se}}},
              {"checks", checks_to_json(checks)},
              {"pass", all_pass}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << rep.str();
  }
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// maic
// ---------------------------------------------------------------------------

int cmd_maic(const Options& opt, const std::string& ipd_path,
             const std::string& agd_path, int event_value,
             bool match_variances, const std::string& active_label,
             const std::string& anchor_label) {
  using namespace aitc;
  const AgdSummary agd = load_agd_json(agd_path);
  const std::string own_id = agd.trial_id == "BC" ? "AC" : "BC";
  ArmLabels arms = default_arms(own_id);
  if (!active_label.empty()) arms.active = active_label;
  if (!anchor_label.empty()) arms.anchor = anchor_label;

  const IpdTrial ipd = load_ipd_csv(ipd_path, own_id, agd.covariates, arms,
                                    OutcomeType::binary);
  require_valid(ipd);

  WeightVector w =
      match_variances
          ? [&] {
              if (!agd.covariance) {
                throw SchemaError(
                    "--match-variances requires an AgD covariance matrix");
              }
              std::vector<double> vars(agd.covariates.size());
              for (std::size_t j = 0; j < vars.size(); ++j)
                vars[j] = (*agd.covariance)(j, j);
              return maic_weights_matching_variances(
                  ipd.covariate_matrix(), agd.covariate_means, vars,
                  agd.covariates);
            }()
          : maic_weights(ipd.covariate_matrix(), agd.covariate_means);

  const EffectEstimate own_nose = weighted_logodds(ipd, w, event_value);
  EffectEstimate own_se = weighted_contrast(
      ipd, w, EffectScale::log_odds_ratio, event_value);
  const EffectEstimate pub = published_effect(agd, event_value);
  EffectEstimate combined;
  if (pub.se) {
    combined = anchored_combine(own_se, pub);
  } else {
    EffectEstimate own_pt = own_nose;
    combined = anchored_combine(own_pt, pub);
  }

  const AgdSummary balance = weighted_covariate_summary(ipd, w);

  if (opt.json_output) {
    json bal = json::array();
    for (std::size_t j = 0; j < agd.covariates.size(); ++j) {
      bal.push_back({{"name", agd.covariates[j].name},
                     {"target", agd.covariate_means[j]},
                     {"weighted_mean", balance.covariate_means[j]}});
    }
    json j = {{"schema", std::string(kSchemaVersion)},
              {"command", "maic"},
              {"estimate", combined.to_json()},
              {"own_trial_logor", own_nose.point},
              {"published", pub.to_json()},
              {"ess", w.ess},
              {"balance", bal}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "MAIC: " << ipd.trial_id << " IPD reweighted to " << agd.trial_id
              << " aggregate means\n";
    std::cout << "weighted logOR(" << ipd.trial_id << ") = " << fmt(own_nose.point)
              << ", published logOR(" << agd.trial_id << ") = " << fmt(pub.point)
              << "\n";
    std::cout << "anchored contrast = " << fmt(combined.point);
    if (combined.se) {
      std::cout << " (se " << fmt(*combined.se) << ", 95% CI "
                << fmt(combined.ci95->first) << " .. "
                << fmt(combined.ci95->second) << ")";
    }
    std::cout << "\nESS = " << fmt(w.ess) << " of " << ipd.n() << " subjects\n";
    std::cout << "balance (target vs weighted):\n";
    for (std::size_t j = 0; j < agd.covariates.size(); ++j) {
      std::cout << "  " << agd.covariates[j].name << ": "
                << agd.covariate_means[j] << " vs "
                << balance.covariate_means[j] << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// arbitrate
// ---------------------------------------------------------------------------

int cmd_arbitrate(const Options& opt, const std::string& role,
                  const std::string& config_path, const std::string& ipd_ac,
                  const std::string& ipd_bc, const std::string& ipd_path,
                  const std::string& agd_path, const std::string& weights_path,
                  const std::string& results_a, const std::string& results_b) {
  using namespace aitc;
  std::ifstream cf(config_path);
  if (!cf) throw SchemaError("cannot open config: " + config_path);
  json cj;
  try {
    cf >> cj;
  } catch (const json::exception& e) {
    throw SchemaError(config_path + ": " + e.what());
  }
  const ArbitrationConfig config = ArbitrationConfig::from_json(cj);

  auto load_trial = [&](const std::string& path, const std::string& id) {
    IpdTrial t = load_ipd_csv(path, id, config.covariates, default_arms(id),
                              OutcomeType::binary);
    require_valid(t);
    return t;
  };

  if (role == "arbitrator-weights") {
    if (ipd_ac.empty() || ipd_bc.empty()) {
      throw SchemaError("arbitrator-weights needs --ipd-ac and --ipd-bc");
    }
    const IpdTrial ac = load_trial(ipd_ac, "AC");
    const IpdTrial bc = load_trial(ipd_bc, "BC");
    const auto [pa, pb] = arbitrate_ipd(CovariateSet::from_trial(ac),
                                        CovariateSet::from_trial(bc), config);
    write_file(opt.out_dir, "weights-package-a.json", pa.to_json());
    write_file(opt.out_dir, "weights-package-b.json", pb.to_json());
    std::cout << "weights packages written to " << opt.out_dir << "\n";
    return 0;
  }
  if (role == "sponsor-run") {
    if (ipd_path.empty() || weights_path.empty()) {
      throw SchemaError("sponsor-run needs --ipd and --weights");
    }
    std::ifstream wf(weights_path);
    if (!wf) throw SchemaError("cannot open weights package: " + weights_path);
    json wj;
    try {
      wf >> wj;
    } catch (const json::exception& e) {
      throw SchemaError(weights_path + ": " + e.what());
    }
    const WeightsPackage pkg = WeightsPackage::from_json(wj);
    const IpdTrial own = load_trial(ipd_path, infer_trial_id(ipd_path));
    const ResultsPackage res = sponsor_run(own, pkg, config);
    const std::string name = res.sender == "sponsorA" ? "results-package-a.json"
                                                      : "results-package-b.json";
    write_file(opt.out_dir, name, res.to_json());
    std::cout << "results package written to " << opt.out_dir << "/" << name
              << "\n";
    return 0;
  }
  if (role == "sponsor-selfservice") {
    if (ipd_path.empty() || agd_path.empty()) {
      throw SchemaError("sponsor-selfservice needs --ipd and --agd");
    }
    const AgdSummary counterpart = load_agd_json(agd_path);
    const std::string own_id = counterpart.trial_id == "BC" ? "AC" : "BC";
    const IpdTrial own = load_trial(ipd_path, own_id);
    const ResultsPackage res = sponsor_run_selfservice(own, counterpart, config);
    const std::string name = res.sender == "sponsorA" ? "results-package-a.json"
                                                      : "results-package-b.json";
    write_file(opt.out_dir, name, res.to_json());
    std::cout << "results package written to " << opt.out_dir << "/" << name
              << "\n";
    return 0;
  }
  if (role == "arbitrator-combine") {
    if (results_a.empty() || results_b.empty()) {
      throw SchemaError("arbitrator-combine needs --results-a and --results-b");
    }
    auto load_results = [](const std::string& path) {
      std::ifstream f(path);
      if (!f) throw SchemaError("cannot open results package: " + path);
      json j;
      try {
        f >> j;
      } catch (const json::exception& e) {
        throw SchemaError(path + ": " + e.what());
      }
      return ResultsPackage::from_json(j);
    };
    const ResultsPackage ra = load_results(results_a);
    const ResultsPackage rb = load_results(results_b);
    if (ra.config_hash != config.hash() || rb.config_hash != config.hash()) {
      throw ProtocolError("results package config hash does not match --config");
    }
    const EffectEstimate final_est = arbitrator_combine(ra, rb);
    write_file(opt.out_dir, "arbitrated-estimate.json", final_est.to_json());
    if (opt.json_output) {
      std::cout << final_est.to_json().dump(2) << "\n";
    } else {
      std::cout << "arbitrated A-vs-B (" << to_string(final_est.scale)
                << ", ATO) = " << fmt(final_est.point);
      if (final_est.se) {
        std::cout << " (se " << fmt(*final_est.se) << ", 95% CI "
                  << fmt(final_est.ci95->first) << " .. "
                  << fmt(final_est.ci95->second) << ")";
      }
      std::cout << "\nESS: A " << fmt(ra.ess) << ", B " << fmt(rb.ess) << "\n";
    }
    return 0;
  }
  throw SchemaError("unknown arbitrate role: " + role);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const Options& opt, const std::string& scenario_path) {
  using namespace aitc;
  ScenarioSpec spec = load_scenario(scenario_path);
  if (opt.seed) spec.master_seed = *opt.seed;
  const StudyReport report = run_study(spec, opt.threads);
  write_file(opt.out_dir, "study-report.json", report.to_json());
  if (opt.json_output) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    std::cout << report.to_text();
  }
  return report.failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arbitrated matching-adjusted indirect comparison"};
  app.require_subcommand(1);

  Options opt;
  if (const char* env = std::getenv("ARBITER_ITC_SEED");
      env != nullptr && env[0] != '\0') {
    opt.seed = std::strtoull(env, nullptr, 10);
  }
  app.add_option("--out", opt.out_dir, "output directory for generated files");
  app.add_flag("--json", opt.json_output, "machine-readable JSON on stdout");
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag,
                                  "seed override (falls back to ARBITER_ITC_SEED)");
  app.add_option("--threads", opt.threads, "worker threads for simulate");

  auto* repro = app.add_subcommand("reproduce-paper",
                                   "run the bundled two-trial example end to end");
  repro->fallthrough();
  repro->add_option("--data", opt.data_dir, "fixture directory");

  auto* maic = app.add_subcommand("maic", "classic MAIC of IPD against AgD");
  maic->fallthrough();
  std::string ipd_path, agd_path, active_label, anchor_label;
  int event_value = aitc::kDefaultEventValue;
  bool match_variances = false;
  maic->add_option("--ipd", ipd_path, "IPD CSV")->required();
  maic->add_option("--agd", agd_path, "AgD JSON")->required();
  maic->add_option("--event", event_value, "outcome value counted as the event")
      ->check(CLI::Range(0, 1));
  maic->add_flag("--match-variances", match_variances,
                 "match variances as well as means");
  maic->add_option("--active", active_label, "active arm label");
  maic->add_option("--anchor", anchor_label, "anchor arm label");

  auto* arb = app.add_subcommand("arbitrate", "arbitrated protocol steps");
  arb->fallthrough();
  std::string role, config_path, ipd_ac, ipd_bc, weights_path, results_a,
      results_b, arb_ipd, arb_agd;
  arb->add_option("role", role,
                  "arbitrator-weights | sponsor-run | sponsor-selfservice | "
                  "arbitrator-combine")
      ->required();
  arb->add_option("--config", config_path, "arbitration config JSON")->required();
  arb->add_option("--ipd-ac", ipd_ac, "AC trial IPD CSV (arbitrator-weights)");
  arb->add_option("--ipd-bc", ipd_bc, "BC trial IPD CSV (arbitrator-weights)");
  arb->add_option("--ipd", arb_ipd, "own trial IPD CSV (sponsor roles)");
  arb->add_option("--agd", arb_agd, "counterpart AgD JSON (sponsor-selfservice)");
  arb->add_option("--weights", weights_path, "weights package (sponsor-run)");
  arb->add_option("--results-a", results_a, "sponsor A results package");
  arb->add_option("--results-b", results_b, "sponsor B results package");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo study over a scenario");
  sim->fallthrough();
  std::string scenario_path;
  sim->add_option("--scenario", scenario_path, "scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count() > 0) opt.seed = seed_flag;

  try {
    if (repro->parsed()) return cmd_reproduce_paper(opt);
    if (maic->parsed()) {
      return cmd_maic(opt, ipd_path, agd_path, event_value, match_variances,
                      active_label, anchor_label);
    }
    if (arb->parsed()) {
      return cmd_arbitrate(opt, role, config_path, ipd_ac, ipd_bc, arb_ipd,
                           arb_agd, weights_path, results_a, results_b);
    }
    if (sim->parsed()) return cmd_simulate(opt, scenario_path);
  } catch (const aitc::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const aitc::AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
