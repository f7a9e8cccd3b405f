#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aitc/data_model.hpp"
#include "aitc/estimators.hpp"

namespace aitc {

// P(Y = event | arm, x) = logistic(intercept + main.x + z*(treatment + interaction.x))
struct TrialOutcomeModel {
  double intercept = 0.0;
  std::vector<double> covariate_main;
  double treatment = 0.0;
  std::vector<double> interaction;
};

struct TrialCovariateModel {
  std::vector<double> means;
  std::vector<double> sds;  // continuous covariates only; empty means all 1
};

struct ScenarioSpec {
  std::string name;
  std::size_t n_per_arm = 0;
  std::vector<CovariateSpec> covariates;
  TrialCovariateModel ac_covariates, bc_covariates;
  TrialOutcomeModel ac_outcomes, bc_outcomes;
  std::size_t replicates = 0;
  std::uint64_t master_seed = 0;
  int event_value = kDefaultEventValue;

  std::size_t p() const { return covariates.size(); }
  void validate() const;  // throws SchemaError

  nlohmann::json to_json() const;
  static ScenarioSpec from_json(const nlohmann::json& j);
};

ScenarioSpec load_scenario(const std::string& path);

// Deterministic in (master_seed, replicate): covariates per trial-specific
// margins, outcomes from the logistic model.
std::pair<IpdTrial, IpdTrial> simulate_pair(const ScenarioSpec& spec,
                                            std::uint64_t replicate);

// Exact-enumeration targets over the (all-binary) covariate patterns using
// population propensities; logOR scale.
double true_ato(const ScenarioSpec& spec);
// Classic MAIC population value, A-vs-B when by_sponsor_a, else B-vs-A.
double true_classic(const ScenarioSpec& spec, bool by_sponsor_a);

struct MethodStats {
  std::string name;
  std::size_t n_ok = 0;
  double mean = 0.0;
  double empirical_se = 0.0;
  double mean_model_se = 0.0;
  double coverage = 0.0;  // 95% CI coverage of the true ATO
};

struct StudyReport {
  std::string scenario;
  std::size_t replicates = 0;
  double true_ato_value = 0.0;
  MethodStats classic_ac;   // A-vs-B
  MethodStats classic_bc;   // B-vs-A as produced by sponsor B
  MethodStats protocol1;    // A-vs-B
  MethodStats protocol2;    // A-vs-B
  double paradox_rate = 0.0;
  std::size_t aborts = 0;
  bool failed = false;      // > 1% of replicates aborted
  bool all_agree = false;   // all four means coincide within Monte Carlo error

  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Runs classic MAIC both ways plus both arbitrated protocols on every
// replicate.  threads <= 0 means hardware concurrency.
StudyReport run_study(const ScenarioSpec& spec, int threads = 0);

}  // namespace aitc
