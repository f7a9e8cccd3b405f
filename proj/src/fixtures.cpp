#include "aitc/fixtures.hpp"

#include <cmath>

namespace aitc::fixtures {

namespace {

struct CellBlock {
  double black;       // covariate value
  const char* arm;
  double outcome;     // 0 or 1
  std::size_t count;
};

IpdTrial build_trial(const std::string& trial_id, const ArmLabels& arms,
                     std::initializer_list<CellBlock> blocks) {
  IpdTrial trial;
  trial.trial_id = trial_id;
  trial.arms = arms;
  trial.outcome_type = OutcomeType::binary;
  trial.covariates = {{"black", CovariateKind::binary}};
  std::size_t serial = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.count; ++i) {
      SubjectRecord rec;
      char buf[16];
      std::snprintf(buf, sizeof buf, "%s-%04zu", trial_id.c_str(), ++serial);
      rec.id = buf;
      rec.arm = b.arm;
      rec.outcome = b.outcome;
      rec.covariates = {b.black};
      trial.records.push_back(std::move(rec));
    }
  }
  return trial;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

IpdTrial hypothetical_ac() {
  return build_trial("AC", {"A", "C"},
                     {{1, "A", 0, 180}, {1, "A", 1, 20},
                      {1, "C", 0, 80},  {1, "C", 1, 120},
                      {0, "A", 0, 80},  {0, "A", 1, 320},
                      {0, "C", 0, 40},  {0, "C", 1, 360}});
}

IpdTrial hypothetical_bc() {
  return build_trial("BC", {"B", "C"},
                     {{1, "B", 0, 240}, {1, "B", 1, 160},
                      {1, "C", 0, 160}, {1, "C", 1, 240},
                      {0, "B", 0, 100}, {0, "B", 1, 100},
                      {0, "C", 0, 20},  {0, "C", 1, 180}});
}

AgdSummary hypothetical_ac_agd() { return summarize_ipd(hypothetical_ac()); }
AgdSummary hypothetical_bc_agd() { return summarize_ipd(hypothetical_bc()); }

IpdTrial overlap_ac() {
  return build_trial("AC", {"A", "C"},
                     {{1, "A", 0, 180}, {1, "A", 1, 20},
                      {1, "C", 0, 80},  {1, "C", 1, 120},
                      {0, "A", 0, 40},  {0, "A", 1, 160},
                      {0, "C", 0, 20},  {0, "C", 1, 180}});
}

IpdTrial overlap_bc() {
  return build_trial("BC", {"B", "C"},
                     {{1, "B", 0, 120}, {1, "B", 1, 80},
                      {1, "C", 0, 80},  {1, "C", 1, 120},
                      {0, "B", 0, 100}, {0, "B", 1, 100},
                      {0, "C", 0, 20},  {0, "C", 1, 180}});
}

ScenarioSpec paradox_scenario(std::size_t n_per_arm, std::size_t replicates,
                              std::uint64_t master_seed) {
  ScenarioSpec s;
  s.name = "paradox-hypothetical";
  s.n_per_arm = n_per_arm;
  s.covariates = {{"black", CovariateKind::binary}};
  s.ac_covariates.means = {1.0 / 3.0};
  s.bc_covariates.means = {2.0 / 3.0};
  // event (Y=0) probabilities per (arm, stratum), matching the cell counts
  // AC: A/black .9, A/non .2, C/black .4, C/non .1
  s.ac_outcomes.intercept = logit(0.1);
  s.ac_outcomes.covariate_main = {logit(0.4) - logit(0.1)};
  s.ac_outcomes.treatment = logit(0.2) - logit(0.1);
  s.ac_outcomes.interaction = {logit(0.9) - logit(0.4) -
                               (logit(0.2) - logit(0.1))};
  // BC: B/black .6, B/non .5, C/black .4, C/non .1
  s.bc_outcomes.intercept = logit(0.1);
  s.bc_outcomes.covariate_main = {logit(0.4) - logit(0.1)};
  s.bc_outcomes.treatment = logit(0.5) - logit(0.1);
  s.bc_outcomes.interaction = {logit(0.6) - logit(0.4) -
                               (logit(0.5) - logit(0.1))};
  s.replicates = replicates;
  s.master_seed = master_seed;
  s.event_value = 0;
  return s;
}

ScenarioSpec continuous_scenario(std::size_t n_per_arm, std::size_t replicates,
                                 std::uint64_t master_seed) {
  ScenarioSpec s;
  s.name = "continuous-smoke";
  s.n_per_arm = n_per_arm;
  s.covariates = {{"x1", CovariateKind::continuous}};
  s.ac_covariates.means = {0.2};
  s.ac_covariates.sds = {1.0};
  s.bc_covariates.means = {0.8};
  s.bc_covariates.sds = {1.3};
  s.ac_outcomes = {-0.5, {0.9}, 0.8, {0.6}};
  s.bc_outcomes = {-0.5, {0.9}, 0.5, {0.9}};
  s.replicates = replicates;
  s.master_seed = master_seed;
  s.event_value = 0;
  return s;
}

}  // namespace aitc::fixtures
