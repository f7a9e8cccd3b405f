#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aitc/covgen.hpp"
#include "aitc/data_model.hpp"
#include "aitc/estimators.hpp"
#include "aitc/propensity.hpp"

namespace aitc {

// Covariate-only view of a trial: what a sponsor shares with the arbitrator
// under the IPD-sharing protocol.  No outcomes, no arms.
struct CovariateSet {
  std::string trial_id;
  std::vector<CovariateSpec> specs;
  linalg::Matrix x;
  std::vector<std::string> subject_ids;

  static CovariateSet from_trial(const IpdTrial& trial);
};

struct ArbitrationConfig {
  enum class Protocol { ipd_shared, covariate_simulation };

  Protocol protocol = Protocol::ipd_shared;
  std::vector<CovariateSpec> covariates;
  // names of the covariates entering the propensity model (default: all)
  std::vector<std::string> propensity_covariates;
  EffectScale scale = EffectScale::log_odds_ratio;
  EstimandKind estimand = EstimandKind::ATO;
  int event_value = kDefaultEventValue;
  // covariate-simulation protocol only
  std::optional<CorrelationSource> covgen_source;
  std::optional<BinaryRounding> covgen_rounding;
  std::optional<std::uint64_t> seed;

  // protocol 2 requires seed + covgen template; protocol 1 forbids them
  void validate() const;

  nlohmann::json to_json() const;
  static ArbitrationConfig from_json(const nlohmann::json& j);
  std::string hash() const;
};

struct WeightsPackage {
  std::string recipient;  // "sponsorA" | "sponsorB"
  std::string trial_id;
  std::vector<std::string> subject_ids;
  std::vector<double> weights;  // overlap weights, each in [0,1]
  PropensityModel propensity;
  std::string config_hash;

  nlohmann::json to_json() const;
  static WeightsPackage from_json(const nlohmann::json& j);
};

struct ResultsPackage {
  std::string sender;  // "sponsorA" | "sponsorB"
  std::string trial_id;
  EffectEstimate estimate;
  double ess = 0.0;
  std::vector<std::string> balance_names;
  std::vector<double> balance_means;  // weighted covariate means
  std::string config_hash;
  std::optional<std::string> covariate_matrix_hash;  // protocol 2

  nlohmann::json to_json() const;
  static ResultsPackage from_json(const nlohmann::json& j);
};

// Protocol 1, arbitrator step: pooled propensity fit (AC rows labelled T=1,
// BC rows T=0), then one weights package per sponsor: 1 - eps(X_i) over the
// AC subjects for sponsor A, eps(X_i) over the BC subjects for sponsor B.
std::pair<WeightsPackage, WeightsPackage> arbitrate_ipd(
    const CovariateSet& cov_ac, const CovariateSet& cov_bc,
    const ArbitrationConfig& config);

// Protocol 1, sponsor step: weighted analysis with the packaged weights.
ResultsPackage sponsor_run(const IpdTrial& trial, const WeightsPackage& pkg,
                           const ArbitrationConfig& config);

// Protocol 2, sponsor step: simulate the counterpart's covariates from its
// AgD with the prespecified seed, fit the predetermined propensity model on
// the pooled data, weight own records, run the weighted analysis.  By
// construction this never touches the counterpart's IPD.
ResultsPackage sponsor_run_selfservice(const IpdTrial& own,
                                       const AgdSummary& counterpart,
                                       const ArbitrationConfig& config);

// Final arbitrator step: A-vs-B combination of the two ATO results.
EffectEstimate arbitrator_combine(const ResultsPackage& ra,
                                  const ResultsPackage& rb);

}  // namespace aitc
