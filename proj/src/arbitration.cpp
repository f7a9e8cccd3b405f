#include "aitc/arbitration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aitc/errors.hpp"
#include "aitc/json_canon.hpp"
#include "aitc/kernels.hpp"
#include "aitc/prng.hpp"
#include "aitc/weighting.hpp"

namespace aitc {

CovariateSet CovariateSet::from_trial(const IpdTrial& trial) {
  CovariateSet set;
  set.trial_id = trial.trial_id;
  set.specs = trial.covariates;
  set.x = trial.covariate_matrix();
  set.subject_ids = trial.subject_ids();
  return set;
}

void ArbitrationConfig::validate() const {
  if (covariates.empty()) {
    throw SchemaError("arbitration config: empty covariate list");
  }
  for (const auto& name : propensity_covariates) {
    const bool known =
        std::any_of(covariates.begin(), covariates.end(),
                    [&](const CovariateSpec& s) { return s.name == name; });
    if (!known) {
      throw SchemaError("arbitration config: propensity covariate '" + name +
                        "' not in the covariate list");
    }
  }
  if (estimand != EstimandKind::ATO) {
    throw SchemaError("arbitration config: estimand is fixed to ATO");
  }
  if (protocol == Protocol::covariate_simulation) {
    if (!seed) {
      throw SchemaError(
          "arbitration config: covariate-simulation protocol requires a seed");
    }
    if (!covgen_source) {
      throw SchemaError(
          "arbitration config: covariate-simulation protocol requires a "
          "covgen template");
    }
  } else {
    if (seed || covgen_source || covgen_rounding) {
      throw SchemaError(
          "arbitration config: ipd-shared protocol forbids seed/covgen fields");
    }
  }
}

nlohmann::json ArbitrationConfig::to_json() const {
  nlohmann::json j;
  j["schema"] = std::string(kSchemaVersion);
  j["protocol"] = protocol == Protocol::ipd_shared ? "ipd-shared"
                                                   : "covariate-simulation";
  nlohmann::json covs = nlohmann::json::array();
  for (const auto& s : covariates) {
    covs.push_back({{"name", s.name}, {"kind", to_string(s.kind)}});
  }
  j["covariates"] = covs;
  // canonical form: an empty list means "all covariates"
  std::vector<std::string> prop = propensity_covariates;
  if (prop.empty()) {
    for (const auto& s : covariates) prop.push_back(s.name);
  }
  j["propensity_covariates"] = prop;
  j["effect_scale"] = to_string(scale);
  j["estimand"] = to_string(estimand);
  j["event_value"] = event_value;
  if (protocol == Protocol::covariate_simulation) {
    j["seed"] = *seed;
    j["covgen"] = {
        {"source", to_string(*covgen_source)},
        {"binary_rounding",
         to_string(covgen_rounding.value_or(BinaryRounding::exact_count))}};
  }
  return j;
}

ArbitrationConfig ArbitrationConfig::from_json(const nlohmann::json& j) {
  try {
    ArbitrationConfig c;
    if (j.at("schema").get<std::string>() != kSchemaVersion) {
      throw SchemaError("arbitration config: unsupported schema version");
    }
    const auto proto = j.at("protocol").get<std::string>();
    if (proto == "ipd-shared") {
      c.protocol = Protocol::ipd_shared;
    } else if (proto == "covariate-simulation") {
      c.protocol = Protocol::covariate_simulation;
    } else {
      throw SchemaError("arbitration config: unknown protocol '" + proto + "'");
    }
    for (const auto& s : j.at("covariates")) {
      c.covariates.push_back(
          {s.at("name").get<std::string>(),
           covariate_kind_from_string(s.at("kind").get<std::string>())});
    }
    if (j.contains("propensity_covariates")) {
      c.propensity_covariates =
          j.at("propensity_covariates").get<std::vector<std::string>>();
    }
    if (c.propensity_covariates.empty()) {
      for (const auto& s : c.covariates) c.propensity_covariates.push_back(s.name);
    }
    c.scale = effect_scale_from_string(j.at("effect_scale").get<std::string>());
    c.estimand = estimand_from_string(j.at("estimand").get<std::string>());
    c.event_value = j.value("event_value", kDefaultEventValue);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("covgen")) {
      c.covgen_source = correlation_source_from_string(
          j.at("covgen").at("source").get<std::string>());
      if (j.at("covgen").contains("binary_rounding")) {
        c.covgen_rounding = binary_rounding_from_string(
            j.at("covgen").at("binary_rounding").get<std::string>());
      }
    }
    c.validate();
    return c;
  } catch (const SchemaError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed arbitration config: ") + e.what());
  }
}

std::string ArbitrationConfig::hash() const {
  return canonical_json_sha256(to_json());
}

nlohmann::json WeightsPackage::to_json() const {
  nlohmann::json j;
  j["schema"] = std::string(kSchemaVersion);
  j["package"] = "weights";
  j["recipient"] = recipient;
  j["trial"] = trial_id;
  j["subject_ids"] = subject_ids;
  j["weights"] = weights;
  j["propensity"] = propensity.to_json();
  j["config_hash"] = config_hash;
  return j;
}

WeightsPackage WeightsPackage::from_json(const nlohmann::json& j) {
  try {
    WeightsPackage p;
    p.recipient = j.at("recipient").get<std::string>();
    p.trial_id = j.at("trial").get<std::string>();
    p.subject_ids = j.at("subject_ids").get<std::vector<std::string>>();
    p.weights = j.at("weights").get<std::vector<double>>();
    p.propensity = PropensityModel::from_json(j.at("propensity"));
    p.config_hash = j.at("config_hash").get<std::string>();
    for (double w : p.weights) {
      if (!(w >= 0.0 && w <= 1.0)) {
        throw SchemaError("weights package: weight outside [0,1]");
      }
    }
    return p;
  } catch (const SchemaError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed weights package: ") + e.what());
  }
}

nlohmann::json ResultsPackage::to_json() const {
  nlohmann::json j;
  j["schema"] = std::string(kSchemaVersion);
  j["package"] = "results";
  j["sender"] = sender;
  j["trial"] = trial_id;
  j["estimate"] = estimate.to_json();
  j["ess"] = ess;
  j["balance"] = {{"names", balance_names}, {"weighted_means", balance_means}};
  j["config_hash"] = config_hash;
  if (covariate_matrix_hash) j["covariate_matrix_hash"] = *covariate_matrix_hash;
  return j;
}

ResultsPackage ResultsPackage::from_json(const nlohmann::json& j) {
  try {
    ResultsPackage p;
    p.sender = j.at("sender").get<std::string>();
    p.trial_id = j.at("trial").get<std::string>();
    p.estimate = EffectEstimate::from_json(j.at("estimate"));
    p.ess = j.at("ess").get<double>();
    p.balance_names = j.at("balance").at("names").get<std::vector<std::string>>();
    p.balance_means =
        j.at("balance").at("weighted_means").get<std::vector<double>>();
    p.config_hash = j.at("config_hash").get<std::string>();
    if (j.contains("covariate_matrix_hash")) {
      p.covariate_matrix_hash = j.at("covariate_matrix_hash").get<std::string>();
    }
    return p;
  } catch (const SchemaError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed results package: ") + e.what());
  }
}

namespace {

std::vector<std::size_t> propensity_column_indices(
    const ArbitrationConfig& config,
    const std::vector<CovariateSpec>& specs) {
  std::vector<std::size_t> idx;
  std::vector<std::string> wanted = config.propensity_covariates;
  if (wanted.empty()) {
    for (const auto& s : config.covariates) wanted.push_back(s.name);
  }
  for (const auto& name : wanted) {
    const auto it =
        std::find_if(specs.begin(), specs.end(),
                     [&](const CovariateSpec& s) { return s.name == name; });
    if (it == specs.end()) {
      throw ProtocolError("propensity covariate '" + name +
                          "' missing from the trial covariates");
    }
    idx.push_back(static_cast<std::size_t>(it - specs.begin()));
  }
  return idx;
}

// pooled fit: block 1 (T=1) stacked over block 0 (T=0)
PropensityModel pooled_propensity_fit(const linalg::Matrix& x1,
                                      const linalg::Matrix& x0,
                                      const std::vector<std::size_t>& cols) {
  const std::size_t n1 = x1.rows(), n0 = x0.rows(), q = cols.size();
  linalg::Matrix pooled(n1 + n0, q);
  std::vector<double> labels(n1 + n0, 0.0);
  for (std::size_t i = 0; i < n1; ++i) {
    labels[i] = 1.0;
    for (std::size_t j = 0; j < q; ++j) pooled(i, j) = x1(i, cols[j]);
  }
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < q; ++j) pooled(n1 + i, j) = x0(i, cols[j]);
  }
  try {
    return fit_logistic(pooled, labels);
  } catch (const SeparationError& e) {
    throw ProtocolError(std::string("protocol abort: ") + e.what());
  }
}

std::vector<double> propensities_for(const PropensityModel& model,
                                     const linalg::Matrix& x,
                                     const std::vector<std::size_t>& cols) {
  linalg::Matrix sub(x.rows(), cols.size());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = x(i, cols[j]);
  return predict_all(model, sub);
}

void check_covariate_lists(const std::vector<CovariateSpec>& a,
                           const std::vector<CovariateSpec>& b) {
  if (a != b) {
    throw ProtocolError(
        "covariate lists differ between the two trials (same names, kinds, "
        "and order required)");
  }
}

nlohmann::json matrix_to_json(const linalg::Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ResultsPackage make_results(const IpdTrial& trial, const WeightVector& w,
                            const ArbitrationConfig& config,
                            const std::string& sender) {
  ResultsPackage res;
  res.sender = sender;
  res.trial_id = trial.trial_id;
  EffectEstimate est =
      weighted_contrast(trial, w, config.scale, config.event_value);
  est.estimand = to_string(config.estimand);
  res.estimate = with_ci(std::move(est));
  res.ess = w.ess;
  const AgdSummary bal = weighted_covariate_summary(trial, w);
  for (std::size_t j = 0; j < bal.covariates.size(); ++j) {
    res.balance_names.push_back(bal.covariates[j].name);
    res.balance_means.push_back(bal.covariate_means[j]);
  }
  res.config_hash = config.hash();
  return res;
}

}  // namespace

std::pair<WeightsPackage, WeightsPackage> arbitrate_ipd(
    const CovariateSet& cov_ac, const CovariateSet& cov_bc,
    const ArbitrationConfig& config) {
  config.validate();
  if (config.protocol != ArbitrationConfig::Protocol::ipd_shared) {
    throw ProtocolError("arbitrate_ipd requires the ipd-shared protocol");
  }
  check_covariate_lists(cov_ac.specs, cov_bc.specs);
  check_covariate_lists(cov_ac.specs, config.covariates);

  const auto cols = propensity_column_indices(config, cov_ac.specs);
  const PropensityModel model = pooled_propensity_fit(cov_ac.x, cov_bc.x, cols);
  const auto eps_ac = propensities_for(model, cov_ac.x, cols);
  const auto eps_bc = propensities_for(model, cov_bc.x, cols);

  const std::string hash = config.hash();
  WeightsPackage for_a;
  for_a.recipient = "sponsorA";
  for_a.trial_id = cov_ac.trial_id;
  for_a.subject_ids = cov_ac.subject_ids;
  for_a.weights.resize(eps_ac.size());
  for (std::size_t i = 0; i < eps_ac.size(); ++i)
    for_a.weights[i] = 1.0 - eps_ac[i];
  for_a.propensity = model;
  for_a.config_hash = hash;

  WeightsPackage for_b;
  for_b.recipient = "sponsorB";
  for_b.trial_id = cov_bc.trial_id;
  for_b.subject_ids = cov_bc.subject_ids;
  for_b.weights = eps_bc;
  for_b.propensity = model;
  for_b.config_hash = hash;

  return {std::move(for_a), std::move(for_b)};
}

ResultsPackage sponsor_run(const IpdTrial& trial, const WeightsPackage& pkg,
                           const ArbitrationConfig& config) {
  config.validate();
  if (pkg.trial_id != trial.trial_id) {
    throw ProtocolError("weights package is for trial " + pkg.trial_id +
                        ", not " + trial.trial_id);
  }
  if (pkg.config_hash != config.hash()) {
    throw ProtocolError("weights package config hash does not match");
  }
  if (pkg.subject_ids != trial.subject_ids()) {
    throw ProtocolError("weights package subject ids do not align with the trial");
  }
  const std::string expected_recipient =
      trial.trial_id == "AC" ? "sponsorA" : "sponsorB";
  if (pkg.recipient != expected_recipient) {
    throw ProtocolError("weights package recipient '" + pkg.recipient +
                        "' does not hold trial " + trial.trial_id);
  }
  const WeightVector w = WeightVector::make(pkg.weights, Normalization::raw);
  return make_results(trial, w, config, pkg.recipient);
}

ResultsPackage sponsor_run_selfservice(const IpdTrial& own,
                                       const AgdSummary& counterpart,
                                       const ArbitrationConfig& config) {
  config.validate();
  if (config.protocol != ArbitrationConfig::Protocol::covariate_simulation) {
    throw ProtocolError(
        "sponsor_run_selfservice requires the covariate-simulation protocol");
  }
  check_covariate_lists(own.covariates, config.covariates);
  check_covariate_lists(counterpart.covariates, config.covariates);

  // covariance source: published when the counterpart provides one,
  // otherwise borrowed from own IPD
  CorrelationSource source = *config.covgen_source;
  if (source == CorrelationSource::published && !counterpart.covariance) {
    source = CorrelationSource::borrowed_from_own_ipd;
  }
  CovGenModel model;
  linalg::Matrix simulated;
  try {
    model = build_model(counterpart, &own, source, *config.seed,
                        config.covgen_rounding.value_or(BinaryRounding::exact_count));
    simulated = generate(model, counterpart.n());
  } catch (const AnalysisError& e) {
    throw ProtocolError(std::string("protocol abort: ") + e.what());
  }

  const bool own_is_t1 = own.trial_id == "AC";
  const linalg::Matrix own_x = own.covariate_matrix();
  const auto cols = propensity_column_indices(config, own.covariates);
  const PropensityModel fit =
      own_is_t1 ? pooled_propensity_fit(own_x, simulated, cols)
                : pooled_propensity_fit(simulated, own_x, cols);
  const auto eps_own = propensities_for(fit, own_x, cols);
  const WeightVector w = overlap_weights(
      eps_own, own_is_t1 ? OverlapSide::ipd_trial_is_t1
                         : OverlapSide::ipd_trial_is_t0);

  ResultsPackage res =
      make_results(own, w, config, own_is_t1 ? "sponsorA" : "sponsorB");
  res.covariate_matrix_hash = canonical_json_sha256(matrix_to_json(simulated));
  return res;
}

EffectEstimate arbitrator_combine(const ResultsPackage& ra,
                                  const ResultsPackage& rb) {
  if (ra.config_hash != rb.config_hash) {
    throw ProtocolError("results packages carry different config hashes");
  }
  if (ra.sender != "sponsorA" || rb.sender != "sponsorB") {
    throw ProtocolError("arbitrator_combine expects (sponsorA, sponsorB) results");
  }
  if (ra.estimate.estimand != "ATO" || rb.estimate.estimand != "ATO") {
    throw ProtocolError("arbitrator_combine requires ATO estimates");
  }
  EffectEstimate combined = anchored_combine(ra.estimate, rb.estimate);
  combined.estimand = "ATO";
  combined.provenance =
      "arbitrated A-vs-B: ess_A=" + std::to_string(ra.ess) +
      ", ess_B=" + std::to_string(rb.ess);
  return combined;
}

}  // namespace aitc
