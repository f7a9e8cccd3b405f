#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aitc/linalg.hpp"

namespace aitc {

inline constexpr std::string_view kSchemaVersion = "arbiter-itc/v1";

enum class CovariateKind { binary, continuous };
enum class OutcomeType { binary, continuous };

std::string to_string(CovariateKind k);
CovariateKind covariate_kind_from_string(const std::string& s);

struct CovariateSpec {
  std::string name;
  CovariateKind kind = CovariateKind::binary;
  bool operator==(const CovariateSpec&) const = default;
};

struct SubjectRecord {
  std::string id;
  std::string arm;
  double outcome = 0.0;
  std::vector<double> covariates;
};

struct ArmLabels {
  std::string active;
  std::string anchor;
  bool operator==(const ArmLabels&) const = default;
};

// Individual participant data for one two-arm trial.  Immutable by
// convention once built: nothing in the library mutates a constructed trial.
struct IpdTrial {
  std::string trial_id;  // "AC" or "BC"
  ArmLabels arms;
  OutcomeType outcome_type = OutcomeType::binary;
  std::vector<CovariateSpec> covariates;
  std::vector<SubjectRecord> records;

  std::size_t n() const { return records.size(); }
  std::size_t p() const { return covariates.size(); }

  linalg::Matrix covariate_matrix() const;
  std::vector<double> covariate_column(std::size_t j) const;
  // 1.0 for the active arm, 0.0 for the anchor arm.
  std::vector<double> active_indicator() const;
  std::vector<double> outcomes() const;
  std::vector<std::string> subject_ids() const;
};

// Per-arm outcome summary: counts by outcome value for binary outcomes,
// mean/SD for continuous ones.
struct OutcomeSummary {
  std::size_t count_y0 = 0;
  std::size_t count_y1 = 0;
  double mean = 0.0;
  double sd = 0.0;
};

struct PublishedEffect {
  std::string scale;  // "logOR", "riskdiff", "meandiff"
  double point = 0.0;
  std::optional<double> se;
};

struct AgdSummary {
  std::string trial_id;
  ArmLabels arms;
  std::size_t n_active = 0;
  std::size_t n_anchor = 0;
  std::vector<CovariateSpec> covariates;
  std::vector<double> covariate_means;
  std::optional<linalg::Matrix> covariance;
  OutcomeType outcome_type = OutcomeType::binary;
  OutcomeSummary active_outcome;
  OutcomeSummary anchor_outcome;
  std::optional<PublishedEffect> published_effect;
  std::vector<std::string> warnings;

  std::size_t n() const { return n_active + n_anchor; }
};

struct Violation {
  std::string subject;  // empty for trial-level violations
  std::string message;
};

// Empty result iff every invariant holds; never throws for data problems.
std::vector<Violation> validate_trial(const IpdTrial& trial);

// Unweighted means, n-1 covariance (omitted with a warning when n < 2),
// per-arm outcome tabulations.
AgdSummary summarize_ipd(const IpdTrial& trial);

// ---------------------------------------------------------------------------
// File formats: IPD as CSV `subject_id,arm,outcome,<covariates...>`,
// AgD as JSON with a schema version field.
// ---------------------------------------------------------------------------

IpdTrial load_ipd_csv(const std::string& path, const std::string& trial_id,
                      const std::vector<CovariateSpec>& specs,
                      const ArmLabels& arms, OutcomeType outcome_type);
void save_ipd_csv(const IpdTrial& trial, const std::string& path);

AgdSummary agd_from_json(const nlohmann::json& j);
nlohmann::json agd_to_json(const AgdSummary& agd);
AgdSummary load_agd_json(const std::string& path);
void save_agd_json(const AgdSummary& agd, const std::string& path);

}  // namespace aitc
