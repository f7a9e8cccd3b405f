#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aitc/linalg.hpp"

namespace aitc {

// Trial-membership (or treatment-membership) propensity model:
// logit P(T=1 | x) = coefficients . (1, x).
struct PropensityModel {
  std::vector<double> coefficients;  // intercept first
  int iterations = 0;
  bool converged = false;
  double max_score = 0.0;  // gradient sup-norm at the returned coefficients

  std::size_t p() const { return coefficients.size() - 1; }

  nlohmann::json to_json() const;
  static PropensityModel from_json(const nlohmann::json& j);
};

struct LogisticFitOptions {
  double tolerance = 1e-8;      // on the score sup-norm (fitting scale)
  int max_iterations = 100;
  double separation_threshold = 30.0;  // |beta| on standardized covariates
};

// Maximum-likelihood logistic regression by iteratively reweighted least
// squares with step-halving.  Covariates are standardized internally and
// coefficients returned on the original scale.  Reports non-convergence via
// the diagnostics rather than throwing; throws SeparationError /
// invalid_argument only for the conditions the contract names.
PropensityModel fit_logistic(const linalg::Matrix& covariates,
                             std::span<const double> labels,
                             const LogisticFitOptions& options = {});

// logistic(coefficients . (1, x)), strictly inside (0,1).
double predict(const PropensityModel& model, std::span<const double> x);
std::vector<double> predict_all(const PropensityModel& model,
                                const linalg::Matrix& covariates);

struct StratumCounts {
  std::string label;
  double n_t1 = 0.0;
  double n_t0 = 0.0;
};

struct StratumPropensity {
  std::string label;
  double epsilon = 0.0;
  bool positivity_warning = false;  // epsilon hit 0 or 1
};

// Bayes-formula propensity for discrete strata: eps = n1 / (n1 + n0).
std::vector<StratumPropensity> exact_discrete_propensity(
    std::span<const StratumCounts> counts);

}  // namespace aitc
