#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aitc/data_model.hpp"
#include "aitc/linalg.hpp"

namespace aitc {

// Balancing-weight estimand family and its tilt function h(e).
enum class EstimandKind { ATE, ATT, ATC, ATO };

std::string to_string(EstimandKind k);
EstimandKind estimand_from_string(const std::string& s);

// h(e): ATE -> 1, ATT -> e, ATC -> 1-e, ATO -> e(1-e).
double tilt_value(EstimandKind kind, double eps);
std::vector<double> tilt(EstimandKind kind, std::span<const double> eps);

enum class Normalization { sum_to_one, mean_one, raw };

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

struct WeightVector {
  std::vector<double> weights;
  Normalization normalization = Normalization::raw;
  double ess = 0.0;

  // Validates nonnegativity, applies the normalization, computes the ESS.
  static WeightVector make(std::vector<double> w, Normalization norm);

  static WeightVector uniform(std::size_t n,
                              Normalization norm = Normalization::sum_to_one);

  nlohmann::json to_json(std::span<const std::string> subject_ids = {}) const;
  static WeightVector from_json(const nlohmann::json& j);
};

// (sum w)^2 / sum w^2
double effective_sample_size(std::span<const double> weights);

struct MaicOptions {
  double tolerance = 1e-10;  // sup-norm of the normalized moment residual
  int max_iterations = 200;
  Normalization normalization = Normalization::sum_to_one;
};

// Moment-matching weights w_i = exp(alpha . (x_i - target)) with alpha chosen
// so the weighted covariate means equal `target_means` (Newton with
// backtracking on the convex dual).  Throws InfeasibleTargetError when the
// target lies outside the convex hull of the rows.
WeightVector maic_weights(const linalg::Matrix& covariates,
                          std::span<const double> target_means,
                          const MaicOptions& options = {});

// Adds centered squares of the continuous columns so weighted variances are
// matched along with means.  `target_variances` entries for binary columns
// are ignored.
WeightVector maic_weights_matching_variances(
    const linalg::Matrix& covariates, std::span<const double> target_means,
    std::span<const double> target_variances,
    std::span<const CovariateSpec> specs, const MaicOptions& options = {});

enum class OverlapSide { ipd_trial_is_t1, ipd_trial_is_t0 };

// T1 side: w = 1 - eps;  T0 side: w = eps.  Kept raw (unnormalized).
WeightVector overlap_weights(std::span<const double> eps, OverlapSide side);

// Weighted covariate means (Sum w x / Sum w) in AgdSummary form; arm sizes
// and outcome tabulations stay unweighted.
AgdSummary weighted_covariate_summary(const IpdTrial& trial,
                                      const WeightVector& w);

}  // namespace aitc
