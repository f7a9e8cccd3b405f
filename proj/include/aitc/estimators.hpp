#pragma once

#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "aitc/data_model.hpp"
#include "aitc/weighting.hpp"

namespace aitc {

enum class EffectScale { log_odds_ratio, risk_difference, mean_difference };

std::string to_string(EffectScale s);
EffectScale effect_scale_from_string(const std::string& s);

// Normal 97.5% quantile used for every 95% interval in this project.
inline constexpr double kZ975 = 1.959964;

struct EffectEstimate {
  EffectScale scale = EffectScale::log_odds_ratio;
  std::string estimand = "trial-matched";  // "ATE","ATT","ATC","ATO","trial-matched"
  double point = 0.0;
  std::optional<double> se;
  std::optional<std::pair<double, double>> ci95;
  std::string provenance;

  nlohmann::json to_json() const;
  static EffectEstimate from_json(const nlohmann::json& j);
};

EffectEstimate with_ci(EffectEstimate e);

// Which outcome value counts as the event of interest.  The bundled trial
// tables tabulate survival in the Y=0 row, hence the default.
inline constexpr int kDefaultEventValue = 0;

// log[(w-mass active,event)(w-mass anchor,nonevent) /
//     (w-mass active,nonevent)(w-mass anchor,event)], natural log, no se.
EffectEstimate weighted_logodds(const IpdTrial& trial, const WeightVector& w,
                                int event_value = kDefaultEventValue);

// Two-parameter marginal model (intercept + active-arm indicator) solved from
// the weighted estimating equations, with the robust sandwich variance
// A^{-1} B A^{-T}, A = sum w_i dpsi_i, B = sum w_i^2 psi_i psi_i^T, one
// subject per cluster.
EffectEstimate weighted_contrast(const IpdTrial& trial, const WeightVector& w,
                                 EffectScale scale,
                                 int event_value = kDefaultEventValue);

// point = a.point - b.point; se = sqrt(a.se^2 + b.se^2).
EffectEstimate anchored_combine(const EffectEstimate& a,
                                const EffectEstimate& b);

// Published relative effect verbatim, or the unweighted logOR from counts.
EffectEstimate published_effect(const AgdSummary& agd,
                                int event_value = kDefaultEventValue);

}  // namespace aitc
