#include "aitc/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "aitc/errors.hpp"

namespace aitc {

std::string to_string(EffectScale s) {
  switch (s) {
    case EffectScale::log_odds_ratio: return "logOR";
    case EffectScale::risk_difference: return "riskdiff";
    case EffectScale::mean_difference: return "meandiff";
  }
  return "logOR";
}

EffectScale effect_scale_from_string(const std::string& s) {
  if (s == "logOR") return EffectScale::log_odds_ratio;
  if (s == "riskdiff") return EffectScale::risk_difference;
  if (s == "meandiff") return EffectScale::mean_difference;
  throw SchemaError("unknown effect scale: " + s);
}

nlohmann::json EffectEstimate::to_json() const {
  nlohmann::json j;
  j["scale"] = to_string(scale);
  j["estimand"] = estimand;
  j["point"] = point;
  if (se) j["se"] = *se;
  if (ci95) j["ci95"] = {ci95->first, ci95->second};
  j["provenance"] = provenance;
  return j;
}

EffectEstimate EffectEstimate::from_json(const nlohmann::json& j) {
  try {
    EffectEstimate e;
    e.scale = effect_scale_from_string(j.at("scale").get<std::string>());
    e.estimand = j.at("estimand").get<std::string>();
    e.point = j.at("point").get<double>();
    if (j.contains("se")) e.se = j.at("se").get<double>();
    if (j.contains("ci95"))
      e.ci95 = std::make_pair(j.at("ci95")[0].get<double>(),
                              j.at("ci95")[1].get<double>());
    e.provenance = j.value("provenance", "");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("malformed effect JSON: ") + ex.what());
  }
}

EffectEstimate with_ci(EffectEstimate e) {
  if (e.se) {
    e.ci95 = std::make_pair(e.point - kZ975 * *e.se, e.point + kZ975 * *e.se);
  }
  return e;
}

namespace {

struct CellMasses {
  // [arm][event]: arm 1 = active, 0 = anchor; event 1 = event of interest
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double arm_total(int arm) const { return m[arm][0] + m[arm][1]; }
};

CellMasses weighted_cells(const IpdTrial& trial, const WeightVector& w,
                          int event_value) {
  if (w.weights.size() != trial.n()) {
    throw std::invalid_argument("weight length does not match record count");
  }
  CellMasses c;
  for (std::size_t i = 0; i < trial.n(); ++i) {
    const auto& rec = trial.records[i];
    const int arm = rec.arm == trial.arms.active ? 1 : 0;
    const int ev = rec.outcome == static_cast<double>(event_value) ? 1 : 0;
    c.m[arm][ev] += w.weights[i];
  }
  return c;
}

void require_positive_cells(const CellMasses& c, const IpdTrial& trial) {
  const char* arm_name[2] = {"anchor", "active"};
  const char* ev_name[2] = {"nonevent", "event"};
  for (int a = 0; a < 2; ++a)
    for (int e = 0; e < 2; ++e)
      if (!(c.m[a][e] > 0.0))
        throw DegenerateCellError("zero weighted mass in cell (" +
                                  std::string(arm_name[a]) + ", " +
                                  ev_name[e] + ") of trial " + trial.trial_id);
}

}  // namespace

EffectEstimate weighted_logodds(const IpdTrial& trial, const WeightVector& w,
                                int event_value) {
  if (trial.outcome_type != OutcomeType::binary) {
    throw std::invalid_argument("weighted_logodds: binary outcomes required");
  }
  const CellMasses c = weighted_cells(trial, w, event_value);
  require_positive_cells(c, trial);
  EffectEstimate e;
  e.scale = EffectScale::log_odds_ratio;
  e.point = std::log((c.m[1][1] * c.m[0][0]) / (c.m[1][0] * c.m[0][1]));
  e.provenance = "weighted logOR, trial " + trial.trial_id;
  return e;
}

EffectEstimate weighted_contrast(const IpdTrial& trial, const WeightVector& w,
                                 EffectScale scale, int event_value) {
  if (w.weights.size() != trial.n()) {
    throw std::invalid_argument("weighted_contrast: weight length mismatch");
  }
  if (scale != EffectScale::mean_difference &&
      trial.outcome_type != OutcomeType::binary) {
    throw std::invalid_argument("weighted_contrast: binary outcomes required");
  }

  // responses: event indicator for logOR/riskdiff, raw outcome for meandiff
  const std::size_t n = trial.n();
  std::vector<double> resp(n), z = trial.active_indicator();
  for (std::size_t i = 0; i < n; ++i) {
    resp[i] = scale == EffectScale::mean_difference
                  ? trial.records[i].outcome
                  : (trial.records[i].outcome == static_cast<double>(event_value)
                         ? 1.0
                         : 0.0);
  }

  // The marginal model is saturated in the arm indicator, so the weighted
  // estimating equations solve in closed form via per-arm weighted means.
  double sw[2] = {0.0, 0.0}, swy[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const int a = z[i] > 0.5 ? 1 : 0;
    sw[a] += w.weights[i];
    swy[a] += w.weights[i] * resp[i];
  }
  if (!(sw[0] > 0.0) || !(sw[1] > 0.0)) {
    throw DegenerateCellError("weighted_contrast: an arm has zero weighted mass");
  }
  const double mean1 = swy[1] / sw[1], mean0 = swy[0] / sw[0];

  double point;
  if (scale == EffectScale::log_odds_ratio) {
    const CellMasses c = weighted_cells(trial, w, event_value);
    require_positive_cells(c, trial);
    point = std::log(mean1 / (1.0 - mean1)) - std::log(mean0 / (1.0 - mean0));
  } else {
    point = mean1 - mean0;
  }

  // sandwich with X_i = (1, z_i); mu from the fitted saturated model
  double a11 = 0.0, a12 = 0.0, b11 = 0.0, b12 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = z[i] > 0.5 ? mean1 : mean0;
    const double v = scale == EffectScale::log_odds_ratio ? mu * (1.0 - mu) : 1.0;
    const double wi = w.weights[i];
    const double r = wi * (resp[i] - mu);
    a11 += wi * v;
    b11 += r * r;
    if (z[i] > 0.5) {
      a12 += wi * v;
      b12 += r * r;
    }
  }
  // A = [[a11, a12], [a12, a12]], B likewise with b's; var(beta1) of
  // A^{-1} B A^{-T} in closed form
  const double det = a12 * (a11 - a12);
  if (!(det > 0.0)) {
    throw DegenerateCellError("weighted_contrast: singular information matrix");
  }
  // A^{-1} rows: [a12, -a12]/det, [-a12, a11]/det ; slope row is the second
  const double i21 = -a12 / det, i22 = a11 / det;
  // var = [i21 i22] B [i21 i22]^T with B = [[b11, b12],[b12, b12]]
  const double var = i21 * i21 * b11 + 2.0 * i21 * i22 * b12 + i22 * i22 * b12;

  EffectEstimate e;
  e.scale = scale;
  e.point = point;
  e.se = std::sqrt(std::max(var, 0.0));
  e.provenance = "weighted contrast (" + to_string(scale) + "), trial " +
                 trial.trial_id;
  return with_ci(e);
}

EffectEstimate anchored_combine(const EffectEstimate& a,
                                const EffectEstimate& b) {
  if (a.scale != b.scale) {
    throw std::invalid_argument("anchored_combine: scale mismatch (" +
                                to_string(a.scale) + " vs " + to_string(b.scale) +
                                ")");
  }
  if (a.se.has_value() != b.se.has_value()) {
    throw std::invalid_argument(
        "anchored_combine: one estimate carries an se, the other does not");
  }
  EffectEstimate e;
  e.scale = a.scale;
  e.estimand = a.estimand == b.estimand ? a.estimand : "mixed";
  e.point = a.point - b.point;
  if (a.se) e.se = std::sqrt(*a.se * *a.se + *b.se * *b.se);
  e.provenance = "[" + a.provenance + "] minus [" + b.provenance + "]";
  return with_ci(e);
}

EffectEstimate published_effect(const AgdSummary& agd, int event_value) {
  if (agd.published_effect) {
    EffectEstimate e;
    e.scale = effect_scale_from_string(agd.published_effect->scale);
    e.point = agd.published_effect->point;
    e.se = agd.published_effect->se;
    e.provenance = "published effect, trial " + agd.trial_id;
    return with_ci(e);
  }
  if (agd.outcome_type != OutcomeType::binary) {
    throw AnalysisError(
        "published_effect: no published effect and outcomes are not binary "
        "counts (trial " + agd.trial_id + ")");
  }
  const double e1 = event_value == 0 ? agd.active_outcome.count_y0
                                     : agd.active_outcome.count_y1;
  const double ne1 = event_value == 0 ? agd.active_outcome.count_y1
                                      : agd.active_outcome.count_y0;
  const double e0 = event_value == 0 ? agd.anchor_outcome.count_y0
                                     : agd.anchor_outcome.count_y1;
  const double ne0 = event_value == 0 ? agd.anchor_outcome.count_y1
                                      : agd.anchor_outcome.count_y0;
  if (e1 <= 0.0 || ne1 <= 0.0 || e0 <= 0.0 || ne0 <= 0.0) {
    throw DegenerateCellError("published_effect: zero outcome cell in trial " +
                              agd.trial_id);
  }
  EffectEstimate e;
  e.scale = EffectScale::log_odds_ratio;
  e.point = std::log((e1 * ne0) / (ne1 * e0));
  e.se = std::sqrt(1.0 / e1 + 1.0 / ne1 + 1.0 / e0 + 1.0 / ne0);
  e.provenance = "logOR from published counts, trial " + agd.trial_id;
  return with_ci(e);
}

}  // namespace aitc
