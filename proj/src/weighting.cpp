#include "aitc/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aitc/errors.hpp"
#include "aitc/kernels.hpp"

namespace aitc {

std::string to_string(EstimandKind k) {
  switch (k) {
    case EstimandKind::ATE: return "ATE";
    case EstimandKind::ATT: return "ATT";
    case EstimandKind::ATC: return "ATC";
    case EstimandKind::ATO: return "ATO";
  }
  return "ATO";
}

EstimandKind estimand_from_string(const std::string& s) {
  if (s == "ATE") return EstimandKind::ATE;
  if (s == "ATT") return EstimandKind::ATT;
  if (s == "ATC") return EstimandKind::ATC;
  if (s == "ATO") return EstimandKind::ATO;
  throw SchemaError("unknown estimand: " + s);
}

double tilt_value(EstimandKind kind, double eps) {
  if (eps < 0.0 || eps > 1.0) {
    throw std::invalid_argument("tilt: epsilon outside [0,1]");
  }
  switch (kind) {
    case EstimandKind::ATE: return 1.0;
    case EstimandKind::ATT: return eps;
    case EstimandKind::ATC: return 1.0 - eps;
    case EstimandKind::ATO: return eps * (1.0 - eps);
  }
  return 1.0;
}

std::vector<double> tilt(EstimandKind kind, std::span<const double> eps) {
  std::vector<double> h(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) h[i] = tilt_value(kind, eps[i]);
  return h;
}

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::sum_to_one: return "sum-to-one";
    case Normalization::mean_one: return "mean-one";
    case Normalization::raw: return "raw";
  }
  return "raw";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "sum-to-one") return Normalization::sum_to_one;
  if (s == "mean-one") return Normalization::mean_one;
  if (s == "raw") return Normalization::raw;
  throw SchemaError("unknown normalization: " + s);
}

double effective_sample_size(std::span<const double> weights) {
  const double s = kernels::sum(weights);
  const double ss = kernels::dot(weights, weights);
  if (ss <= 0.0) throw std::invalid_argument("ess: all weights zero");
  return s * s / ss;
}

WeightVector WeightVector::make(std::vector<double> w, Normalization norm) {
  if (w.empty()) throw std::invalid_argument("WeightVector: empty");
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw std::invalid_argument("WeightVector: negative or NaN weight");
    total += v;
  }
  if (total <= 0.0) throw std::invalid_argument("WeightVector: all weights zero");
  if (norm == Normalization::sum_to_one) {
    for (double& v : w) v /= total;
  } else if (norm == Normalization::mean_one) {
    const double mean = total / static_cast<double>(w.size());
    for (double& v : w) v /= mean;
  }
  WeightVector out;
  out.weights = std::move(w);
  out.normalization = norm;
  out.ess = effective_sample_size(out.weights);
  return out;
}

WeightVector WeightVector::uniform(std::size_t n, Normalization norm) {
  return make(std::vector<double>(n, 1.0), norm);
}

nlohmann::json WeightVector::to_json(
    std::span<const std::string> subject_ids) const {
  nlohmann::json j;
  j["schema"] = std::string(kSchemaVersion);
  j["weights"] = weights;
  j["normalization"] = to_string(normalization);
  j["ess"] = ess;
  if (!subject_ids.empty()) {
    j["subject_ids"] =
        std::vector<std::string>(subject_ids.begin(), subject_ids.end());
  }
  return j;
}

WeightVector WeightVector::from_json(const nlohmann::json& j) {
  try {
    return make(j.at("weights").get<std::vector<double>>(),
                normalization_from_string(j.at("normalization").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed weights JSON: ") + e.what());
  }
}

WeightVector maic_weights(const linalg::Matrix& covariates,
                          std::span<const double> target_means,
                          const MaicOptions& options) {
  const std::size_t n = covariates.rows();
  const std::size_t p = covariates.cols();
  if (target_means.size() != p) {
    throw std::invalid_argument("maic_weights: target length mismatch");
  }
  if (n == 0) throw std::invalid_argument("maic_weights: no rows");

  // Columns centered at the target; constant columns must already match.
  // Active columns are scaled by their SD for conditioning; the tilt
  // parameter alpha lives on that scale throughout.
  std::vector<std::size_t> active;
  linalg::Matrix d(n, p);
  std::vector<double> colscale(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += covariates(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = covariates(i, j) - mean;
      ss += dev * dev;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n > 1 ? n - 1 : 1));
    if (sd == 0.0) {
      if (std::abs(mean - target_means[j]) > 1e-12 * std::max(1.0, std::abs(mean))) {
        throw InfeasibleTargetError(
            "maic_weights: zero-variance covariate " + std::to_string(j) +
            " cannot be tilted to a different target");
      }
      continue;  // trivially matched; excluded from the solve
    }
    colscale[j] = sd;
    for (std::size_t i = 0; i < n; ++i)
      d(i, j) = (covariates(i, j) - target_means[j]) / sd;
    active.push_back(j);
  }

  const std::size_t m = active.size();
  std::vector<double> w(n, 1.0);
  if (m > 0) {
    std::vector<double> alpha(m, 0.0), eta(n, 0.0), g(m);
    std::vector<std::vector<double>> cols(m);
    for (std::size_t a = 0; a < m; ++a) {
      cols[a].resize(n);
      for (std::size_t i = 0; i < n; ++i) cols[a][i] = d(i, active[a]);
    }
    auto objective = [&]() { return kernels::sum(w); };  // dual: sum exp(eta)
    auto recompute_w = [&](std::span<const double> a_try,
                           std::vector<double>& w_out) {
      for (std::size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (std::size_t k = 0; k < m; ++k) e += cols[k][i] * a_try[k];
        w_out[i] = std::exp(e);
      }
    };
    recompute_w(alpha, w);
    double obj = objective();
    bool solved = false;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
      const double wsum = kernels::sum(w);
      double gmax = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        g[a] = kernels::dot(cols[a], w);
        gmax = std::max(gmax, std::abs(g[a]) / wsum);
      }
      if (gmax <= options.tolerance) {
        solved = true;
        break;
      }
      linalg::Matrix h(m, m);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
          h(a, b) = kernels::dot3(cols[a], cols[b], w);
          h(b, a) = h(a, b);
        }
      std::vector<double> step;
      try {
        step = linalg::solve_spd(h, g);
      } catch (const std::runtime_error&) {
        throw InfeasibleTargetError(
            "maic_weights: singular tilt Hessian; the target lies outside or "
            "on the boundary of the convex hull of the covariate rows");
      }
      double t = 1.0;
      bool improved = false;
      std::vector<double> alpha_try(m), w_try(n);
      for (int half = 0; half < 60; ++half) {
        for (std::size_t a = 0; a < m; ++a) alpha_try[a] = alpha[a] - t * step[a];
        recompute_w(alpha_try, w_try);
        const double obj_try = kernels::sum(w_try);
        // acceptance slack sits above the summation roundoff of the dual
        // objective; a genuinely divergent step overshoots by far more
        if (std::isfinite(obj_try) && obj_try <= obj * (1.0 + 1e-11)) {
          alpha = alpha_try;
          w = w_try;
          obj = obj_try;
          improved = true;
          break;
        }
        t /= 2.0;
      }
      if (!improved) {
        throw InfeasibleTargetError(
            "maic_weights: line search failed; target outside the convex hull "
            "of the covariate rows");
      }
    }
    if (!solved) {
      // final check: tolerate targets met at the boundary of iterations
      const double wsum = kernels::sum(w);
      double gmax = 0.0;
      for (std::size_t a = 0; a < m; ++a)
        gmax = std::max(gmax, std::abs(kernels::dot(cols[a], w)) / wsum);
      if (gmax > options.tolerance) {
        throw InfeasibleTargetError(
            "maic_weights: Newton did not converge; target likely outside or "
            "on the boundary of the convex hull");
      }
    }
  }
  return WeightVector::make(std::move(w), options.normalization);
}

WeightVector maic_weights_matching_variances(
    const linalg::Matrix& covariates, std::span<const double> target_means,
    std::span<const double> target_variances,
    std::span<const CovariateSpec> specs, const MaicOptions& options) {
  const std::size_t n = covariates.rows();
  const std::size_t p = covariates.cols();
  if (specs.size() != p || target_means.size() != p ||
      target_variances.size() != p) {
    throw std::invalid_argument("maic_weights_matching_variances: shape");
  }
  std::vector<std::size_t> cont;
  for (std::size_t j = 0; j < p; ++j)
    if (specs[j].kind == CovariateKind::continuous) cont.push_back(j);
  linalg::Matrix aug(n, p + cont.size());
  std::vector<double> targets(target_means.begin(), target_means.end());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) aug(i, j) = covariates(i, j);
  for (std::size_t k = 0; k < cont.size(); ++k) {
    const std::size_t j = cont[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = covariates(i, j) - target_means[j];
      aug(i, p + k) = dev * dev;
    }
    targets.push_back(target_variances[j]);
  }
  return maic_weights(aug, targets, options);
}

WeightVector overlap_weights(std::span<const double> eps, OverlapSide side) {
  std::vector<double> w(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] >= 0.0 && eps[i] <= 1.0)) {
      throw std::invalid_argument("overlap_weights: epsilon outside [0,1]");
    }
    w[i] = side == OverlapSide::ipd_trial_is_t1 ? 1.0 - eps[i] : eps[i];
  }
  return WeightVector::make(std::move(w), Normalization::raw);
}

AgdSummary weighted_covariate_summary(const IpdTrial& trial,
                                      const WeightVector& w) {
  if (w.weights.size() != trial.n()) {
    throw std::invalid_argument("weighted_covariate_summary: weight length");
  }
  const double wsum = kernels::sum(w.weights);
  if (wsum <= 0.0) {
    throw std::invalid_argument("weighted_covariate_summary: zero total weight");
  }
  AgdSummary agd = summarize_ipd(trial);
  agd.covariance.reset();
  agd.warnings.push_back("means are weighted; other fields are unweighted");
  for (std::size_t j = 0; j < trial.p(); ++j) {
    const auto col = trial.covariate_column(j);
    agd.covariate_means[j] = kernels::dot(w.weights, col) / wsum;
  }
  return agd;
}

}  // namespace aitc
