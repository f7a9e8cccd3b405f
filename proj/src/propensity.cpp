#include "aitc/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aitc/errors.hpp"
#include "aitc/kernels.hpp"

namespace aitc {

nlohmann::json PropensityModel::to_json() const {
  return {{"coefficients", coefficients},
          {"iterations", iterations},
          {"converged", converged},
          {"max_score", max_score}};
}

PropensityModel PropensityModel::from_json(const nlohmann::json& j) {
  PropensityModel m;
  m.coefficients = j.at("coefficients").get<std::vector<double>>();
  m.iterations = j.at("iterations").get<int>();
  m.converged = j.at("converged").get<bool>();
  m.max_score = j.at("max_score").get<double>();
  return m;
}

namespace {

double log_likelihood(std::span<const double> labels,
                      std::span<const double> mu) {
  double ll = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ll += labels[i] > 0.5 ? std::log(mu[i]) : std::log1p(-mu[i]);
  }
  return ll;
}

}  // namespace

PropensityModel fit_logistic(const linalg::Matrix& covariates,
                             std::span<const double> labels,
                             const LogisticFitOptions& options) {
  const std::size_t n = covariates.rows();
  const std::size_t p = covariates.cols();
  if (labels.size() != n) {
    throw std::invalid_argument("fit_logistic: label length mismatch");
  }
  if (n < p + 1) {
    throw std::invalid_argument("fit_logistic: need n >= p+1");
  }
  std::size_t ones = 0;
  for (double t : labels) ones += t > 0.5 ? 1 : 0;
  if (ones == 0 || ones == n) {
    throw std::invalid_argument("fit_logistic: labels contain a single class");
  }

  // standardize columns for conditioning; back-transform at the end
  std::vector<double> center(p, 0.0), scale(p, 1.0);
  linalg::Matrix xs(n, p + 1);
  for (std::size_t i = 0; i < n; ++i) xs(i, 0) = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += covariates(i, j);
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = covariates(i, j) - m;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n > 1 ? n - 1 : 1));
    if (!(sd > 0.0)) {
      throw std::invalid_argument("fit_logistic: zero-variance covariate at index " +
                                  std::to_string(j));
    }
    center[j] = m;
    scale[j] = sd;
    for (std::size_t i = 0; i < n; ++i)
      xs(i, j + 1) = (covariates(i, j) - m) / sd;
  }

  const std::size_t q = p + 1;
  std::vector<double> beta(q, 0.0), eta(n, 0.0), mu(n), resid(n), wvar(n);
  std::vector<std::vector<double>> cols(q);
  for (std::size_t j = 0; j < q; ++j) {
    cols[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) cols[j][i] = xs(i, j);
  }

  auto compute_mu = [&]() { kernels::logistic(eta, mu); };
  auto score_vec = [&](std::vector<double>& g) {
    for (std::size_t i = 0; i < n; ++i) resid[i] = labels[i] - mu[i];
    for (std::size_t j = 0; j < q; ++j) g[j] = kernels::dot(cols[j], resid);
  };

  compute_mu();
  double ll = log_likelihood(labels, mu);
  std::vector<double> g(q);
  PropensityModel model;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    score_vec(g);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    model.max_score = gmax;
    if (gmax <= options.tolerance) {
      converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) wvar[i] = mu[i] * (1.0 - mu[i]);
    linalg::Matrix h(q, q);
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = j; k < q; ++k) {
        h(j, k) = kernels::dot3(cols[j], cols[k], wvar);
        h(k, j) = h(j, k);
      }
    std::vector<double> step;
    try {
      step = linalg::solve_spd(h, g);
    } catch (const std::runtime_error&) {
      break;  // singular information matrix; report non-convergence
    }
    // step-halving on likelihood decrease
    double t = 1.0;
    bool improved = false;
    std::vector<double> beta_try(q), eta_try(n), mu_try(n);
    for (int half = 0; half < 40; ++half) {
      for (std::size_t j = 0; j < q; ++j) beta_try[j] = beta[j] + t * step[j];
      for (std::size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (std::size_t j = 0; j < q; ++j) e += xs(i, j) * beta_try[j];
        eta_try[i] = e;
      }
      kernels::logistic(eta_try, mu_try);
      const double ll_try = log_likelihood(labels, mu_try);
      // relative slack: near the optimum the likelihood gain drops below
      // its own summation roundoff, which must not stall the iteration
      if (ll_try >= ll - 1e-10 * (1.0 + std::abs(ll))) {
        beta = beta_try;
        eta = eta_try;
        mu = mu_try;
        ll = ll_try;
        improved = true;
        break;
      }
      t /= 2.0;
    }
    if (!improved) break;
    for (std::size_t j = 1; j < q; ++j) {
      if (std::abs(beta[j]) > options.separation_threshold) {
        throw SeparationError(
            "fit_logistic: separation suspected (|beta| > " +
            std::to_string(options.separation_threshold) +
            " on standardized covariates)");
      }
    }
  }
  score_vec(g);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  model.max_score = gmax;
  model.iterations = iter;
  model.converged = converged && gmax <= options.tolerance;

  // back-transform to the original covariate scale
  model.coefficients.assign(p + 1, 0.0);
  model.coefficients[0] = beta[0];
  for (std::size_t j = 0; j < p; ++j) {
    model.coefficients[j + 1] = beta[j + 1] / scale[j];
    model.coefficients[0] -= beta[j + 1] * center[j] / scale[j];
  }
  return model;
}

double predict(const PropensityModel& model, std::span<const double> x) {
  if (x.size() + 1 != model.coefficients.size()) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  double eta = model.coefficients[0];
  for (std::size_t j = 0; j < x.size(); ++j)
    eta += model.coefficients[j + 1] * x[j];
  return kernels::detail::logistic_one(eta);
}

std::vector<double> predict_all(const PropensityModel& model,
                                const linalg::Matrix& covariates) {
  if (covariates.cols() + 1 != model.coefficients.size()) {
    throw std::invalid_argument("predict_all: dimension mismatch");
  }
  const std::size_t n = covariates.rows();
  std::vector<double> eta(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double e = model.coefficients[0];
    for (std::size_t j = 0; j < covariates.cols(); ++j)
      e += model.coefficients[j + 1] * covariates(i, j);
    eta[i] = e;
  }
  kernels::logistic(eta, out);
  return out;
}

std::vector<StratumPropensity> exact_discrete_propensity(
    std::span<const StratumCounts> counts) {
  std::vector<StratumPropensity> out;
  out.reserve(counts.size());
  for (const auto& c : counts) {
    if (c.n_t1 < 0.0 || c.n_t0 < 0.0 || c.n_t1 + c.n_t0 <= 0.0) {
      throw std::invalid_argument("exact_discrete_propensity: stratum '" +
                                  c.label + "' has non-positive total count");
    }
    StratumPropensity sp;
    sp.label = c.label;
    sp.epsilon = c.n_t1 / (c.n_t1 + c.n_t0);
    sp.positivity_warning = (c.n_t1 == 0.0 || c.n_t0 == 0.0);
    out.push_back(sp);
  }
  return out;
}

}  // namespace aitc
