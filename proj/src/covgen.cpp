#include "aitc/covgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aitc/errors.hpp"
#include "aitc/normal.hpp"
#include "aitc/prng.hpp"

namespace aitc {

namespace {

constexpr std::uint32_t kCovgenPurpose = 0x4347;  // latent draws stream

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779;
}

}  // namespace

std::string to_string(CorrelationSource s) {
  switch (s) {
    case CorrelationSource::published: return "published";
    case CorrelationSource::borrowed_from_own_ipd: return "borrowed-from-own-ipd";
    case CorrelationSource::independence: return "independence";
  }
  return "independence";
}

CorrelationSource correlation_source_from_string(const std::string& s) {
  if (s == "published") return CorrelationSource::published;
  if (s == "borrowed-from-own-ipd") return CorrelationSource::borrowed_from_own_ipd;
  if (s == "independence") return CorrelationSource::independence;
  throw SchemaError("unknown correlation source: " + s);
}

std::string to_string(BinaryRounding r) {
  return r == BinaryRounding::threshold ? "threshold" : "exact-count";
}

BinaryRounding binary_rounding_from_string(const std::string& s) {
  if (s == "threshold") return BinaryRounding::threshold;
  if (s == "exact-count") return BinaryRounding::exact_count;
  throw SchemaError("unknown binary rounding: " + s);
}

double tetrachoric_from_cov(double mean1, double mean2, double cov,
                            double tol) {
  const double p11 = mean1 * mean2 + cov;
  const double lo = std::max(0.0, mean1 + mean2 - 1.0);
  const double hi = std::min(mean1, mean2);
  if (p11 < lo - 1e-12 || p11 > hi + 1e-12) {
    throw AnalysisError(
        "tetrachoric: joint probability implied by the covariance is outside "
        "the Frechet bounds");
  }
  const double q1 = normal::quantile(1.0 - mean1);
  const double q2 = normal::quantile(1.0 - mean2);
  // P(X1=1, X2=1) = P(Z1 > q1, Z2 > q2) = Phi2(-q1, -q2; rho), increasing
  // in rho; bisect.
  auto joint = [&](double rho) { return normal::bvn_cdf(-q1, -q2, rho); };
  double a = -1.0 + 1e-10, b = 1.0 - 1e-10;
  if (p11 <= joint(a)) return -1.0;
  if (p11 >= joint(b)) return 1.0;
  while (b - a > tol * 1e-3) {
    const double mid = 0.5 * (a + b);
    if (joint(mid) < p11) a = mid; else b = mid;
  }
  return 0.5 * (a + b);
}

nlohmann::json CovGenModel::to_json() const {
  nlohmann::json j;
  j["schema"] = std::string(kSchemaVersion);
  nlohmann::json covs = nlohmann::json::array();
  for (std::size_t k = 0; k < specs.size(); ++k) {
    covs.push_back({{"name", specs[k].name},
                    {"kind", to_string(specs[k].kind)},
                    {"mean", target_means[k]},
                    {"sd", target_sds[k]}});
  }
  j["covariates"] = covs;
  j["source"] = to_string(source);
  nlohmann::json corr = nlohmann::json::array();
  for (std::size_t r = 0; r < latent_correlation.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < latent_correlation.cols(); ++c)
      row.push_back(latent_correlation(r, c));
    corr.push_back(row);
  }
  j["latent_correlation"] = corr;
  j["algorithm"] = algorithm;
  j["seed"] = seed;
  j["binary_rounding"] = to_string(rounding);
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

CovGenModel CovGenModel::from_json(const nlohmann::json& j) {
  try {
    CovGenModel m;
    for (const auto& c : j.at("covariates")) {
      CovariateSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.kind = covariate_kind_from_string(c.at("kind").get<std::string>());
      m.specs.push_back(spec);
      m.target_means.push_back(c.at("mean").get<double>());
      m.target_sds.push_back(c.at("sd").get<double>());
    }
    m.source = correlation_source_from_string(j.at("source").get<std::string>());
    const auto& corr = j.at("latent_correlation");
    const std::size_t p = m.specs.size();
    m.latent_correlation = linalg::Matrix(p, p);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c)
        m.latent_correlation(r, c) = corr.at(r).at(c).get<double>();
    m.algorithm = j.at("algorithm").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.rounding = binary_rounding_from_string(j.at("binary_rounding").get<std::string>());
    if (j.contains("warnings"))
      m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed covgen JSON: ") + e.what());
  }
}

CovGenModel build_model(const AgdSummary& agd, const IpdTrial* own,
                        CorrelationSource source, std::uint64_t seed,
                        BinaryRounding rounding) {
  CovGenModel m;
  m.specs = agd.covariates;
  m.target_means = agd.covariate_means;
  m.source = source;
  m.seed = seed;
  m.rounding = rounding;
  m.algorithm = std::string(prng::kAlgorithmId);
  const std::size_t p = m.specs.size();

  std::optional<linalg::Matrix> cov;
  if (source == CorrelationSource::published) {
    if (!agd.covariance) {
      throw std::invalid_argument(
          "build_model: published source requires an AgD covariance");
    }
    cov = *agd.covariance;
  } else if (source == CorrelationSource::borrowed_from_own_ipd) {
    if (own == nullptr) {
      throw std::invalid_argument("build_model: borrowed source requires own IPD");
    }
    if (own->n() >= 2) cov = linalg::sample_covariance(own->covariate_matrix());
  }

  // margin SDs: covariance diagonal when available, else p(1-p) for binary
  m.target_sds.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (m.specs[j].kind == CovariateKind::binary) {
      const double mj = m.target_means[j];
      if (mj < 0.0 || mj > 1.0) {
        throw SchemaError("build_model: binary mean outside [0,1]");
      }
      if (mj == 0.0 || mj == 1.0) {
        m.warnings.push_back("degenerate binary margin: " + m.specs[j].name);
      }
      m.target_sds[j] = std::sqrt(std::max(mj * (1.0 - mj), 0.0));
    } else {
      if (!cov) {
        throw std::invalid_argument(
            "build_model: continuous margins need a covariance source for SDs");
      }
      m.target_sds[j] = std::sqrt(std::max((*cov)(j, j), 0.0));
    }
  }

  m.latent_correlation = linalg::Matrix::identity(p);
  if (cov && p > 1) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = j + 1; k < p; ++k) {
        const bool bj = m.specs[j].kind == CovariateKind::binary;
        const bool bk = m.specs[k].kind == CovariateKind::binary;
        const double c = (*cov)(j, k);
        double rho;
        if ((bj && (m.target_means[j] == 0.0 || m.target_means[j] == 1.0)) ||
            (bk && (m.target_means[k] == 0.0 || m.target_means[k] == 1.0))) {
          rho = 0.0;  // constant margin: correlation undefined, use 0
        } else if (bj && bk) {
          rho = tetrachoric_from_cov(m.target_means[j], m.target_means[k], c);
        } else if (!bj && !bk) {
          const double denom = m.target_sds[j] * m.target_sds[k];
          if (denom <= 0.0) {
            rho = 0.0;
          } else {
            rho = c / denom;
            if (std::abs(rho) > 1.0 + 1e-9) {
              throw AnalysisError("build_model: |correlation| > 1 between " +
                                  m.specs[j].name + " and " + m.specs[k].name);
            }
            rho = std::clamp(rho, -1.0, 1.0);
          }
        } else {
          // one binary, one continuous: cov = sd_cont * rho * pdf(q_bin)
          const std::size_t jb = bj ? j : k;
          const std::size_t jc = bj ? k : j;
          const double q = normal::quantile(1.0 - m.target_means[jb]);
          const double denom = m.target_sds[jc] * norm_pdf(q);
          if (denom <= 0.0) {
            rho = 0.0;
          } else {
            rho = c / denom;
            if (std::abs(rho) > 1.0 + 1e-9) {
              throw AnalysisError(
                  "build_model: biserial correlation outside [-1,1] between " +
                  m.specs[j].name + " and " + m.specs[k].name);
            }
            rho = std::clamp(rho, -1.0, 1.0);
          }
        }
        m.latent_correlation(j, k) = rho;
        m.latent_correlation(k, j) = rho;
      }
    }
    bool adjusted = false;
    const linalg::Matrix projected =
        linalg::nearest_psd_correlation(m.latent_correlation, adjusted);
    if (adjusted) {
      m.latent_correlation = projected;
      m.warnings.push_back(
          "latent correlation was not PSD; projected by eigenvalue clipping");
    }
  }
  return m;
}

linalg::Matrix generate(const CovGenModel& model, std::size_t n) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  if (model.algorithm != prng::kAlgorithmId) {
    throw SchemaError("generate: unknown PRNG algorithm id '" +
                      model.algorithm + "'");
  }
  const std::size_t p = model.p();
  const prng::Stream stream(model.seed, prng::stream_id(kCovgenPurpose));
  const linalg::Matrix root = linalg::psd_sqrt(model.latent_correlation);

  // latent MVN rows; plain scalar arithmetic to keep output bit-stable
  linalg::Matrix z(n, p);
  std::vector<double> g(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j)
      g[j] = stream.normal(static_cast<std::uint64_t>(i) * p + j);
    for (std::size_t j = 0; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < p; ++k) acc += root(j, k) * g[k];
      z(i, j) = acc;
    }
  }

  linalg::Matrix x(n, p);
  for (std::size_t j = 0; j < p; ++j) {
    if (model.specs[j].kind == CovariateKind::continuous) {
      for (std::size_t i = 0; i < n; ++i)
        x(i, j) = model.target_means[j] + model.target_sds[j] * z(i, j);
      continue;
    }
    const double mean = model.target_means[j];
    if (mean == 0.0 || mean == 1.0) {
      for (std::size_t i = 0; i < n; ++i) x(i, j) = mean;
      continue;
    }
    if (model.rounding == BinaryRounding::threshold) {
      const double q = normal::quantile(1.0 - mean);
      for (std::size_t i = 0; i < n; ++i) x(i, j) = z(i, j) > q ? 1.0 : 0.0;
    } else {
      // exactly round(n * mean) ones, at the rows with the largest latents
      const auto k = static_cast<std::size_t>(std::llround(
          static_cast<double>(n) * mean));
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return z(a, j) > z(b, j);
                       });
      for (std::size_t r = 0; r < n; ++r) x(order[r], j) = r < k ? 1.0 : 0.0;
    }
  }
  return x;
}

}  // namespace aitc
