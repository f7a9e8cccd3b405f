#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aitc/data_model.hpp"
#include "aitc/linalg.hpp"

namespace aitc {

enum class CorrelationSource { published, borrowed_from_own_ipd, independence };
enum class BinaryRounding { threshold, exact_count };

std::string to_string(CorrelationSource s);
CorrelationSource correlation_source_from_string(const std::string& s);
std::string to_string(BinaryRounding r);
BinaryRounding binary_rounding_from_string(const std::string& s);

// Gaussian-copula covariate generating model: latent MVN with the given
// correlation; binary margins thresholded at the normal quantile of
// (1 - target mean), continuous margins shifted/scaled to target mean/SD.
struct CovGenModel {
  std::vector<CovariateSpec> specs;
  std::vector<double> target_means;
  std::vector<double> target_sds;  // binary entries derived, ignored
  CorrelationSource source = CorrelationSource::independence;
  linalg::Matrix latent_correlation;
  std::string algorithm;  // prng::kAlgorithmId
  std::uint64_t seed = 0;
  BinaryRounding rounding = BinaryRounding::threshold;
  std::vector<std::string> warnings;

  std::size_t p() const { return specs.size(); }

  nlohmann::json to_json() const;
  static CovGenModel from_json(const nlohmann::json& j);
};

// Converts the AgD covariance (published / borrowed from own IPD /
// independence) into a latent copula correlation.  Binary-binary entries are
// solved tetrachorically to 1e-6; binary-continuous entries use the
// point-biserial identity; continuous pairs map directly.  Non-PSD results
// are projected (eigenvalue clipping) with a warning; correlations that no
// copula can attain are errors.
CovGenModel build_model(const AgdSummary& agd, const IpdTrial* own,
                        CorrelationSource source, std::uint64_t seed,
                        BinaryRounding rounding = BinaryRounding::threshold);

// Draws n rows; pure function of (model, n): same inputs, bit-identical
// output.  With exact_count rounding, binary column j gets exactly
// round(n * mean_j) ones, assigned to the rows with the largest latent
// values (preserves the latent correlation while hitting counts exactly).
linalg::Matrix generate(const CovGenModel& model, std::size_t n);

// Latent correlation for a single binary pair: solves
// P(X1=1, X2=1) = p1*p2 + cov for the copula rho by bisection.
double tetrachoric_from_cov(double mean1, double mean2, double cov,
                            double tol = 1e-6);

}  // namespace aitc
