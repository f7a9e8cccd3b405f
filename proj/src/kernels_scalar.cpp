#include "aitc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace aitc::kernels::detail {

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double dot3_scalar(const double* x, const double* y, const double* z,
                   std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i] * z[i];
  return acc;
}

// exp(-|eta|) never overflows; |eta| is capped at 40 because beyond that the
// probability clamp takes over anyway (exp(-40) ~ 4e-18 < kProbFloor).
double logistic_one(double eta) {
  const double a = std::min(std::abs(eta), 40.0);
  const double t = std::exp(-a);
  const double p = eta >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
  return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

void logistic_scalar(const double* eta, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = logistic_one(eta[i]);
}

}  // namespace aitc::kernels::detail
