#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel arithmetic kernels behind the statistical layers.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds
// with AVX2 support, a vectorized variant selected once at startup.  The
// variants reassociate floating-point sums, so backends agree to roundoff,
// not bitwise; the equivalence suite in tests/test_kernels.cpp pins the
// tolerances.  Code that needs bit-identical output across machines (the
// covariate generator) must not call these.

namespace aitc::kernels {

enum class Backend { scalar, avx2 };

// True when the binary contains the AVX2 variants and the CPU can run them.
bool avx2_supported();

// Backend in use. Defaults to AVX2 when supported unless the environment
// variable ARBITER_ITC_FORCE_SCALAR is set (to anything non-empty).
Backend active_backend();
std::string_view backend_name();

// Force a backend; throws std::invalid_argument if unavailable on this host.
void set_backend(Backend b);

// Fitted probabilities are kept strictly inside (0,1).
inline constexpr double kProbFloor = 1e-15;

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double dot3(std::span<const double> x, std::span<const double> y,
            std::span<const double> z);

// out[i] = clamp(1/(1+exp(-eta[i])), kProbFloor, 1-kProbFloor)
void logistic(std::span<const double> eta, std::span<double> out);

namespace detail {
double sum_scalar(const double* x, std::size_t n);
double dot_scalar(const double* x, const double* y, std::size_t n);
double dot3_scalar(const double* x, const double* y, const double* z,
                   std::size_t n);
void logistic_scalar(const double* eta, double* out, std::size_t n);
double logistic_one(double eta);

#if defined(AITC_HAVE_AVX2_BUILD)
double sum_avx2(const double* x, std::size_t n);
double dot_avx2(const double* x, const double* y, std::size_t n);
double dot3_avx2(const double* x, const double* y, const double* z,
                 std::size_t n);
void logistic_avx2(const double* eta, double* out, std::size_t n);
#endif
}  // namespace detail

}  // namespace aitc::kernels
