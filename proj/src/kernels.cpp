#include "aitc/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace aitc::kernels {

namespace {

struct Vtable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*dot3)(const double*, const double*, const double*, std::size_t);
  void (*logistic)(const double*, double*, std::size_t);
};

constexpr Vtable kScalar{detail::sum_scalar, detail::dot_scalar,
                         detail::dot3_scalar, detail::logistic_scalar};

#if defined(AITC_HAVE_AVX2_BUILD)
constexpr Vtable kAvx2{detail::sum_avx2, detail::dot_avx2, detail::dot3_avx2,
                       detail::logistic_avx2};
#endif

Backend pick_default() {
  if (const char* env = std::getenv("ARBITER_ITC_FORCE_SCALAR");
      env != nullptr && env[0] != '\0') {
    return Backend::scalar;
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

struct State {
  Backend backend = pick_default();
  const Vtable* table = nullptr;
  State() { table = backend == Backend::scalar ? &kScalar : avx2_table(); }
  static const Vtable* avx2_table() {
#if defined(AITC_HAVE_AVX2_BUILD)
    return &kAvx2;
#else
    return &kScalar;
#endif
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

bool avx2_supported() {
#if defined(AITC_HAVE_AVX2_BUILD)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return state().backend; }

std::string_view backend_name() {
  return state().backend == Backend::avx2 ? "avx2" : "scalar";
}

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_supported()) {
    throw std::invalid_argument("avx2 backend not available on this host");
  }
  state().backend = b;
  state().table = b == Backend::scalar ? &kScalar : State::avx2_table();
}

double sum(std::span<const double> x) {
  return state().table->sum(x.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  return state().table->dot(x.data(), y.data(), x.size());
}

double dot3(std::span<const double> x, std::span<const double> y,
            std::span<const double> z) {
  return state().table->dot3(x.data(), y.data(), z.data(), x.size());
}

void logistic(std::span<const double> eta, std::span<double> out) {
  state().table->logistic(eta.data(), out.data(), eta.size());
}

}  // namespace aitc::kernels
