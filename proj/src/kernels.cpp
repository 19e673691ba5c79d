#include "lava/kernels.hpp"
#include "lava/common.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#if LAVA_HAVE_AVX2_TU
namespace lava::kernels::avx2 {
double dot(const double*, const double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
void ger(double, const double*, std::size_t, const double*, std::size_t,
         double*, std::size_t);
}  // namespace lava::kernels::avx2
#endif
#if LAVA_HAVE_NEON_TU
namespace lava::kernels::neon {
double dot(const double*, const double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
void ger(double, const double*, std::size_t, const double*, std::size_t,
         double*, std::size_t);
}  // namespace lava::kernels::neon
#endif

namespace lava::kernels {
namespace {

struct Ops {
  Backend id;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*ger)(double, const double*, std::size_t, const double*, std::size_t,
              double*, std::size_t);
};

constexpr Ops kScalarOps{Backend::scalar, scalar::dot, scalar::axpy,
                         scalar::ger};
#if LAVA_HAVE_AVX2_TU
constexpr Ops kAvx2Ops{Backend::avx2, avx2::dot, avx2::axpy, avx2::ger};
#endif
#if LAVA_HAVE_NEON_TU
constexpr Ops kNeonOps{Backend::neon, neon::dot, neon::axpy, neon::ger};
#endif

bool cpu_supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if LAVA_HAVE_AVX2_TU
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if LAVA_HAVE_NEON_TU
      return true;  // baseline on aarch64
#else
      return false;
#endif
    default:
      return false;
  }
}

const Ops* ops_for(Backend b) {
  switch (b) {
#if LAVA_HAVE_AVX2_TU
    case Backend::avx2:
      return &kAvx2Ops;
#endif
#if LAVA_HAVE_NEON_TU
    case Backend::neon:
      return &kNeonOps;
#endif
    default:
      return &kScalarOps;
  }
}

Backend detect() {
  if (const char* env = std::getenv("LAVA_KERNELS")) {
    if (!std::strcmp(env, "scalar")) return Backend::scalar;
    if (!std::strcmp(env, "avx2") && cpu_supported(Backend::avx2))
      return Backend::avx2;
    if (!std::strcmp(env, "neon") && cpu_supported(Backend::neon))
      return Backend::neon;
    // unknown or unsupported value: fall through to detection
  }
  if (cpu_supported(Backend::avx2)) return Backend::avx2;
  if (cpu_supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

std::atomic<const Ops*> g_ops{nullptr};

const Ops* resolve() {
  const Ops* cur = g_ops.load(std::memory_order_acquire);
  if (!cur) {
    cur = ops_for(detect());
    g_ops.store(cur, std::memory_order_release);
  }
  return cur;
}

}  // namespace

Backend active_backend() { return resolve()->id; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
    default:
      return "auto";
  }
}

void set_backend(Backend b) {
  if (b == Backend::auto_detect) {
    g_ops.store(ops_for(detect()), std::memory_order_release);
    return;
  }
  if (!cpu_supported(b))
    throw ArgumentError(std::string("kernel backend not available: ") +
                        backend_name(b));
  g_ops.store(ops_for(b), std::memory_order_release);
}

double dot(const double* x, const double* y, std::size_t n) {
  return resolve()->dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  resolve()->axpy(a, x, y, n);
}

void ger(double a, const double* x, std::size_t m, const double* y,
         std::size_t n, double* A, std::size_t lda) {
  resolve()->ger(a, x, m, y, n, A, lda);
}

}  // namespace lava::kernels
