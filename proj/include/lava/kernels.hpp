#ifndef LAVA_KERNELS_HPP
#define LAVA_KERNELS_HPP

#include <cstddef>

// Low-level dense kernels used by the streaming solver: scalar reference
// implementations plus SIMD variants (AVX2 on x86-64, NEON on aarch64)
// selected at runtime. All variants compute the same quantities; the test
// suite checks them against each other on every build.
//
// Matrices are column-major with leading dimension lda, matching Eigen's
// default storage.

namespace lava::kernels {

enum class Backend { auto_detect, scalar, avx2, neon };

// Active backend after resolution (never auto_detect).
Backend active_backend();
const char* backend_name(Backend b);

// Force a backend. Throws ArgumentError if unsupported on this machine.
// Environment variable LAVA_KERNELS=scalar|avx2|neon does the same at
// first use.
void set_backend(Backend b);

// sum_i x[i] * y[i]
double dot(const double* x, const double* y, std::size_t n);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);

// A += a * x * y^T, A column-major m x n with leading dimension lda
void ger(double a, const double* x, std::size_t m, const double* y,
         std::size_t n, double* A, std::size_t lda);

// Reference implementations, always available; used directly by the
// equivalence tests.
namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void ger(double a, const double* x, std::size_t m, const double* y,
         std::size_t n, double* A, std::size_t lda);
}  // namespace scalar

}  // namespace lava::kernels

#endif
