#include "lava/kernels.hpp"

namespace lava::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n) {
  // four accumulators so the loop is not one long dependency chain
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void ger(double a, const double* x, std::size_t m, const double* y,
         std::size_t n, double* A, std::size_t lda) {
  for (std::size_t j = 0; j < n; ++j) {
    const double ay = a * y[j];
    double* col = A + j * lda;
    for (std::size_t i = 0; i < m; ++i) col[i] += ay * x[i];
  }
}

}  // namespace lava::kernels::scalar
