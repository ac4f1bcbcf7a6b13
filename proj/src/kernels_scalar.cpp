#include "hndpv/kernels.hpp"

namespace hndpv::kernels::detail {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void weighted_row_sum_scalar(const double* weights, const double* rows,
                             std::size_t nrows, std::size_t ncols,
                             std::size_t stride, double* out) {
  for (std::size_t i = 0; i < nrows; ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const double* row = rows + i * stride;
    for (std::size_t j = 0; j < ncols; ++j) out[j] += w * row[j];
  }
}

} // namespace hndpv::kernels::detail
