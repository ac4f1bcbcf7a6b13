#include "hndpv/kernels.hpp"

#if HNDPV_HAVE_NEON

#include <arm_neon.h>

namespace hndpv::kernels::detail {

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vaddq_f64(vy, vmulq_f64(va, vld1q_f64(x + i)));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += a[i];
  return r;
}

void weighted_row_sum_neon(const double* weights, const double* rows,
                           std::size_t nrows, std::size_t ncols,
                           std::size_t stride, double* out) {
  for (std::size_t i = 0; i < nrows; ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    axpy_neon(w, rows + i * stride, out, ncols);
  }
}

} // namespace hndpv::kernels::detail

#endif // HNDPV_HAVE_NEON
