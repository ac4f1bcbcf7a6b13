#pragma once

#include <cstddef>
#include <string_view>

// Dense double-precision kernels behind the numeric hot loops (simplex
// FTRAN/BTRAN/pricing, interhub flow aggregation, cut coefficients).
// A scalar reference implementation always exists; on x86 an AVX2 variant
// and on aarch64 a NEON variant are selected at runtime when the CPU
// supports them. Variants are equivalence-tested against the scalar path.

namespace hndpv::kernels {

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
bool backend_available(Backend b);
// Returns false if the requested backend is unavailable (selection unchanged).
bool set_backend(Backend b);
std::string_view backend_name(Backend b);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);

double sum(const double* a, std::size_t n);

// out[j] += sum_i weights[i] * rows[i*stride + j], for j in [0, ncols).
// Rows with weight 0 are skipped, so +-inf/NaN garbage in untouched rows
// cannot leak into the result.
void weighted_row_sum(const double* weights, const double* rows,
                      std::size_t nrows, std::size_t ncols, std::size_t stride,
                      double* out);

namespace detail {

// Scalar reference implementations (the ground truth for equivalence tests).
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
void weighted_row_sum_scalar(const double* weights, const double* rows,
                             std::size_t nrows, std::size_t ncols,
                             std::size_t stride, double* out);

#if HNDPV_HAVE_AVX2
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_avx2(const double* a, std::size_t n);
void weighted_row_sum_avx2(const double* weights, const double* rows,
                           std::size_t nrows, std::size_t ncols,
                           std::size_t stride, double* out);
#endif

#if HNDPV_HAVE_NEON
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
double dot_neon(const double* a, const double* b, std::size_t n);
double sum_neon(const double* a, std::size_t n);
void weighted_row_sum_neon(const double* weights, const double* rows,
                           std::size_t nrows, std::size_t ncols,
                           std::size_t stride, double* out);
#endif

} // namespace detail

} // namespace hndpv::kernels
