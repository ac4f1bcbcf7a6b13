#include "hndpv/kernels.hpp"

namespace hndpv::kernels {

namespace {

struct Vtable {
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*weighted_row_sum)(const double*, const double*, std::size_t,
                           std::size_t, std::size_t, double*);
};

constexpr Vtable kScalar{detail::axpy_scalar, detail::dot_scalar,
                         detail::sum_scalar, detail::weighted_row_sum_scalar};

#if HNDPV_HAVE_AVX2
constexpr Vtable kAvx2{detail::axpy_avx2, detail::dot_avx2, detail::sum_avx2,
                       detail::weighted_row_sum_avx2};
#endif
#if HNDPV_HAVE_NEON
constexpr Vtable kNeon{detail::axpy_neon, detail::dot_neon, detail::sum_neon,
                       detail::weighted_row_sum_neon};
#endif

Backend detect() {
#if HNDPV_HAVE_AVX2
  if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
#if HNDPV_HAVE_NEON
  return Backend::Neon;
#endif
  return Backend::Scalar;
}

const Vtable* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &kScalar;
    case Backend::Avx2:
#if HNDPV_HAVE_AVX2
      if (__builtin_cpu_supports("avx2")) return &kAvx2;
#endif
      return nullptr;
    case Backend::Neon:
#if HNDPV_HAVE_NEON
      return &kNeon;
#endif
      return nullptr;
  }
  return nullptr;
}

struct State {
  Backend backend = detect();
  const Vtable* vt = table_for(detect());
};

State& state() {
  static State s;
  return s;
}

} // namespace

Backend active_backend() { return state().backend; }

bool backend_available(Backend b) { return table_for(b) != nullptr; }

bool set_backend(Backend b) {
  const Vtable* vt = table_for(b);
  if (!vt) return false;
  state().backend = b;
  state().vt = vt;
  return true;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  state().vt->axpy(alpha, x, y, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  return state().vt->dot(a, b, n);
}

double sum(const double* a, std::size_t n) { return state().vt->sum(a, n); }

void weighted_row_sum(const double* weights, const double* rows,
                      std::size_t nrows, std::size_t ncols, std::size_t stride,
                      double* out) {
  state().vt->weighted_row_sum(weights, rows, nrows, ncols, stride, out);
}

} // namespace hndpv::kernels
