#include "rogd/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rogd::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec_scalar(const double* m, const double* x, double* out, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        out[i] = dot_scalar(m + static_cast<std::size_t>(i) * cols, x, cols);
    }
}

void matmul_scalar(const double* a, const double* b, double* out, int n) {
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nn; ++i) {
        double* crow = out + i * nn;
        for (std::size_t j = 0; j < nn; ++j) crow[j] = 0.0;
        for (std::size_t k = 0; k < nn; ++k) {
            const double aik = a[i * nn + k];
            if (aik == 0.0) continue;
            const double* brow = b + k * nn;
            for (std::size_t j = 0; j < nn; ++j) crow[j] += aik * brow[j];
        }
    }
}

double col_spread_scalar(const double* m, int rows, int cols) {
    if (rows <= 0 || cols <= 0) return 0.0;
    double worst = 0.0;
    for (int j = 0; j < cols; ++j) {
        double lo = m[j];
        double hi = m[j];
        for (int i = 1; i < rows; ++i) {
            const double v = m[static_cast<std::size_t>(i) * cols + j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

double weighted_cost_sum_scalar(double x, const double* w, const double* quad,
                                const double* center, const double* abs_coef, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x - center[i];
        s += w[i] * (0.5 * quad[i] * d * d + abs_coef[i] * std::fabs(d));
    }
    return s;
}

QuadReduction quad_reduce_scalar(const double* w, const double* quad, const double* center,
                                 std::size_t n) {
    QuadReduction r;
    for (std::size_t i = 0; i < n; ++i) {
        const double wq = w[i] * quad[i];
        r.wq += wq;
        r.wqc += wq * center[i];
        r.wqcc += wq * center[i] * center[i];
    }
    return r;
}

#if ROGD_HAVE_AVX2
double dot_avx2(const double* a, const double* b, std::size_t n);
void matvec_avx2(const double* m, const double* x, double* out, int rows, int cols);
void matmul_avx2(const double* a, const double* b, double* out, int n);
double col_spread_avx2(const double* m, int rows, int cols);
double weighted_cost_sum_avx2(double x, const double* w, const double* quad,
                              const double* center, const double* abs_coef, std::size_t n);
QuadReduction quad_reduce_avx2(const double* w, const double* quad, const double* center,
                               std::size_t n);
#endif

Backend detect() {
#if ROGD_HAVE_AVX2
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Backend::avx2;
#endif
    return Backend::scalar;
}

Backend& current() {
    static Backend b = detect();
    return b;
}

}  // namespace detail

bool avx2_supported() {
#if ROGD_HAVE_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() { return detail::current(); }

std::string_view backend_name() {
    return detail::current() == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported()) {
        throw std::invalid_argument("kernels: avx2 backend not available on this host");
    }
    detail::current() = b;
}

void reset_backend() { detail::current() = detail::detect(); }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("kernels::dot: size mismatch");
#if ROGD_HAVE_AVX2
    if (detail::current() == Backend::avx2) return detail::dot_avx2(a.data(), b.data(), a.size());
#endif
    return detail::dot_scalar(a.data(), b.data(), a.size());
}

void matvec(const double* m, const double* x, double* out, int rows, int cols) {
#if ROGD_HAVE_AVX2
    if (detail::current() == Backend::avx2) {
        detail::matvec_avx2(m, x, out, rows, cols);
        return;
    }
#endif
    detail::matvec_scalar(m, x, out, rows, cols);
}

void matmul(const double* a, const double* b, double* out, int n) {
#if ROGD_HAVE_AVX2
    if (detail::current() == Backend::avx2) {
        detail::matmul_avx2(a, b, out, n);
        return;
    }
#endif
    detail::matmul_scalar(a, b, out, n);
}

double col_spread(const double* m, int rows, int cols) {
#if ROGD_HAVE_AVX2
    if (detail::current() == Backend::avx2) return detail::col_spread_avx2(m, rows, cols);
#endif
    return detail::col_spread_scalar(m, rows, cols);
}

double weighted_cost_sum(double x, std::span<const double> w, std::span<const double> quad,
                         std::span<const double> center, std::span<const double> abs_coef) {
    const std::size_t n = w.size();
    if (quad.size() != n || center.size() != n || abs_coef.size() != n) {
        throw std::invalid_argument("kernels::weighted_cost_sum: size mismatch");
    }
#if ROGD_HAVE_AVX2
    if (detail::current() == Backend::avx2) {
        return detail::weighted_cost_sum_avx2(x, w.data(), quad.data(), center.data(),
                                              abs_coef.data(), n);
    }
#endif
    return detail::weighted_cost_sum_scalar(x, w.data(), quad.data(), center.data(),
                                            abs_coef.data(), n);
}

QuadReduction quad_reduce(std::span<const double> w, std::span<const double> quad,
                          std::span<const double> center) {
    const std::size_t n = w.size();
    if (quad.size() != n || center.size() != n) {
        throw std::invalid_argument("kernels::quad_reduce: size mismatch");
    }
#if ROGD_HAVE_AVX2
    if (detail::current() == Backend::avx2) {
        return detail::quad_reduce_avx2(w.data(), quad.data(), center.data(), n);
    }
#endif
    return detail::quad_reduce_scalar(w.data(), quad.data(), center.data(), n);
}

}  // namespace rogd::kernels
