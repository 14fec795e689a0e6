// AVX2/FMA variants of the arithmetic kernels. Compiled with -mavx2 -mfma and
// reached only after the runtime CPU check in kernels.cpp.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "rogd/kernels.hpp"

namespace rogd::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec_avx2(const double* m, const double* x, double* out, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        out[i] = dot_avx2(m + static_cast<std::size_t>(i) * cols, x, cols);
    }
}

void matmul_avx2(const double* a, const double* b, double* out, int n) {
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nn; ++i) {
        double* crow = out + i * nn;
        std::size_t j = 0;
        for (; j + 4 <= nn; j += 4) _mm256_storeu_pd(crow + j, _mm256_setzero_pd());
        for (; j < nn; ++j) crow[j] = 0.0;
        for (std::size_t k = 0; k < nn; ++k) {
            const double aik = a[i * nn + k];
            if (aik == 0.0) continue;
            const __m256d va = _mm256_set1_pd(aik);
            const double* brow = b + k * nn;
            j = 0;
            for (; j + 4 <= nn; j += 4) {
                const __m256d c = _mm256_loadu_pd(crow + j);
                _mm256_storeu_pd(crow + j, _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), c));
            }
            for (; j < nn; ++j) crow[j] += aik * brow[j];
        }
    }
}

double col_spread_avx2(const double* m, int rows, int cols) {
    if (rows <= 0 || cols <= 0) return 0.0;
    const std::size_t c = static_cast<std::size_t>(cols);
    double worst = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= c; j += 4) {
        __m256d lo = _mm256_loadu_pd(m + j);
        __m256d hi = lo;
        for (int i = 1; i < rows; ++i) {
            const __m256d v = _mm256_loadu_pd(m + static_cast<std::size_t>(i) * c + j);
            lo = _mm256_min_pd(lo, v);
            hi = _mm256_max_pd(hi, v);
        }
        worst = std::max(worst, hmax(_mm256_sub_pd(hi, lo)));
    }
    for (; j < c; ++j) {
        double lo = m[j];
        double hi = m[j];
        for (int i = 1; i < rows; ++i) {
            const double v = m[static_cast<std::size_t>(i) * c + j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

double weighted_cost_sum_avx2(double x, const double* w, const double* quad,
                              const double* center, const double* abs_coef, std::size_t n) {
    const __m256d vx = _mm256_set1_pd(x);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(vx, _mm256_loadu_pd(center + i));
        const __m256d ad = _mm256_andnot_pd(signmask, d);
        const __m256d q = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_loadu_pd(quad + i)),
                                        _mm256_mul_pd(d, d));
        const __m256d t = _mm256_fmadd_pd(_mm256_loadu_pd(abs_coef + i), ad, q);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), t, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x - center[i];
        s += w[i] * (0.5 * quad[i] * d * d + abs_coef[i] * std::fabs(d));
    }
    return s;
}

QuadReduction quad_reduce_avx2(const double* w, const double* quad, const double* center,
                               std::size_t n) {
    __m256d awq = _mm256_setzero_pd();
    __m256d awqc = _mm256_setzero_pd();
    __m256d awqcc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wq = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(quad + i));
        const __m256d c = _mm256_loadu_pd(center + i);
        awq = _mm256_add_pd(awq, wq);
        const __m256d wqc = _mm256_mul_pd(wq, c);
        awqc = _mm256_add_pd(awqc, wqc);
        awqcc = _mm256_fmadd_pd(wqc, c, awqcc);
    }
    QuadReduction r;
    r.wq = hsum(awq);
    r.wqc = hsum(awqc);
    r.wqcc = hsum(awqcc);
    for (; i < n; ++i) {
        const double wq = w[i] * quad[i];
        r.wq += wq;
        r.wqc += wq * center[i];
        r.wqcc += wq * center[i] * center[i];
    }
    return r;
}

}  // namespace rogd::kernels::detail
