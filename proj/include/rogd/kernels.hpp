#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Arithmetic inner loops used by the matrix-product and regret pipelines.
// Every kernel has a scalar reference implementation and (on x86-64) an AVX2
// variant; the variant is selected once at runtime from CPU capabilities.
// SIMD results may differ from scalar in the last few ulps (different
// reduction order), never beyond; the equivalence tests pin that contract.
namespace rogd::kernels {

enum class Backend { scalar, avx2 };

bool avx2_supported();
Backend active_backend();
std::string_view backend_name();

// Force a specific backend (tests, reproducibility studies). Throws
// std::invalid_argument if the requested backend is unavailable.
void force_backend(Backend b);
void reset_backend();

// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

// out = M * x for a row-major rows x cols matrix.
void matvec(const double* m, const double* x, double* out, int rows, int cols);

// out = A * B for row-major n x n matrices. out must not alias a or b.
void matmul(const double* a, const double* b, double* out, int n);

// max over columns j of (max_i m[i][j] - min_i m[i][j]); 0 for empty input.
double col_spread(const double* m, int rows, int cols);

// sum_i w[i] * (0.5 * quad[i] * (x - center[i])^2 + abs_coef[i] * |x - center[i]|)
double weighted_cost_sum(double x, std::span<const double> w, std::span<const double> quad,
                         std::span<const double> center, std::span<const double> abs_coef);

// Reductions used by the closed-form weighted least-squares minimizer:
// wq = sum w*q, wqc = sum w*q*c, wqcc = sum w*q*c^2.
struct QuadReduction {
    double wq = 0.0;
    double wqc = 0.0;
    double wqcc = 0.0;
};
QuadReduction quad_reduce(std::span<const double> w, std::span<const double> quad,
                          std::span<const double> center);

}  // namespace rogd::kernels
