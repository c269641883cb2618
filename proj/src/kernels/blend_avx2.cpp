// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "kernels_impl.hpp"

#include <immintrin.h>

namespace viseme::kernels::detail {

namespace {

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void blend_avx2(const double* base, double base_coef, const double* shapes, const double* weights,
                std::size_t rows, std::size_t n, double* out)
{
    const __m256d c = _mm256_set1_pd(base_coef);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(out + k, _mm256_mul_pd(c, _mm256_loadu_pd(base + k)));
    }
    for (; k < n; ++k) {
        out[k] = base_coef * base[k];
    }

    for (std::size_t i = 0; i < rows; ++i) {
        const double w = weights[i];
        if (w == 0.0) {
            continue;
        }
        const double* row = shapes + i * n;
        const __m256d wv = _mm256_set1_pd(w);
        k = 0;
        for (; k + 8 <= n; k += 8) {
            __m256d a = _mm256_loadu_pd(out + k);
            __m256d b = _mm256_loadu_pd(out + k + 4);
            a = _mm256_fmadd_pd(wv, _mm256_loadu_pd(row + k), a);
            b = _mm256_fmadd_pd(wv, _mm256_loadu_pd(row + k + 4), b);
            _mm256_storeu_pd(out + k, a);
            _mm256_storeu_pd(out + k + 4, b);
        }
        for (; k + 4 <= n; k += 4) {
            _mm256_storeu_pd(out + k, _mm256_fmadd_pd(wv, _mm256_loadu_pd(row + k), _mm256_loadu_pd(out + k)));
        }
        for (; k < n; ++k) {
            out[k] += w * row[k];
        }
    }
}

void row_dots_avx2(const double* rows, const double* adjoint, std::size_t row_count, std::size_t n,
                   double* grad)
{
    for (std::size_t i = 0; i < row_count; ++i) {
        const double* row = rows + i * n;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t k = 0;
        for (; k + 8 <= n; k += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + k), _mm256_loadu_pd(adjoint + k), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + k + 4), _mm256_loadu_pd(adjoint + k + 4), acc1);
        }
        for (; k + 4 <= n; k += 4) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + k), _mm256_loadu_pd(adjoint + k), acc0);
        }
        double acc = hsum(_mm256_add_pd(acc0, acc1));
        for (; k < n; ++k) {
            acc += row[k] * adjoint[k];
        }
        grad[i] = acc;
    }
}

}  // namespace viseme::kernels::detail
