#include "kernels_impl.hpp"

#if defined(VISEME_HAVE_NEON)

#include <arm_neon.h>

namespace viseme::kernels::detail {

void blend_neon(const double* base, double base_coef, const double* shapes, const double* weights,
                std::size_t rows, std::size_t n, double* out)
{
    const float64x2_t c = vdupq_n_f64(base_coef);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        vst1q_f64(out + k, vmulq_f64(c, vld1q_f64(base + k)));
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
        const float64x2_t wv = vdupq_n_f64(w);
        k = 0;
        for (; k + 4 <= n; k += 4) {
            float64x2_t a = vld1q_f64(out + k);
            float64x2_t b = vld1q_f64(out + k + 2);
            a = vfmaq_f64(a, wv, vld1q_f64(row + k));
            b = vfmaq_f64(b, wv, vld1q_f64(row + k + 2));
            vst1q_f64(out + k, a);
            vst1q_f64(out + k + 2, b);
        }
        for (; k + 2 <= n; k += 2) {
            vst1q_f64(out + k, vfmaq_f64(vld1q_f64(out + k), wv, vld1q_f64(row + k)));
        }
        for (; k < n; ++k) {
            out[k] += w * row[k];
        }
    }
}

void row_dots_neon(const double* rows, const double* adjoint, std::size_t row_count, std::size_t n,
                   double* grad)
{
    for (std::size_t i = 0; i < row_count; ++i) {
        const double* row = rows + i * n;
        float64x2_t acc0 = vdupq_n_f64(0.0);
        float64x2_t acc1 = vdupq_n_f64(0.0);
        std::size_t k = 0;
        for (; k + 4 <= n; k += 4) {
            acc0 = vfmaq_f64(acc0, vld1q_f64(row + k), vld1q_f64(adjoint + k));
            acc1 = vfmaq_f64(acc1, vld1q_f64(row + k + 2), vld1q_f64(adjoint + k + 2));
        }
        for (; k + 2 <= n; k += 2) {
            acc0 = vfmaq_f64(acc0, vld1q_f64(row + k), vld1q_f64(adjoint + k));
        }
        double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
        for (; k < n; ++k) {
            acc += row[k] * adjoint[k];
        }
        grad[i] = acc;
    }
}

}  // namespace viseme::kernels::detail

#endif
