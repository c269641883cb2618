#include "kernels_impl.hpp"

namespace viseme::kernels::detail {

void blend_scalar(const double* base, double base_coef, const double* shapes, const double* weights,
                  std::size_t rows, std::size_t n, double* out)
{
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = base_coef * base[k];
    }
    for (std::size_t i = 0; i < rows; ++i) {
        const double w = weights[i];
        if (w == 0.0) {
            continue;
        }
        const double* row = shapes + i * n;
        for (std::size_t k = 0; k < n; ++k) {
            out[k] += w * row[k];
        }
    }
}

void row_dots_scalar(const double* rows, const double* adjoint, std::size_t row_count, std::size_t n,
                     double* grad)
{
    for (std::size_t i = 0; i < row_count; ++i) {
        const double* row = rows + i * n;
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += row[k] * adjoint[k];
        }
        grad[i] = acc;
    }
}

}  // namespace viseme::kernels::detail
