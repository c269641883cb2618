#pragma once

#include <cstddef>

namespace viseme::kernels::detail {

using BlendFn = void (*)(const double* base, double base_coef, const double* shapes, const double* weights,
                         std::size_t rows, std::size_t n, double* out);
using RowDotsFn = void (*)(const double* rows, const double* adjoint, std::size_t row_count, std::size_t n,
                           double* grad);

void blend_scalar(const double* base, double base_coef, const double* shapes, const double* weights,
                  std::size_t rows, std::size_t n, double* out);
void row_dots_scalar(const double* rows, const double* adjoint, std::size_t row_count, std::size_t n,
                     double* grad);

#if defined(VISEME_HAVE_AVX2)
void blend_avx2(const double* base, double base_coef, const double* shapes, const double* weights,
                std::size_t rows, std::size_t n, double* out);
void row_dots_avx2(const double* rows, const double* adjoint, std::size_t row_count, std::size_t n,
                   double* grad);
#endif

#if defined(VISEME_HAVE_NEON)
void blend_neon(const double* base, double base_coef, const double* shapes, const double* weights,
                std::size_t rows, std::size_t n, double* out);
void row_dots_neon(const double* rows, const double* adjoint, std::size_t row_count, std::size_t n,
                   double* grad);
#endif

}  // namespace viseme::kernels::detail
