#pragma once

// Data-parallel inner loops of the blend model. Each kernel has a scalar
// reference implementation and vectorized variants; the variant is chosen
// once at startup from the CPU's capabilities and can be overridden for
// equivalence testing.

#include <cstddef>
#include <span>
#include <string_view>

namespace viseme::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

/// Best variant compiled in and supported by this CPU.
Isa detect_isa() noexcept;
/// Variant currently used by the dispatching entry points.
Isa active_isa() noexcept;
/// Returns false (and changes nothing) if `isa` is unavailable here.
bool set_active_isa(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

/// out[k] = base_coef * base[k] + sum_i weights[i] * shapes[i*n + k]
/// with n = out.size() and shapes holding weights.size() rows of n values.
void blend(std::span<const double> base, double base_coef, std::span<const double> shapes,
           std::span<const double> weights, std::span<double> out);

/// grad[i] = sum_k rows[i*n + k] * adjoint[k], n = adjoint.size().
void row_dots(std::span<const double> rows, std::span<const double> adjoint, std::span<double> grad);

/// Direct access to one variant, bypassing dispatch (tests and benchmarks).
void blend(Isa isa, std::span<const double> base, double base_coef, std::span<const double> shapes,
           std::span<const double> weights, std::span<double> out);
void row_dots(Isa isa, std::span<const double> rows, std::span<const double> adjoint, std::span<double> grad);

}  // namespace viseme::kernels
