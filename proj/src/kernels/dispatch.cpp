#include "viseme/kernels.hpp"

#include "kernels_impl.hpp"
#include "viseme/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace viseme::kernels {

namespace {

struct Table {
    detail::BlendFn blend;
    detail::RowDotsFn row_dots;
};

Table table_for(Isa isa) noexcept
{
    switch (isa) {
#if defined(VISEME_HAVE_AVX2)
    case Isa::Avx2:
        return {detail::blend_avx2, detail::row_dots_avx2};
#endif
#if defined(VISEME_HAVE_NEON)
    case Isa::Neon:
        return {detail::blend_neon, detail::row_dots_neon};
#endif
    default:
        return {detail::blend_scalar, detail::row_dots_scalar};
    }
}

Isa initial_isa() noexcept
{
    // VISEME_ISA=scalar forces the reference path, e.g. for bisecting numeric differences.
    if (const char* env = std::getenv("VISEME_ISA")) {
        const std::string v(env);
        if (v == "scalar") {
            return Isa::Scalar;
        }
    }
    return detect_isa();
}

std::atomic<Isa>& active() noexcept
{
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

void check_blend(std::span<const double> base, std::span<const double> shapes, std::span<const double> weights,
                 std::span<double> out)
{
    if (base.size() != out.size() || shapes.size() != weights.size() * out.size()) {
        throw DimensionError("blend: shapes must hold weights.size() rows of out.size() values");
    }
}

void check_row_dots(std::span<const double> rows, std::span<const double> adjoint, std::span<double> grad)
{
    if (rows.size() != grad.size() * adjoint.size()) {
        throw DimensionError("row_dots: rows must hold grad.size() rows of adjoint.size() values");
    }
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept
{
    switch (isa) {
    case Isa::Avx2:
        return "avx2";
    case Isa::Neon:
        return "neon";
    default:
        return "scalar";
    }
}

bool isa_available(Isa isa) noexcept
{
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(VISEME_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::Neon:
#if defined(VISEME_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa detect_isa() noexcept
{
    if (isa_available(Isa::Avx2)) {
        return Isa::Avx2;
    }
    if (isa_available(Isa::Neon)) {
        return Isa::Neon;
    }
    return Isa::Scalar;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) noexcept
{
    if (!isa_available(isa)) {
        return false;
    }
    active().store(isa, std::memory_order_relaxed);
    return true;
}

void blend(Isa isa, std::span<const double> base, double base_coef, std::span<const double> shapes,
           std::span<const double> weights, std::span<double> out)
{
    check_blend(base, shapes, weights, out);
    if (!isa_available(isa)) {
        isa = Isa::Scalar;
    }
    table_for(isa).blend(base.data(), base_coef, shapes.data(), weights.data(), weights.size(), out.size(),
                         out.data());
}

void row_dots(Isa isa, std::span<const double> rows, std::span<const double> adjoint, std::span<double> grad)
{
    check_row_dots(rows, adjoint, grad);
    if (!isa_available(isa)) {
        isa = Isa::Scalar;
    }
    table_for(isa).row_dots(rows.data(), adjoint.data(), grad.size(), adjoint.size(), grad.data());
}

void blend(std::span<const double> base, double base_coef, std::span<const double> shapes,
           std::span<const double> weights, std::span<double> out)
{
    blend(active_isa(), base, base_coef, shapes, weights, out);
}

void row_dots(std::span<const double> rows, std::span<const double> adjoint, std::span<double> grad)
{
    row_dots(active_isa(), rows, adjoint, grad);
}

}  // namespace viseme::kernels
