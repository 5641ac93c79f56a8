#include "zonopriv/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace zonopriv::kernels {

namespace {

Isa initial_isa() noexcept
{
    if (const char* env = std::getenv("ZONOPRIV_ISA"); env && std::string_view(env) == "scalar")
        return Isa::Scalar;
    return detect_isa();
}

std::atomic<Isa>& active() noexcept
{
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

} // namespace

Isa detect_isa() noexcept
{
#if defined(ZONOPRIV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Isa::Avx2;
#endif
    return Isa::Scalar;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) noexcept
{
    if (isa == Isa::Avx2 && detect_isa() != Isa::Avx2)
        isa = Isa::Scalar;
    active().store(isa, std::memory_order_relaxed);
    return isa;
}

std::string_view isa_name(Isa isa) noexcept
{
    switch (isa) {
    case Isa::Avx2: return "avx2";
    case Isa::Scalar: break;
    }
    return "scalar";
}

#if defined(ZONOPRIV_HAVE_AVX2)
#define ZONOPRIV_DISPATCH(fn, ...) \
    (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define ZONOPRIV_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void sigmoid_stack(std::span<const double> phi, double a_sq, std::span<const double> b_sq,
    double steepness, std::span<const double> centers, std::span<double> out)
{
    ZONOPRIV_DISPATCH(sigmoid_stack, phi, a_sq, b_sq, steepness, centers, out);
}

double shifted_excess(std::span<const double> p, std::size_t shift, double scale)
{
    return ZONOPRIV_DISPATCH(shifted_excess, p, shift, scale);
}

double shifted_excess_left(std::span<const double> p, std::size_t shift, double scale)
{
    return ZONOPRIV_DISPATCH(shifted_excess_left, p, shift, scale);
}

double abs_moment(std::span<const double> phi, std::span<const double> p, int power)
{
    return ZONOPRIV_DISPATCH(abs_moment, phi, p, power);
}

#undef ZONOPRIV_DISPATCH

} // namespace zonopriv::kernels
