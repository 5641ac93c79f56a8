#pragma once

// Data-parallel inner loops of the noise model. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant selected at
// runtime from CPUID. The variants are equivalence-tested against the
// scalar reference; they may differ in summation order only.

#include <span>
#include <string_view>

namespace zonopriv::kernels {

enum class Isa { Scalar, Avx2 };

/// Best ISA supported by both the build and the running CPU.
Isa detect_isa() noexcept;

/// ISA currently used by the dispatching entry points. Defaults to
/// detect_isa(), or Scalar when ZONOPRIV_ISA=scalar is set.
Isa active_isa() noexcept;

/// Force an ISA (tests and benchmarks). Requests for an unsupported ISA
/// fall back to Scalar; the ISA actually selected is returned.
Isa set_active_isa(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

/// out[l] = a_sq + sum_j b_sq[j] * sigmoid(steepness * (phi[l] - centers[j])).
/// b_sq and centers have equal length. out.size() == phi.size().
void sigmoid_stack(std::span<const double> phi, double a_sq, std::span<const double> b_sq,
    double steepness, std::span<const double> centers, std::span<double> out);

/// sum_l max(0, p[l] - scale * p[l + shift]), where p[l + shift] is taken as
/// zero past the end of p. This is the one-sided privacy-loss mass of a
/// discrete additive mechanism shifted right by `shift` bins.
double shifted_excess(std::span<const double> p, std::size_t shift, double scale);

/// Same quantity for a left shift: sum_l max(0, p[l] - scale * p[l - shift]).
double shifted_excess_left(std::span<const double> p, std::size_t shift, double scale);

/// sum_l |phi[l]|^power * p[l] for power in {1, 2}.
double abs_moment(std::span<const double> phi, std::span<const double> p, int power);

namespace scalar {
void sigmoid_stack(std::span<const double> phi, double a_sq, std::span<const double> b_sq,
    double steepness, std::span<const double> centers, std::span<double> out);
double shifted_excess(std::span<const double> p, std::size_t shift, double scale);
double shifted_excess_left(std::span<const double> p, std::size_t shift, double scale);
double abs_moment(std::span<const double> phi, std::span<const double> p, int power);
} // namespace scalar

namespace avx2 {
void sigmoid_stack(std::span<const double> phi, double a_sq, std::span<const double> b_sq,
    double steepness, std::span<const double> centers, std::span<double> out);
double shifted_excess(std::span<const double> p, std::size_t shift, double scale);
double shifted_excess_left(std::span<const double> p, std::size_t shift, double scale);
double abs_moment(std::span<const double> phi, std::span<const double> p, int power);
} // namespace avx2

} // namespace zonopriv::kernels
