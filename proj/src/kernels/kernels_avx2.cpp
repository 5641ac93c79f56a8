// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "zonopriv/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cassert>
#include <cmath>

namespace zonopriv::kernels::avx2 {

namespace {

// Cephes-style double exp: 2^n * exp(r) with |r| <= ln2/2 and a (2,3)
// rational approximation for exp(r). Accurate to ~1 ulp on [-708, 709].
inline __m256d exp_pd(__m256d x)
{
    const __m256d hi = _mm256_set1_pd(709.0);
    const __m256d lo = _mm256_set1_pd(-708.0);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, c1, x);
    r = _mm256_fnmadd_pd(n, c2, r);

    const __m256d rr = _mm256_mul_pd(r, r);
    __m256d px = _mm256_set1_pd(1.26177193074810590878E-4);
    px = _mm256_fmadd_pd(px, rr, _mm256_set1_pd(3.02994407707441961300E-2));
    px = _mm256_fmadd_pd(px, rr, _mm256_set1_pd(9.99999999999999999910E-1));
    px = _mm256_mul_pd(px, r);

    __m256d qx = _mm256_set1_pd(3.00198505138664455042E-6);
    qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.52448340349684104192E-3));
    qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.27265548208155028766E-1));
    qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.00000000000000000009E0));

    const __m256d ratio = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    const __m256d er = _mm256_fmadd_pd(_mm256_set1_pd(2.0), ratio, _mm256_set1_pd(1.0));

    // 2^n via the exponent field; n is within [-1022, 1023] after clamping.
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i bits = _mm256_cvtepi32_epi64(n32);
    bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    return _mm256_mul_pd(er, _mm256_castsi256_pd(bits));
}

inline __m256d abs_pd(__m256d x)
{
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double stable_sigmoid(double z)
{
    const double t = std::exp(-std::abs(z));
    return z >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
}

} // namespace

void sigmoid_stack(std::span<const double> phi, double a_sq, std::span<const double> b_sq,
    double steepness, std::span<const double> centers, std::span<double> out)
{
    assert(b_sq.size() == centers.size());
    assert(out.size() == phi.size());
    const std::size_t n = phi.size();
    const std::size_t vec_end = n - n % 4;
    const __m256d vsteep = _mm256_set1_pd(steepness);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();

    for (std::size_t l = 0; l < vec_end; l += 4) {
        const __m256d x = _mm256_loadu_pd(phi.data() + l);
        __m256d acc = _mm256_set1_pd(a_sq);
        for (std::size_t j = 0; j < centers.size(); ++j) {
            const __m256d z = _mm256_mul_pd(vsteep, _mm256_sub_pd(x, _mm256_set1_pd(centers[j])));
            const __m256d t = exp_pd(_mm256_sub_pd(zero, abs_pd(z)));
            const __m256d denom = _mm256_add_pd(one, t);
            const __m256d pos = _mm256_div_pd(one, denom);
            const __m256d neg = _mm256_div_pd(t, denom);
            const __m256d mask = _mm256_cmp_pd(z, zero, _CMP_GE_OQ);
            const __m256d sig = _mm256_blendv_pd(neg, pos, mask);
            acc = _mm256_fmadd_pd(_mm256_set1_pd(b_sq[j]), sig, acc);
        }
        _mm256_storeu_pd(out.data() + l, acc);
    }
    for (std::size_t l = vec_end; l < n; ++l) {
        double acc = a_sq;
        for (std::size_t j = 0; j < centers.size(); ++j)
            acc += b_sq[j] * stable_sigmoid(steepness * (phi[l] - centers[j]));
        out[l] = acc;
    }
}

double shifted_excess(std::span<const double> p, std::size_t shift, double scale)
{
    const std::size_t n = p.size();
    const std::size_t overlap = shift < n ? n - shift : 0;
    const std::size_t vec_end = overlap - overlap % 4;
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = zero;
    for (std::size_t l = 0; l < vec_end; l += 4) {
        const __m256d a = _mm256_loadu_pd(p.data() + l);
        const __m256d b = _mm256_loadu_pd(p.data() + l + shift);
        acc = _mm256_add_pd(acc, _mm256_max_pd(zero, _mm256_fnmadd_pd(vscale, b, a)));
    }
    double sum = hsum(acc);
    for (std::size_t l = vec_end; l < overlap; ++l)
        sum += std::max(0.0, p[l] - scale * p[l + shift]);
    for (std::size_t l = overlap; l < n; ++l)
        sum += p[l];
    return sum;
}

double shifted_excess_left(std::span<const double> p, std::size_t shift, double scale)
{
    const std::size_t n = p.size();
    const std::size_t head = std::min(shift, n);
    double sum = 0.0;
    for (std::size_t l = 0; l < head; ++l)
        sum += p[l];
    const std::size_t count = n - head;
    const std::size_t vec_end = head + (count - count % 4);
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = zero;
    for (std::size_t l = head; l < vec_end; l += 4) {
        const __m256d a = _mm256_loadu_pd(p.data() + l);
        const __m256d b = _mm256_loadu_pd(p.data() + l - shift);
        acc = _mm256_add_pd(acc, _mm256_max_pd(zero, _mm256_fnmadd_pd(vscale, b, a)));
    }
    sum += hsum(acc);
    for (std::size_t l = vec_end; l < n; ++l)
        sum += std::max(0.0, p[l] - scale * p[l - shift]);
    return sum;
}

double abs_moment(std::span<const double> phi, std::span<const double> p, int power)
{
    assert(phi.size() == p.size());
    const std::size_t n = p.size();
    const std::size_t vec_end = n - n % 4;
    __m256d acc = _mm256_setzero_pd();
    if (power == 1) {
        for (std::size_t l = 0; l < vec_end; l += 4)
            acc = _mm256_fmadd_pd(abs_pd(_mm256_loadu_pd(phi.data() + l)), _mm256_loadu_pd(p.data() + l), acc);
    } else {
        for (std::size_t l = 0; l < vec_end; l += 4) {
            const __m256d x = _mm256_loadu_pd(phi.data() + l);
            acc = _mm256_fmadd_pd(_mm256_mul_pd(x, x), _mm256_loadu_pd(p.data() + l), acc);
        }
    }
    double sum = hsum(acc);
    for (std::size_t l = vec_end; l < n; ++l)
        sum += (power == 1 ? std::abs(phi[l]) : phi[l] * phi[l]) * p[l];
    return sum;
}

} // namespace zonopriv::kernels::avx2
