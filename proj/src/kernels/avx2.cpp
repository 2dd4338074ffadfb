// AVX2 backend. Loops keep one vector accumulator and finish with an ordered
// scalar tail; results match the scalar backend to roundoff, not bit for bit.
#include <cmath>

#include "ratedist/rng.hpp"
#include "avx2_math.hpp"
#include "table.hpp"

namespace ratedist::kernels::detail {
namespace {

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = hsum_pd(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

double dot_avx2(const double* w, const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i), acc);
    double r = hsum_pd(acc);
    for (; i < n; ++i) r += w[i] * x[i];
    return r;
}

double wsum_min_avx2(const double* w, const double* x, std::size_t n, double level) {
    const __m256d lv = _mm256_set1_pd(level);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d clipped = _mm256_min_pd(_mm256_loadu_pd(x + i), lv);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), clipped, acc);
    }
    double r = hsum_pd(acc);
    for (; i < n; ++i) r += w[i] * std::min(x[i], level);
    return r;
}

double wsum_log_ratio_avx2(const double* w, const double* x, std::size_t n, double level) {
    const __m256d lv = _mm256_set1_pd(level);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ratio =
            _mm256_div_pd(_mm256_max_pd(_mm256_loadu_pd(x + i), lv), lv);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), log_pd(ratio), acc);
    }
    double r = hsum_pd(acc);
    for (; i < n; ++i) r += w[i] * std::log(std::max(x[i], level) / level);
    return r;
}

double wsum_log_avx2(const double* w, const double* x, std::size_t n, double floor) {
    const __m256d fl = _mm256_set1_pd(floor);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_max_pd(_mm256_loadu_pd(x + i), fl);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), log_pd(v), acc);
    }
    double r = hsum_pd(acc);
    for (; i < n; ++i) r += w[i] * std::log(std::max(x[i], floor));
    return r;
}

double sum_sq_lincomb_avx2(const double* z0, const double* z1, std::size_t n,
                           double c0, double c1) {
    const __m256d c0v = _mm256_set1_pd(c0);
    const __m256d c1v = _mm256_set1_pd(c1);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d e = _mm256_fmadd_pd(
            c0v, _mm256_loadu_pd(z0 + i),
            _mm256_mul_pd(c1v, _mm256_loadu_pd(z1 + i)));
        acc = _mm256_fmadd_pd(e, e, acc);
    }
    double r = hsum_pd(acc);
    for (; i < n; ++i) {
        const double e = c0 * z0[i] + c1 * z1[i];
        r += e * e;
    }
    return r;
}

void clip_upper_avx2(const double* x, std::size_t n, double level, double* out) {
    const __m256d lv = _mm256_set1_pd(level);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_loadu_pd(x + i), lv));
    for (; i < n; ++i) out[i] = std::min(x[i], level);
}

void gaussian_pairs_avx2(std::uint64_t key, std::uint64_t ctr, std::size_t n,
                         double* z0, double* z1) {
    const std::uint64_t g = golden_gamma;
    // lane l of iteration i0 handles pair i0+l: counters ctr+2(i0+l) and the
    // one after; additive counter recurrence matches the scalar product mod 2^64
    const std::uint64_t base = key + (ctr + 1) * g;
    __m256i a = _mm256_add_epi64(
        _mm256_set1_epi64x(static_cast<long long>(base)),
        _mm256_set_epi64x(static_cast<long long>(6 * g), static_cast<long long>(4 * g),
                          static_cast<long long>(2 * g), 0));
    const __m256i step = _mm256_set1_epi64x(static_cast<long long>(8 * g));
    const __m256i bump = _mm256_set1_epi64x(static_cast<long long>(g));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two_pi = _mm256_set1_pd(6.283185307179586476925286766559);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i ua = mix64_si256(a);
        const __m256i ub = mix64_si256(_mm256_add_epi64(a, bump));
        const __m256d u1 = _mm256_sub_pd(one, unit_from_u64_pd(ua));
        const __m256d u2 = unit_from_u64_pd(ub);
        const __m256d radius = _mm256_sqrt_pd(
            _mm256_mul_pd(_mm256_set1_pd(-2.0), log_pd(u1)));
        __m256d s, c;
        sincos_pd(_mm256_mul_pd(two_pi, u2), &s, &c);
        _mm256_storeu_pd(z0 + i, _mm256_mul_pd(radius, c));
        _mm256_storeu_pd(z1 + i, _mm256_mul_pd(radius, s));
        a = _mm256_add_epi64(a, step);
    }
    if (i < n) scalar_table.gaussian_pairs(key, ctr + 2 * i, n - i, z0 + i, z1 + i);
}

}  // namespace

const KernelTable avx2_table = {
    sum_avx2,     dot_avx2,            wsum_min_avx2,   wsum_log_ratio_avx2,
    wsum_log_avx2, sum_sq_lincomb_avx2, clip_upper_avx2, gaussian_pairs_avx2,
};

}  // namespace ratedist::kernels::detail
