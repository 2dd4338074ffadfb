// Vector helpers for the AVX2 backend: 64-bit lane multiply, the splitmix64
// finalizer, and polynomial log/sincos kernels (classic Cephes coefficient
// sets). Only included by the translation unit compiled with -mavx2 -mfma.
#pragma once

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

namespace ratedist::kernels::detail {

/// Low 64 bits of the lanewise product a*b.
inline __m256i mul64_lo(__m256i a, __m256i b) {
    const __m256i bswap = _mm256_shuffle_epi32(b, 0xB1);
    const __m256i prodlh = _mm256_mullo_epi32(a, bswap);
    const __m256i prodlh2 = _mm256_hadd_epi32(prodlh, _mm256_setzero_si256());
    const __m256i prodlh3 = _mm256_shuffle_epi32(prodlh2, 0x73);
    const __m256i prodll = _mm256_mul_epu32(a, b);
    return _mm256_add_epi64(prodll, prodlh3);
}

/// splitmix64 finalizer, four lanes at once. Matches mix64 in rng.hpp bit for
/// bit.
inline __m256i mix64_si256(__m256i z) {
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 30));
    z = mul64_lo(z, _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ull)));
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 27));
    z = mul64_lo(z, _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBull)));
    return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

/// (u >> 12) * 2^-52 per lane, bit-identical to the scalar conversion.
inline __m256d unit_from_u64_pd(__m256i u) {
    const __m256i top = _mm256_srli_epi64(u, 12);
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);
    const __m256d as_int =
        _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(top, magic)),
                      _mm256_set1_pd(0x1p52));
    return _mm256_mul_pd(as_int, _mm256_set1_pd(0x1p-52));
}

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

template <std::size_t N>
inline __m256d polevl(__m256d x, const double (&coef)[N]) {
    __m256d r = _mm256_set1_pd(coef[0]);
    for (std::size_t i = 1; i < N; ++i)
        r = _mm256_fmadd_pd(r, x, _mm256_set1_pd(coef[i]));
    return r;
}

/// Like polevl but with an implicit leading coefficient of 1.
template <std::size_t N>
inline __m256d p1evl(__m256d x, const double (&coef)[N]) {
    __m256d r = _mm256_add_pd(x, _mm256_set1_pd(coef[0]));
    for (std::size_t i = 1; i < N; ++i)
        r = _mm256_fmadd_pd(r, x, _mm256_set1_pd(coef[i]));
    return r;
}

/// Natural log of positive normal doubles. Max error about 1 ulp.
inline __m256d log_pd(__m256d x) {
    static const double P[6] = {
        1.01875663804580931796E-4, 4.97494994976747001425E-1,
        4.70579119878881725854E0,  1.44989225341610930846E1,
        1.79368678507819816313E1,  7.70838733755885391666E0,
    };
    static const double Q[5] = {
        1.12873587189167450590E1, 4.52279145837532221105E1,
        8.29875266912776603211E1, 7.11544750618563894466E1,
        2.31251620126765340583E1,
    };
    const __m256i bits = _mm256_castpd_si256(x);
    // exponent field to double, then unbias; inputs are positive so the sign
    // bit never leaks into the shift
    const __m256i biased = _mm256_srli_epi64(bits, 52);
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, magic)),
                              _mm256_set1_pd(0x1p52 + 1022.0));
    // mantissa remapped to [0.5, 1)
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
    const __m256i half_bits = _mm256_set1_epi64x(0x3FE0000000000000ll);
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));
    const __m256d lt = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
    e = _mm256_sub_pd(e, _mm256_and_pd(lt, _mm256_set1_pd(1.0)));
    m = _mm256_add_pd(m, _mm256_and_pd(lt, m));
    m = _mm256_sub_pd(m, _mm256_set1_pd(1.0));

    const __m256d z = _mm256_mul_pd(m, m);
    __m256d y = _mm256_div_pd(
        _mm256_mul_pd(_mm256_mul_pd(m, z), polevl(m, P)), p1evl(m, Q));
    y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
    y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
    __m256d r = _mm256_add_pd(m, y);
    return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

/// Simultaneous sin and cos. Valid for |x| below about 2^30; arguments here
/// are always in [0, 2*pi). Max error a few ulp.
inline void sincos_pd(__m256d x, __m256d* s, __m256d* c) {
    static const double sincof[6] = {
        1.58962301576546568060E-10, -2.50507477628578072866E-8,
        2.75573136213857245213E-6,  -1.98412698295895385996E-4,
        8.33333333332211858878E-3,  -1.66666666666666307295E-1,
    };
    static const double coscof[6] = {
        -1.13585365213876817300E-11, 2.08757008419747316778E-9,
        -2.75573141792967388112E-7,  2.48015872888517179954E-5,
        -1.38888888888730564116E-3,  4.16666666666665929218E-2,
    };
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    const __m256d sign_x = _mm256_and_pd(x, sign_mask);
    x = _mm256_andnot_pd(sign_mask, x);

    __m256d y = _mm256_floor_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.2732395447351626862)));
    __m128i j = _mm256_cvtpd_epi32(y);  // y is integral, conversion exact
    // odd octants round up so the remainder stays in [-pi/4, pi/4]
    const __m128i odd = _mm_and_si128(j, _mm_set1_epi32(1));
    j = _mm_add_epi32(j, odd);
    y = _mm256_add_pd(y, _mm256_cvtepi32_pd(odd));

    const __m128i zero32 = _mm_setzero_si128();
    const __m128i sel32 =
        _mm_cmpeq_epi32(_mm_and_si128(j, _mm_set1_epi32(2)), zero32);
    const __m256d use_sin =
        _mm256_castsi256_pd(_mm256_cvtepi32_epi64(sel32));
    const __m128i sflip32 =
        _mm_cmpeq_epi32(_mm_and_si128(j, _mm_set1_epi32(4)), _mm_set1_epi32(4));
    const __m256d sin_flip = _mm256_xor_pd(
        _mm256_and_pd(_mm256_castsi256_pd(_mm256_cvtepi32_epi64(sflip32)), sign_mask),
        sign_x);
    const __m128i cflip32 = _mm_cmpeq_epi32(
        _mm_and_si128(_mm_sub_epi32(j, _mm_set1_epi32(2)), _mm_set1_epi32(4)), zero32);
    const __m256d cos_flip =
        _mm256_and_pd(_mm256_castsi256_pd(_mm256_cvtepi32_epi64(cflip32)), sign_mask);

    // extended precision reduction x - y*pi/4
    __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(7.85398125648498535156E-1), x);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(3.77489470793079817668E-8), z);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(2.69515142907905952645E-15), z);
    const __m256d zz = _mm256_mul_pd(z, z);

    const __m256d psin = _mm256_add_pd(
        z, _mm256_mul_pd(_mm256_mul_pd(z, zz), polevl(zz, sincof)));
    const __m256d pcos = _mm256_add_pd(
        _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)),
        _mm256_mul_pd(_mm256_mul_pd(zz, zz), polevl(zz, coscof)));

    *s = _mm256_xor_pd(_mm256_blendv_pd(pcos, psin, use_sin), sin_flip);
    *c = _mm256_xor_pd(_mm256_blendv_pd(psin, pcos, use_sin), cos_flip);
}

}  // namespace ratedist::kernels::detail
