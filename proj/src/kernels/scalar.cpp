// Reference kernels. Plain sequential loops; the AVX2 variants are tested
// against these.
#include <cmath>
#include <numbers>

#include "ratedist/rng.hpp"
#include "table.hpp"

namespace ratedist::kernels::detail {
namespace {

double sum_ref(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot_ref(const double* w, const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i];
    return acc;
}

double wsum_min_ref(const double* w, const double* x, std::size_t n, double level) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::min(x[i], level);
    return acc;
}

double wsum_log_ratio_ref(const double* w, const double* x, std::size_t n, double level) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * std::log(std::max(x[i], level) / level);
    return acc;
}

double wsum_log_ref(const double* w, const double* x, std::size_t n, double floor) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::log(std::max(x[i], floor));
    return acc;
}

double sum_sq_lincomb_ref(const double* z0, const double* z1, std::size_t n,
                          double c0, double c1) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = c0 * z0[i] + c1 * z1[i];
        acc += e * e;
    }
    return acc;
}

void clip_upper_ref(const double* x, std::size_t n, double level, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::min(x[i], level);
}

void gaussian_pairs_ref(std::uint64_t key, std::uint64_t ctr, std::size_t n,
                        double* z0, double* z1) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t a = counter_u64(key, ctr + 2 * i);
        const std::uint64_t b = counter_u64(key, ctr + 2 * i + 1);
        const double u1 = 1.0 - unit_from_u64(a);  // (0, 1]
        const double u2 = unit_from_u64(b);        // [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        z0[i] = radius * std::cos(theta);
        z1[i] = radius * std::sin(theta);
    }
}

}  // namespace

const KernelTable scalar_table = {
    sum_ref,     dot_ref,            wsum_min_ref,   wsum_log_ratio_ref,
    wsum_log_ref, sum_sq_lincomb_ref, clip_upper_ref, gaussian_pairs_ref,
};

}  // namespace ratedist::kernels::detail
