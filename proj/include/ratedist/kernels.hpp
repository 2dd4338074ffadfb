// Array kernels behind the quadrature, Blahut-Arimoto and Monte Carlo inner
// loops. Every kernel has a scalar reference implementation and, on x86-64,
// an AVX2 variant; the backend is picked once at startup (override with the
// RATEDIST_KERNELS environment variable or force_backend()). The two variants
// are equivalence-tested against each other in tests/test_kernels.cpp.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace ratedist::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();
bool backend_available(Backend b);

/// Force a specific backend (throws std::invalid_argument if unavailable).
void force_backend(Backend b);

/// Sum of all elements.
double sum(std::span<const double> x);

/// Inner product sum_i w[i]*x[i]. Sizes must match.
double dot(std::span<const double> w, std::span<const double> x);

/// sum_i w[i] * min(x[i], level): distortion integrand of water-filling.
double wsum_min(std::span<const double> w, std::span<const double> x, double level);

/// sum_i w[i] * ln(max(x[i], level) / level): rate integrand restricted to
/// the active set {x >= level}; inactive entries contribute exactly 0.
double wsum_log_ratio(std::span<const double> w, std::span<const double> x, double level);

/// sum_i w[i] * ln(max(x[i], floor)): log-spectrum quadrature with clamping.
double wsum_log(std::span<const double> w, std::span<const double> x, double floor);

/// sum_i (c0*z0[i] + c1*z1[i])^2: Monte Carlo squared-error accumulator.
double sum_sq_lincomb(std::span<const double> z0, std::span<const double> z1,
                      double c0, double c1);

/// out[i] = min(x[i], level): error-spectrum clipping.
void clip_upper(std::span<const double> x, double level, std::span<double> out);

// Counter-based Gaussian pair generation (Box-Muller over a splitmix64-style
// counter hash). Pair i consumes counters ctr+2i and ctr+2i+1 of stream `key`,
// so any sub-range can be regenerated independently; the caller advances the
// counter by 2n between calls. Backends agree to ~1e-13 absolute (the AVX2
// variant uses polynomial log/sincos), and each backend is bit-reproducible.
void gaussian_pairs(std::uint64_t key, std::uint64_t ctr, std::size_t n,
                    double* z0, double* z1);

}  // namespace ratedist::kernels
