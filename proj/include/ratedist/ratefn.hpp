// Closed-form rate-distortion bounds: proportional-MSE bands for discrete and
// bandlimited sources, rate growth between non-weighted and proportional
// measures, the minimum-SNR channel bound, the mixed measure for infinite-band
// sources, and its small-d asymptotes. All rates in nats.
#pragma once

#include <vector>

#include "ratedist/spectra.hpp"
#include "ratedist/waterfill.hpp"

namespace ratedist {

enum class Marginal { gaussian, uniform, laplace };

const char* marginal_name(Marginal m);

struct MarginalFamily {
    Marginal kind = Marginal::gaussian;
    double variance = 1.0;
};

/// Divergence rate D(X||X~) of an i.i.d. source against the Gaussian with the
/// same variance: (1/2) ln(2 pi e sigma^2) - h(X). Zero for Gaussian,
/// (1/2) ln(pi e / 6) for uniform, (1/2) ln(pi) - 1/2 for Laplace;
/// scale-invariant.
double divergence_rate_iid(const MarginalFamily& family);

/// Source = spectrum + marginal family; the divergence rate is derived and
/// cached. Non-Gaussian marginals require a flat spectrum (i.i.d. sampling),
/// arbitrary-memory divergence rates are unsupported.
struct SourceModel {
    SpectralDensity spectrum;
    MarginalFamily marginal;
    double divergence = 0.0;

    static SourceModel make(SpectralDensity spectrum, MarginalFamily marginal);
};

struct RateBound {
    double lower = 0.0;  // clamped at 0
    double upper = 0.0;
};

/// Proportional-MSE band for a discrete-time source, nats/sample:
/// [max(0, (1/2) ln(S/d) - D), (1/2) ln(S/d)] for 0 < d <= S.
RateBound prop_rd_discrete(const SourceModel& src, double d);

/// Proportional-MSE band for a bandlimited source, nats/second: the
/// per-sample band scaled by the sampling rate 2B.
RateBound prop_rd_bandlimited(const SourceModel& src, double bandwidth, double d);

/// Rate growth from non-weighted to proportional MSE for Gaussian AR(1):
/// -(1/2) ln(1 - r^2), independent of d inside the closed-form region.
double growth_ar1(double r);

struct GrowthBound {
    double value = 0.0;
    bool infinite = false;    // log-spectrum integral diverged to -inf
    bool asymptotic = true;   // the bound holds as d -> 0 (o(1) term dropped)
};

/// Small-d lower bound on the growth: (1/2)(ln S - integral ln Phi) per
/// sample, or B (ln S - integral ln Phi_sampled) per second for bandlimited
/// spectra. Tight for Gaussian AR(1).
GrowthBound growth_lower_bound(const SpectralDensity& psd,
                               const FrequencyGrid& grid = FrequencyGrid(0.5, 4096));

/// Least achievable d/S through a matched-bandwidth white Gaussian channel:
/// 1 / ((1 + SNR) exp(2 D)).
double channel_distortion_bound(double snr, double divergence);

/// Minimum SNR for a proportional distortion target: exp(-2D)/(d/S) - 1,
/// floored at 0.
double min_snr_for_distortion(double d_over_s, double divergence);

struct MixedRange {
    double floor_d = 0.0;       // 2 B Sx(B) + delta
    double ceil_d = 0.0;        // S
    double delta = 0.0;         // two-sided tail power beyond B
    double edge_density = 0.0;  // Sx(B)
};

/// Admissible distortion range of the mixed measure with cut bandwidth B.
MixedRange mixed_rd_range(const SpectralDensity& psd, double cut_bandwidth);

/// Mixed-measure band, nats/second: upper = B ln((S-delta)/(d-delta)),
/// lower = upper - divergence. Throws std::out_of_range (message reports both
/// limits) for d outside [floor, S].
RateBound mixed_rd(const SpectralDensity& psd, double cut_bandwidth, double d,
                   double divergence = 0.0);

struct Example2Asymptotes {
    double mixed_rate = 0.0;        // (beta/pi)^2 (2/d) ln sqrt(2/d)
    double nonweighted_rate = 0.0;  // (beta/pi)^2 (2/d)
};

/// Small-d rate asymptotes of the unit-decay diffusion source under the mixed
/// (at d = 2 B Sx(B) + delta) and non-weighted measures.
Example2Asymptotes example2_asymptotes(double diffusion, double d);

enum class MeasureKind { nonweighted, proportional, mixed };

const char* measure_name(MeasureKind m);

struct RdPoint {
    double d = 0.0;
    double rate_lower = 0.0;
    double rate_upper = 0.0;
};

struct RdCurve {
    std::vector<RdPoint> points;  // ascending in d
    RateUnits units = RateUnits::per_sample;
    MeasureKind measure = MeasureKind::nonweighted;
    double mixed_bandwidth = 0.0;
};

}  // namespace ratedist
