#include "ratedist/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ratedist {

namespace {

bool is_flat(const SpectralDensity& psd) {
    if (psd.is_white()) return true;
    if (psd.is_ar1()) return psd.as_ar1().r == 0.0;
    if (psd.is_tabulated()) {
        const auto& t = psd.as_tabulated();
        for (double v : t.value)
            if (v != t.value.front()) return false;
        return true;
    }
    return false;
}

void check_distortion_range(double d, double power, const char* who) {
    if (!(d > 0.0) || d > power * (1.0 + 1e-12))
        throw std::out_of_range(std::string(who) + ": d must lie in (0, S] with S = " +
                                std::to_string(power));
}

}  // namespace

const char* marginal_name(Marginal m) {
    switch (m) {
        case Marginal::gaussian: return "gaussian";
        case Marginal::uniform: return "uniform";
        case Marginal::laplace: return "laplace";
    }
    return "?";
}

const char* measure_name(MeasureKind m) {
    switch (m) {
        case MeasureKind::nonweighted: return "nonweighted";
        case MeasureKind::proportional: return "proportional";
        case MeasureKind::mixed: return "mixed";
    }
    return "?";
}

double divergence_rate_iid(const MarginalFamily& family) {
    if (!(family.variance > 0.0))
        throw std::invalid_argument("divergence_rate_iid: variance must be > 0");
    switch (family.kind) {
        case Marginal::gaussian: return 0.0;
        case Marginal::uniform:
            // (1/2) ln(2 pi e s2) - (1/2) ln(12 s2)
            return 0.5 * std::log(std::numbers::pi * std::numbers::e / 6.0);
        case Marginal::laplace:
            // (1/2) ln(2 pi e s2) - 1 - (1/2) ln(2 s2)
            return 0.5 * std::log(std::numbers::pi) - 0.5;
    }
    return 0.0;
}

SourceModel SourceModel::make(SpectralDensity spectrum, MarginalFamily marginal) {
    if (!(marginal.variance > 0.0))
        throw std::invalid_argument("SourceModel: marginal variance must be > 0");
    if (marginal.kind != Marginal::gaussian && !is_flat(spectrum))
        throw std::invalid_argument(
            "SourceModel: non-Gaussian marginals are supported for flat spectra only "
            "(i.i.d. sampling)");
    SourceModel src{std::move(spectrum), marginal, divergence_rate_iid(marginal)};
    return src;
}

RateBound prop_rd_discrete(const SourceModel& src, double d) {
    if (src.spectrum.domain() != Domain::discrete_time)
        throw std::invalid_argument("prop_rd_discrete: discrete-time spectra only");
    const double S = total_power(src.spectrum);
    check_distortion_range(d, S, "prop_rd_discrete");
    const double upper = 0.5 * std::log(S / d);
    return {std::max(0.0, upper - src.divergence), upper};
}

RateBound prop_rd_bandlimited(const SourceModel& src, double bandwidth, double d) {
    if (src.spectrum.domain() != Domain::bandlimited)
        throw std::invalid_argument("prop_rd_bandlimited: band-limited spectra only");
    if (!(bandwidth > 0.0) ||
        std::fabs(src.spectrum.grid_limit() - bandwidth) > 1e-12 * bandwidth)
        throw std::invalid_argument(
            "prop_rd_bandlimited: bandwidth must match the spectrum support");
    const double S = total_power(src.spectrum);
    check_distortion_range(d, S, "prop_rd_bandlimited");
    // sampling at rate 2B maps to the per-sample band scaled by 2B
    const double upper = bandwidth * std::log(S / d);
    return {std::max(0.0, upper - 2.0 * bandwidth * src.divergence), upper};
}

double growth_ar1(double r) {
    if (!(std::fabs(r) < 1.0)) throw std::invalid_argument("growth_ar1: |r| must be < 1");
    return -0.5 * std::log1p(-r * r);
}

GrowthBound growth_lower_bound(const SpectralDensity& psd, const FrequencyGrid& grid) {
    GrowthBound out;
    const double S = total_power(psd);
    if (psd.domain() == Domain::discrete_time) {
        const LogSpectrumIntegral li = log_spectrum_integral(psd, grid);
        if (li.neg_infinite) {
            out.infinite = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        out.value = 0.5 * std::log(S) - 0.5 * li.value;
        return out;
    }
    if (psd.domain() == Domain::bandlimited) {
        // spectrum of the rate-2B samples: 2B Sx(2B nu) on [-1/2, 1/2]
        const double B = psd.grid_limit();
        const FrequencyGrid half(0.5, grid.intervals);
        const std::vector<double> nu = half.half_nodes();
        double acc = 0.0;
        const std::vector<double> w = trapezoid_weights(nu);
        for (std::size_t i = 0; i < nu.size(); ++i) {
            const double v = 2.0 * B * eval_psd(psd, 2.0 * B * nu[i]);
            if (v == 0.0) {
                out.infinite = true;
                out.value = std::numeric_limits<double>::infinity();
                return out;
            }
            acc += w[i] * std::log(std::max(v, 1e-300));
        }
        out.value = B * (std::log(S) - 2.0 * acc);
        return out;
    }
    throw std::invalid_argument("growth_lower_bound: needs a sampled (finite-band) spectrum");
}

double channel_distortion_bound(double snr, double divergence) {
    if (!(snr >= 0.0)) throw std::invalid_argument("channel_distortion_bound: snr must be >= 0");
    if (!(divergence >= 0.0))
        throw std::invalid_argument("channel_distortion_bound: divergence must be >= 0");
    return 1.0 / ((1.0 + snr) * std::exp(2.0 * divergence));
}

double min_snr_for_distortion(double d_over_s, double divergence) {
    if (!(d_over_s > 0.0) || d_over_s > 1.0)
        throw std::out_of_range("min_snr_for_distortion: d/S must lie in (0, 1]");
    if (!(divergence >= 0.0))
        throw std::invalid_argument("min_snr_for_distortion: divergence must be >= 0");
    return std::max(0.0, std::exp(-2.0 * divergence) / d_over_s - 1.0);
}

MixedRange mixed_rd_range(const SpectralDensity& psd, double cut_bandwidth) {
    if (psd.domain() != Domain::infinite_band)
        throw std::invalid_argument("mixed_rd_range: infinite-band spectra only");
    if (!(cut_bandwidth > 0.0))
        throw std::invalid_argument("mixed_rd_range: cut bandwidth must be > 0");
    MixedRange out;
    out.delta = tail_power(psd, cut_bandwidth);
    out.edge_density = eval_psd(psd, cut_bandwidth);
    out.floor_d = 2.0 * cut_bandwidth * out.edge_density + out.delta;
    out.ceil_d = total_power(psd);
    return out;
}

RateBound mixed_rd(const SpectralDensity& psd, double cut_bandwidth, double d,
                   double divergence) {
    const MixedRange range = mixed_rd_range(psd, cut_bandwidth);
    if (d < range.floor_d || d > range.ceil_d * (1.0 + 1e-12))
        throw std::out_of_range(
            "mixed_rd: d must lie in [2B Sx(B) + delta, S] = [" +
            std::to_string(range.floor_d) + ", " + std::to_string(range.ceil_d) +
            "]; got " + std::to_string(d));
    const double S = range.ceil_d;
    const double upper =
        cut_bandwidth * std::log((S - range.delta) / (d - range.delta));
    return {std::max(0.0, upper - divergence), upper};
}

Example2Asymptotes example2_asymptotes(double diffusion, double d) {
    if (!(d > 0.0)) throw std::invalid_argument("example2_asymptotes: d must be > 0");
    const double c = diffusion / std::numbers::pi;
    const double base = c * c * 2.0 / d;
    return {base * 0.5 * std::log(2.0 / d), base};
}

}  // namespace ratedist
