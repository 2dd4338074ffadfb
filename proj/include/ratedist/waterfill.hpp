// Parametric reverse water-filling for weighted and non-weighted MSE.
//
// A weighted spectrum is stored as piecewise-sampled segments on the
// non-negative half axis plus an analytic beyond-grid tail power; integrals
// double the half-axis quadrature. For a water level mu:
//     distortion(mu) = integral min(mu, phi_w(f)) df + tail
//     rate(mu)       = integral over {phi_w >= mu} of (1/2) ln(phi_w/mu) df
// distortion is nondecreasing and rate nonincreasing in mu, so levels are
// solved by bisection.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ratedist/spectra.hpp"

namespace ratedist {

enum class RateUnits { per_sample, per_second };

const char* rate_units_name(RateUnits u);

class WeightFunction {
  public:
    enum class Kind { unit, proportional, mixed, tabulated };

    static WeightFunction unit();
    static WeightFunction proportional();
    static WeightFunction mixed(double cut_bandwidth);
    /// |A(f)|^2 samples on the non-negative half axis, interpolated linearly.
    static WeightFunction tabulated(std::vector<double> f, std::vector<double> value);

    Kind kind() const { return kind_; }
    double cut_bandwidth() const { return cut_bandwidth_; }
    double eval(double f) const;  // tabulated weights only

  private:
    Kind kind_;
    double cut_bandwidth_ = 0.0;
    std::vector<double> f_, value_;
};

struct SpectrumSegment {
    std::vector<double> f;       // increasing, f.front() >= 0
    std::vector<double> value;   // weighted density samples, >= 0
    std::vector<double> weight;  // trapezoid weights for the nodes
};

struct WeightedSpectrum {
    std::vector<SpectrumSegment> segments;  // disjoint, ascending in f
    double tail = 0.0;       // two-sided power beyond the last node; always
                             // counts toward distortion (assumed below mu)
    RateUnits units = RateUnits::per_sample;

    double max_value() const;
    /// Total power: 2 * sum of segment quadratures + tail.
    double power() const;
    bool same_grid(const WeightedSpectrum& other) const;
};

/// Weighted density |A(f)|^2 Phi(f) sampled on `grid`. The proportional
/// weight produces the flat density S (discrete) or S/2B (bandlimited)
/// directly, also across zeros of Phi. The mixed weight requires an
/// infinite-band density; its head is flat (S - delta)/2B on [0, B) and its
/// tail keeps the source density on [B, 10B] with the analytic remainder
/// beyond (OU) or the tabulated remainder.
WeightedSpectrum weighted_psd(const SpectralDensity& psd, const WeightFunction& w,
                              const FrequencyGrid& grid);
WeightedSpectrum weighted_psd(const SpectralDensity& psd, const WeightFunction& w);

/// (distortion, rate) at water level mu.
std::pair<double, double> solve_at_mu(const WeightedSpectrum& ws, double mu);

struct WaterFillSolution {
    double mu = 0.0;
    double rate = 0.0;        // nats per sample or per second
    double distortion = 0.0;
    RateUnits units = RateUnits::per_sample;
    /// Per segment, per node: weighted density strictly above the water level.
    std::vector<std::vector<std::uint8_t>> active;
    int iterations = 0;
    WeightedSpectrum spectrum;  // the problem solved, for error_spectrum

    bool active_empty() const;
};

/// Invert distortion(mu) = d by bisection to |distortion - d| <= rel_tol*d.
/// Throws std::out_of_range for d outside (0, power], std::runtime_error on
/// non-convergence within max_iter.
WaterFillSolution solve_at_distortion(const WeightedSpectrum& ws, double d,
                                      double rel_tol = 1e-10, int max_iter = 200);

/// Distortion threshold below which the whole band stays active:
/// S (1-|r|)/(1+|r|), the minimum of the AR(1) density.
double ar1_validity_limit(double r, double power);

/// AR(1) rate at distortion d, (1/2) ln(S (1-r^2) / d), valid for
/// d <= ar1_validity_limit. Above the limit throws std::domain_error and the
/// caller should use solve_at_distortion instead.
double ar1_closed_form(double r, double power, double d);

/// Reconstruction-error spectrum min(mu, phi_w(f)) on the solution's grid.
/// Its quadrature equals the solved distortion.
WeightedSpectrum error_spectrum(const WeightedSpectrum& ws, const WaterFillSolution& sol);

/// Non-weighted water-filling for the Ornstein-Uhlenbeck density over the
/// whole real line: the level is solved against the analytic distortion
/// integral, the rate by quadrature over the active band [0, f_edge(mu)].
WaterFillSolution solve_ou_nonweighted(const SpectralDensity& ou, double d,
                                       int intervals = 4096);

}  // namespace ratedist
