// Spectral density models and the integral quantities the rate bounds consume.
//
// Frequency conventions:
//   discrete_time: per-sample spectra on f in [-1/2, 1/2], power = integral
//   bandlimited:   continuous-time spectra on [-B, B] (f in Hz)
//   infinite_band: continuous-time spectra on the whole real line
// Spectra are even in f; tabulated data is stored on the non-negative half.
#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "ratedist/grid.hpp"

namespace ratedist {

enum class Domain { discrete_time, bandlimited, infinite_band };

const char* domain_name(Domain d);

class SpectralDensity {
  public:
    struct Ar1 {
        double r;      // lag-1 correlation, |r| < 1
        double power;  // total power S
    };
    struct Ou {
        double decay;      // a > 0, autocovariance (beta^2/2a) e^{-a|tau|}
        double diffusion;  // beta > 0
    };
    struct White {
        double power;      // S
        double bandwidth;  // B, density S/2B on [-B, B]
    };
    struct Tabulated {
        Domain domain;
        double bandwidth;          // for bandlimited; grid max otherwise
        std::vector<double> f;     // non-negative half, strictly increasing
        std::vector<double> value; // >= 0
    };

    static SpectralDensity ar1(double r, double power);
    static SpectralDensity ornstein_uhlenbeck(double decay, double diffusion);
    static SpectralDensity white(double power, double bandwidth);
    static SpectralDensity tabulated(Domain domain, std::vector<double> f,
                                     std::vector<double> value);
    /// CSV with mandatory "f,phi" header; rows strictly increasing in f.
    /// Accepts either the non-negative half or a symmetric full grid.
    static SpectralDensity from_csv(std::istream& in, Domain domain);
    static SpectralDensity from_csv_file(const std::string& path, Domain domain);

    Domain domain() const;
    /// Half-width of the support/grid: 1/2, B, or the tabulated grid max.
    double grid_limit() const;

    bool is_ar1() const { return std::holds_alternative<Ar1>(model_); }
    bool is_ou() const { return std::holds_alternative<Ou>(model_); }
    bool is_white() const { return std::holds_alternative<White>(model_); }
    bool is_tabulated() const { return std::holds_alternative<Tabulated>(model_); }
    const Ar1& as_ar1() const { return std::get<Ar1>(model_); }
    const Ou& as_ou() const { return std::get<Ou>(model_); }
    const White& as_white() const { return std::get<White>(model_); }
    const Tabulated& as_tabulated() const { return std::get<Tabulated>(model_); }

  private:
    explicit SpectralDensity(std::variant<Ar1, Ou, White, Tabulated> m);
    std::variant<Ar1, Ou, White, Tabulated> model_;
};

/// Power density at frequency f. Throws std::domain_error outside the domain
/// of discrete_time/bandlimited spectra.
double eval_psd(const SpectralDensity& psd, double f);

/// Total power S = integral of the density over its domain (analytic where a
/// closed form exists, trapezoid quadrature for tabulated data).
double total_power(const SpectralDensity& psd);

struct LogSpectrumIntegral {
    double value = 0.0;
    bool neg_infinite = false;  // density vanished on a set of positive grid measure
    bool clamped = false;       // values below the clamp floor were clamped
};

/// integral over [-1/2,1/2] of ln(density). Discrete-time spectra only.
/// AR(1) uses the closed form ln S + ln(1 - r^2); otherwise trapezoid
/// quadrature on `grid` with values clamped at 1e-300.
LogSpectrumIntegral log_spectrum_integral(const SpectralDensity& psd,
                                          const FrequencyGrid& grid = FrequencyGrid(0.5, 4096));

/// Two-sided tail power 2*integral_B^inf of the density. Infinite-band
/// spectra only; analytic for the Ornstein-Uhlenbeck model.
double tail_power(const SpectralDensity& psd, double cutoff);

/// Large-f density asymptote (diffusion/2pi)^2 / f^2 of diffusion spectra.
double ou_tail_asymptote(double diffusion, double f);

}  // namespace ratedist
