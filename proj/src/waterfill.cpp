#include "ratedist/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ratedist/kernels.hpp"

namespace ratedist {

namespace {

std::vector<double> linspace(double a, double b, int intervals) {
    std::vector<double> f(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i)
        f[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / intervals;
    f.back() = b;
    return f;
}

SpectrumSegment sampled_segment(const SpectralDensity& psd, double lo, double hi,
                                int intervals) {
    SpectrumSegment seg;
    seg.f = linspace(lo, hi, intervals);
    seg.value.resize(seg.f.size());
    for (std::size_t i = 0; i < seg.f.size(); ++i) seg.value[i] = eval_psd(psd, seg.f[i]);
    seg.weight = trapezoid_weights(seg.f);
    return seg;
}

SpectrumSegment flat_segment(double lo, double hi, double value) {
    SpectrumSegment seg;
    seg.f = {lo, hi};
    seg.value = {value, value};
    seg.weight = trapezoid_weights(seg.f);
    return seg;
}

}  // namespace

const char* rate_units_name(RateUnits u) {
    return u == RateUnits::per_sample ? "nats/sample" : "nats/second";
}

WeightFunction WeightFunction::unit() {
    WeightFunction w;
    w.kind_ = Kind::unit;
    return w;
}

WeightFunction WeightFunction::proportional() {
    WeightFunction w;
    w.kind_ = Kind::proportional;
    return w;
}

WeightFunction WeightFunction::mixed(double cut_bandwidth) {
    if (!(cut_bandwidth > 0.0))
        throw std::invalid_argument("WeightFunction::mixed: cut bandwidth must be > 0");
    WeightFunction w;
    w.kind_ = Kind::mixed;
    w.cut_bandwidth_ = cut_bandwidth;
    return w;
}

WeightFunction WeightFunction::tabulated(std::vector<double> f, std::vector<double> value) {
    if (f.size() != value.size() || f.size() < 2)
        throw std::invalid_argument("WeightFunction::tabulated: need matching grids, >= 2 points");
    for (std::size_t i = 1; i < f.size(); ++i)
        if (!(f[i] > f[i - 1]))
            throw std::invalid_argument("WeightFunction::tabulated: frequencies must increase");
    for (double v : value)
        if (!(v >= 0.0))
            throw std::invalid_argument("WeightFunction::tabulated: values must be >= 0");
    WeightFunction w;
    w.kind_ = Kind::tabulated;
    w.f_ = std::move(f);
    w.value_ = std::move(value);
    return w;
}

double WeightFunction::eval(double f) const {
    if (kind_ != Kind::tabulated)
        throw std::invalid_argument("WeightFunction::eval: tabulated weights only");
    const double a = std::fabs(f);
    const auto it = std::upper_bound(f_.begin(), f_.end(), a);
    if (it == f_.begin()) return value_.front();
    if (it == f_.end()) return value_.back();
    const std::size_t hi = static_cast<std::size_t>(it - f_.begin());
    const std::size_t lo = hi - 1;
    const double t = (a - f_[lo]) / (f_[hi] - f_[lo]);
    return value_[lo] + t * (value_[hi] - value_[lo]);
}

double WeightedSpectrum::max_value() const {
    double m = 0.0;
    for (const auto& seg : segments)
        for (double v : seg.value) m = std::max(m, v);
    return m;
}

double WeightedSpectrum::power() const {
    double p = tail;
    for (const auto& seg : segments) p += 2.0 * kernels::dot(seg.weight, seg.value);
    return p;
}

bool WeightedSpectrum::same_grid(const WeightedSpectrum& other) const {
    if (segments.size() != other.segments.size()) return false;
    for (std::size_t s = 0; s < segments.size(); ++s)
        if (segments[s].f != other.segments[s].f) return false;
    return true;
}

WeightedSpectrum weighted_psd(const SpectralDensity& psd, const WeightFunction& w,
                              const FrequencyGrid& grid) {
    // node placement follows the density's own band limit; `grid` only sets
    // the interval count
    const Domain dom = psd.domain();
    WeightedSpectrum ws;
    ws.units = dom == Domain::discrete_time ? RateUnits::per_sample : RateUnits::per_second;

    if (w.kind() == WeightFunction::Kind::mixed) {
        if (dom != Domain::infinite_band)
            throw std::invalid_argument("weighted_psd: mixed weight needs an infinite-band density");
        const double B = w.cut_bandwidth();
        const double S = total_power(psd);
        const double delta = tail_power(psd, B);
        ws.segments.push_back(flat_segment(0.0, B, (S - delta) / (2.0 * B)));
        const double f_top = psd.is_ou() ? 10.0 * B : std::max(psd.grid_limit(), B * (1.0 + 1e-9));
        if (f_top > B) {
            ws.segments.push_back(sampled_segment(psd, B, f_top, grid.intervals));
            ws.tail = tail_power(psd, f_top);
        }
        return ws;
    }

    if (dom == Domain::infinite_band && !psd.is_tabulated())
        throw std::invalid_argument(
            "weighted_psd: unbounded support; use solve_ou_nonweighted or the mixed weight");
    const double limit = psd.grid_limit();

    if (w.kind() == WeightFunction::Kind::proportional) {
        if (dom == Domain::infinite_band)
            throw std::invalid_argument("weighted_psd: proportional weight needs a band-limited density");
        const double S = total_power(psd);
        const double flat = dom == Domain::discrete_time ? S : S / (2.0 * limit);
        SpectrumSegment seg;
        seg.f = linspace(0.0, limit, grid.intervals);
        seg.value.assign(seg.f.size(), flat);
        seg.weight = trapezoid_weights(seg.f);
        ws.segments.push_back(std::move(seg));
        return ws;
    }

    SpectrumSegment seg = sampled_segment(psd, 0.0, limit, grid.intervals);
    if (w.kind() == WeightFunction::Kind::tabulated) {
        for (std::size_t i = 0; i < seg.f.size(); ++i) seg.value[i] *= w.eval(seg.f[i]);
    }
    ws.segments.push_back(std::move(seg));
    return ws;
}

WeightedSpectrum weighted_psd(const SpectralDensity& psd, const WeightFunction& w) {
    return weighted_psd(psd, w, FrequencyGrid(0.5, 4096));
}

std::pair<double, double> solve_at_mu(const WeightedSpectrum& ws, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("solve_at_mu: mu must be > 0");
    double distortion = ws.tail;
    double rate = 0.0;
    for (const auto& seg : ws.segments) {
        distortion += 2.0 * kernels::wsum_min(seg.weight, seg.value, mu);
        // the half-axis doubling and the 1/2 in the rate integrand cancel
        rate += kernels::wsum_log_ratio(seg.weight, seg.value, mu);
    }
    return {distortion, rate};
}

WaterFillSolution solve_at_distortion(const WeightedSpectrum& ws, double d,
                                      double rel_tol, int max_iter) {
    const double power = ws.power();
    if (!(d > 0.0) || d > power * (1.0 + 1e-12))
        throw std::out_of_range("solve_at_distortion: d must lie in (0, " +
                                std::to_string(power) + "]");
    if (d <= ws.tail)
        throw std::out_of_range(
            "solve_at_distortion: d must exceed the out-of-band tail power " +
            std::to_string(ws.tail));

    const double top = ws.max_value();
    double lo = 1e-15 * top, hi = top;
    WaterFillSolution sol;
    sol.units = ws.units;
    bool converged = false;
    double mu = hi;
    for (int it = 0; it < max_iter; ++it) {
        mu = 0.5 * (lo + hi);
        const auto [dist, rate] = solve_at_mu(ws, mu);
        sol.iterations = it + 1;
        if (std::fabs(dist - d) <= rel_tol * d) {
            sol.mu = mu;
            sol.distortion = dist;
            sol.rate = rate;
            converged = true;
            break;
        }
        (dist < d ? lo : hi) = mu;
    }
    if (!converged)
        throw std::runtime_error("solve_at_distortion: bisection did not converge");

    sol.active.reserve(ws.segments.size());
    for (const auto& seg : ws.segments) {
        std::vector<std::uint8_t> mask(seg.value.size());
        for (std::size_t i = 0; i < mask.size(); ++i)
            mask[i] = seg.value[i] > sol.mu ? 1 : 0;
        sol.active.push_back(std::move(mask));
    }
    sol.spectrum = ws;
    return sol;
}

bool WaterFillSolution::active_empty() const {
    for (const auto& mask : active)
        for (std::uint8_t m : mask)
            if (m) return false;
    return true;
}

double ar1_validity_limit(double r, double power) {
    if (!(std::fabs(r) < 1.0))
        throw std::invalid_argument("ar1_validity_limit: |r| must be < 1");
    return power * (1.0 - std::fabs(r)) / (1.0 + std::fabs(r));
}

double ar1_closed_form(double r, double power, double d) {
    const double limit = ar1_validity_limit(r, power);
    if (!(d > 0.0)) throw std::domain_error("ar1_closed_form: d must be > 0");
    if (d > limit * (1.0 + 1e-12))
        throw std::domain_error(
            "ar1_closed_form: valid only for d <= S(1-|r|)/(1+|r|) = " +
            std::to_string(limit) + "; use solve_at_distortion instead");
    return 0.5 * std::log(power * (1.0 - r * r) / d);
}

WeightedSpectrum error_spectrum(const WeightedSpectrum& ws, const WaterFillSolution& sol) {
    if (!ws.same_grid(sol.spectrum))
        throw std::invalid_argument("error_spectrum: solution was produced on a different grid");
    WeightedSpectrum err = ws;
    for (auto& seg : err.segments)
        kernels::clip_upper(seg.value, sol.mu, seg.value);
    return err;
}

WaterFillSolution solve_ou_nonweighted(const SpectralDensity& ou, double d, int intervals) {
    if (!ou.is_ou())
        throw std::invalid_argument("solve_ou_nonweighted: needs the Ornstein-Uhlenbeck model");
    const auto& m = ou.as_ou();
    const double S = total_power(ou);
    if (!(d > 0.0) || d > S * (1.0 + 1e-12))
        throw std::out_of_range("solve_ou_nonweighted: d must lie in (0, " +
                                std::to_string(S) + "]");
    const double b2 = m.diffusion * m.diffusion;
    const double mu_max = b2 / (m.decay * m.decay);  // density peak at f = 0

    // active-band edge where the density crosses mu
    const auto edge = [&](double mu) {
        if (mu >= mu_max) return 0.0;
        return std::sqrt(b2 / mu - m.decay * m.decay) / (2.0 * std::numbers::pi);
    };
    // analytic D(mu) = 2 mu f_edge + tail beyond the edge
    const auto dist_of = [&](double mu) {
        const double fe = edge(mu);
        return 2.0 * mu * fe + tail_power(ou, fe > 0.0 ? fe : 1e-300);
    };

    double lo = mu_max * 1e-30, hi = mu_max;
    WaterFillSolution sol;
    sol.units = RateUnits::per_second;
    bool converged = false;
    double mu = hi, dist = S;
    for (int it = 0; it < 200; ++it) {
        mu = 0.5 * (lo + hi);
        dist = dist_of(mu);
        sol.iterations = it + 1;
        if (std::fabs(dist - d) <= 1e-12 * d) {
            converged = true;
            break;
        }
        (dist < d ? lo : hi) = mu;
    }
    if (!converged && std::fabs(dist - d) > 1e-10 * d)
        throw std::runtime_error("solve_ou_nonweighted: bisection did not converge");

    sol.mu = mu;
    sol.distortion = dist;
    const double fe = edge(mu);
    if (fe > 0.0) {
        SpectrumSegment seg = sampled_segment(ou, 0.0, fe, intervals);
        sol.rate = kernels::wsum_log_ratio(seg.weight, seg.value, mu);
        std::vector<std::uint8_t> mask(seg.value.size());
        for (std::size_t i = 0; i < mask.size(); ++i)
            mask[i] = seg.value[i] > mu ? 1 : 0;
        sol.active.push_back(std::move(mask));
        sol.spectrum.segments.push_back(std::move(seg));
        sol.spectrum.tail = tail_power(ou, fe);
        sol.spectrum.units = RateUnits::per_second;
    } else {
        sol.rate = 0.0;
        sol.spectrum.tail = S;
        sol.spectrum.units = RateUnits::per_second;
    }
    return sol;
}

}  // namespace ratedist
