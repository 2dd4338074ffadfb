#include "ratedist/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ratedist/kernels.hpp"

namespace ratedist {

namespace {

constexpr double log_clamp_floor = 1e-300;

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

double interp_half(const std::vector<double>& f, const std::vector<double>& v,
                   double x) {
    // x >= 0, inside [f.front(), f.back()]
    const auto it = std::upper_bound(f.begin(), f.end(), x);
    if (it == f.begin()) return v.front();
    if (it == f.end()) return v.back();
    const std::size_t hi = static_cast<std::size_t>(it - f.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - f[lo]) / (f[hi] - f[lo]);
    return v[lo] + t * (v[hi] - v[lo]);
}

std::string trimmed(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

}  // namespace

const char* domain_name(Domain d) {
    switch (d) {
        case Domain::discrete_time: return "discrete-time";
        case Domain::bandlimited: return "bandlimited";
        case Domain::infinite_band: return "infinite-band";
    }
    return "?";
}

SpectralDensity::SpectralDensity(std::variant<Ar1, Ou, White, Tabulated> m)
    : model_(std::move(m)) {}

SpectralDensity SpectralDensity::ar1(double r, double power) {
    if (!(std::fabs(r) < 1.0)) bad("ar1: correlation must satisfy |r| < 1");
    if (!(power > 0.0)) bad("ar1: power must be > 0");
    return SpectralDensity(Ar1{r, power});
}

SpectralDensity SpectralDensity::ornstein_uhlenbeck(double decay, double diffusion) {
    if (!(decay > 0.0)) bad("ornstein_uhlenbeck: decay must be > 0");
    if (!(diffusion > 0.0)) bad("ornstein_uhlenbeck: diffusion must be > 0");
    return SpectralDensity(Ou{decay, diffusion});
}

SpectralDensity SpectralDensity::white(double power, double bandwidth) {
    if (!(power > 0.0)) bad("white: power must be > 0");
    if (!(bandwidth > 0.0)) bad("white: bandwidth must be > 0");
    return SpectralDensity(White{power, bandwidth});
}

SpectralDensity SpectralDensity::tabulated(Domain domain, std::vector<double> f,
                                           std::vector<double> value) {
    if (f.size() != value.size()) bad("tabulated: frequency/value size mismatch");
    if (f.size() < 2) bad("tabulated: need at least 2 grid points");
    if (f.front() != 0.0) bad("tabulated: grid must start at f = 0");
    for (std::size_t i = 1; i < f.size(); ++i)
        if (!(f[i] > f[i - 1])) bad("tabulated: frequencies must be strictly increasing");
    for (double v : value) {
        if (!(v >= 0.0) || !std::isfinite(v)) bad("tabulated: values must be finite and >= 0");
    }
    if (domain == Domain::discrete_time && std::fabs(f.back() - 0.5) > 1e-12)
        bad("tabulated: discrete-time grid must end at f = 1/2");
    const double bw = domain == Domain::discrete_time ? 0.5 : f.back();
    return SpectralDensity(Tabulated{domain, bw, std::move(f), std::move(value)});
}

SpectralDensity SpectralDensity::from_csv(std::istream& in, Domain domain) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("psd csv: empty input");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trimmed(line) != "f,phi")
        throw std::runtime_error("psd csv: first line must be the header \"f,phi\"");

    std::vector<double> f, v;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trimmed(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("psd csv: line " + std::to_string(lineno) +
                                     ": expected two comma-separated columns");
        std::size_t used = 0;
        double fv = 0.0, pv = 0.0;
        try {
            fv = std::stod(line.substr(0, comma), &used);
            pv = std::stod(line.substr(comma + 1), &used);
        } catch (const std::exception&) {
            throw std::runtime_error("psd csv: line " + std::to_string(lineno) +
                                     ": malformed number");
        }
        f.push_back(fv);
        v.push_back(pv);
    }
    if (f.size() < 2) throw std::runtime_error("psd csv: need at least 2 data rows");
    for (std::size_t i = 1; i < f.size(); ++i)
        if (!(f[i] > f[i - 1]))
            throw std::runtime_error("psd csv: frequencies must be strictly increasing");

    if (f.front() < 0.0) {
        // symmetric full grid: fold onto the non-negative half
        const std::size_t n = f.size();
        if (n % 2 == 0) throw std::runtime_error("psd csv: symmetric grid must have odd row count");
        const std::size_t m = n / 2;
        if (f[m] != 0.0) throw std::runtime_error("psd csv: symmetric grid must contain f = 0");
        for (std::size_t i = 0; i <= m; ++i) {
            const double fa = f[m + i], fb = -f[m - i];
            const double tol = 1e-12 * std::max(1.0, std::fabs(fa));
            if (std::fabs(fa - fb) > tol)
                throw std::runtime_error("psd csv: grid is not symmetric about 0");
            if (std::fabs(v[m + i] - v[m - i]) >
                1e-12 * std::max(1.0, std::fabs(v[m + i])))
                throw std::runtime_error("psd csv: values are not even in f");
        }
        std::vector<double> fh(f.begin() + static_cast<std::ptrdiff_t>(m), f.end());
        std::vector<double> vh(v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
        f = std::move(fh);
        v = std::move(vh);
    }
    try {
        return tabulated(domain, std::move(f), std::move(v));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("psd csv: ") + e.what());
    }
}

SpectralDensity SpectralDensity::from_csv_file(const std::string& path, Domain domain) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("psd csv: cannot open " + path);
    return from_csv(in, domain);
}

Domain SpectralDensity::domain() const {
    if (is_ar1()) return Domain::discrete_time;
    if (is_ou()) return Domain::infinite_band;
    if (is_white()) return Domain::bandlimited;
    return as_tabulated().domain;
}

double SpectralDensity::grid_limit() const {
    if (is_ar1()) return 0.5;
    if (is_ou()) return std::numeric_limits<double>::infinity();
    if (is_white()) return as_white().bandwidth;
    return as_tabulated().bandwidth;
}

double eval_psd(const SpectralDensity& psd, double f) {
    if (psd.is_ar1()) {
        if (std::fabs(f) > 0.5 + 1e-15)
            throw std::domain_error("eval_psd: |f| must be <= 1/2 for discrete-time spectra");
        const auto& m = psd.as_ar1();
        const double c = std::cos(2.0 * std::numbers::pi * f);
        return m.power * (1.0 - m.r * m.r) / (1.0 - 2.0 * m.r * c + m.r * m.r);
    }
    if (psd.is_ou()) {
        const auto& m = psd.as_ou();
        const double w = 2.0 * std::numbers::pi * f;
        return m.diffusion * m.diffusion / (m.decay * m.decay + w * w);
    }
    if (psd.is_white()) {
        const auto& m = psd.as_white();
        if (std::fabs(f) > m.bandwidth * (1.0 + 1e-15))
            throw std::domain_error("eval_psd: |f| must be <= B for bandlimited spectra");
        return m.power / (2.0 * m.bandwidth);
    }
    const auto& t = psd.as_tabulated();
    const double a = std::fabs(f);
    if (a > t.f.back() * (1.0 + 1e-15)) {
        if (t.domain == Domain::infinite_band) return 0.0;
        throw std::domain_error("eval_psd: frequency outside the tabulated domain");
    }
    return interp_half(t.f, t.value, std::min(a, t.f.back()));
}

double total_power(const SpectralDensity& psd) {
    if (psd.is_ar1()) return psd.as_ar1().power;
    if (psd.is_ou()) {
        const auto& m = psd.as_ou();
        return m.diffusion * m.diffusion / (2.0 * m.decay);
    }
    if (psd.is_white()) return psd.as_white().power;
    const auto& t = psd.as_tabulated();
    const std::vector<double> w = trapezoid_weights(t.f);
    return 2.0 * kernels::dot(w, t.value);
}

LogSpectrumIntegral log_spectrum_integral(const SpectralDensity& psd,
                                          const FrequencyGrid& grid) {
    if (psd.domain() != Domain::discrete_time)
        throw std::invalid_argument("log_spectrum_integral: discrete-time spectra only");
    LogSpectrumIntegral out;
    if (psd.is_ar1()) {
        const auto& m = psd.as_ar1();
        out.value = std::log(m.power) + std::log1p(-m.r * m.r);
        return out;
    }
    const std::vector<double> f = FrequencyGrid(0.5, grid.intervals).half_nodes();
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = eval_psd(psd, f[i]);
    const std::vector<double> w = trapezoid_weights(f);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) {
            out.neg_infinite = true;
            out.value = -std::numeric_limits<double>::infinity();
            return out;
        }
        if (v[i] < log_clamp_floor) out.clamped = true;
    }
    out.value = 2.0 * kernels::wsum_log(w, v, log_clamp_floor);
    return out;
}

double tail_power(const SpectralDensity& psd, double cutoff) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("tail_power: cutoff must be > 0");
    if (psd.is_ou()) {
        const auto& m = psd.as_ou();
        const double b2 = m.diffusion * m.diffusion;
        return b2 / (std::numbers::pi * m.decay) *
               (std::numbers::pi / 2.0 - std::atan(2.0 * std::numbers::pi * cutoff / m.decay));
    }
    if (psd.is_tabulated() && psd.domain() == Domain::infinite_band) {
        const auto& t = psd.as_tabulated();
        if (cutoff >= t.f.back()) return 0.0;
        // trapezoid over [cutoff, grid max], density 0 beyond the grid
        std::vector<double> f{cutoff};
        std::vector<double> v{eval_psd(psd, cutoff)};
        for (std::size_t i = 0; i < t.f.size(); ++i) {
            if (t.f[i] > cutoff) {
                f.push_back(t.f[i]);
                v.push_back(t.value[i]);
            }
        }
        const std::vector<double> w = trapezoid_weights(f);
        return 2.0 * kernels::dot(w, v);
    }
    throw std::invalid_argument("tail_power: infinite-band spectra only");
}

double ou_tail_asymptote(double diffusion, double f) {
    if (!(f > 0.0)) throw std::domain_error("ou_tail_asymptote: f must be > 0");
    const double c = diffusion / (2.0 * std::numbers::pi);
    return c * c / (f * f);
}

std::vector<double> trapezoid_weights(const std::vector<double>& nodes) {
    if (nodes.size() < 2)
        throw std::invalid_argument("trapezoid_weights: need at least 2 nodes");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw std::invalid_argument("trapezoid_weights: nodes must be strictly increasing");
    const std::size_t n = nodes.size();
    std::vector<double> w(n);
    w[0] = 0.5 * (nodes[1] - nodes[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (nodes[i + 1] - nodes[i - 1]);
    w[n - 1] = 0.5 * (nodes[n - 1] - nodes[n - 2]);
    return w;
}

}  // namespace ratedist
