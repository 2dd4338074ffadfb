#include "ratedist/verify.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ratedist/oracle.hpp"
#include "ratedist/ratefn.hpp"
#include "ratedist/waterfill.hpp"

namespace ratedist {

namespace {

void add_check(VerificationReport& rep, std::string name, double expected,
               double actual, double tolerance) {
    CheckResult c;
    c.name = std::move(name);
    c.expected = expected;
    c.actual = actual;
    c.tolerance = tolerance * rep.tolerance_scale;
    c.pass = std::fabs(actual - expected) <= c.tolerance;
    rep.checks.push_back(std::move(c));
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

bool VerificationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

VerificationReport run_verification(std::uint64_t seed, double tolerance_scale) {
    VerificationReport rep;
    rep.seed = seed;
    rep.tolerance_scale = tolerance_scale;

    const double r = 1.0 / 3.0;
    const SpectralDensity ar1 = SpectralDensity::ar1(r, 1.0);

    // closed form vs water-filling at d = 0.25
    {
        const WeightedSpectrum ws = weighted_psd(ar1, WeightFunction::unit());
        const WaterFillSolution sol = solve_at_distortion(ws, 0.25);
        add_check(rep, "ar1 closed form vs water-filling", ar1_closed_form(r, 1.0, 0.25),
                  sol.rate, 1e-6);
    }
    // proportional weighting flattens the spectrum
    {
        const WeightedSpectrum ws = weighted_psd(ar1, WeightFunction::proportional());
        const WaterFillSolution sol = solve_at_distortion(ws, 0.25);
        add_check(rep, "proportional whitening vs (1/2) ln(S/d)",
                  0.5 * std::log(4.0), sol.rate, 1e-8);
    }
    // growth identity and the tightness of its spectral lower bound
    {
        const SourceModel src = SourceModel::make(ar1, MarginalFamily{});
        const double upper = prop_rd_discrete(src, 0.25).upper;
        add_check(rep, "growth identity at d = 0.25", growth_ar1(r),
                  upper - ar1_closed_form(r, 1.0, 0.25), 1e-9);
        add_check(rep, "growth lower bound tightness", growth_ar1(r),
                  growth_lower_bound(ar1).value, 1e-8);
    }
    // minimum-SNR round-trip
    {
        const double back = channel_distortion_bound(min_snr_for_distortion(0.1, 0.0), 0.0);
        add_check(rep, "snr bound round-trip at d/S = 0.1", 0.1, back, 1e-12);
    }
    // Blahut-Arimoto against the Gaussian closed form
    {
        const DiscreteSource src =
            quantize_marginal(MarginalFamily{Marginal::gaussian, 1.0}, 257, 6.0);
        const BlahutResult ba = blahut_at_distortion(src, 0.25);
        const double expected = 0.5 * std::log(1.0 / 0.25);
        add_check(rep, "blahut-arimoto vs gaussian closed form", expected, ba.rate,
                  0.02 * expected);
    }
    // Toeplitz eigenvalue averages vs spectral integrals
    {
        const ToeplitzCheck tc = toeplitz_eigen(ar1, 256);
        const SzegoResult slog = szego_check(tc, SzegoTransform::log);
        add_check(rep, "szego log-eigenvalue mean (n = 256)", slog.spectral_integral,
                  slog.eigen_mean, 0.01);
        const SzegoResult str = szego_check(tc, SzegoTransform::identity);
        add_check(rep, "toeplitz trace identity (n = 256)", str.spectral_integral,
                  str.eigen_mean, 1e-10);
    }
    // Monte Carlo test channel on the n = 512 principal coordinates
    {
        const ToeplitzCheck tc = toeplitz_eigen(ar1, 512);
        const TestChannelReport tr = test_channel_simulate(tc, 0.25, 1000000, seed);
        add_check(rep, "test channel worst coordinate mse", 0.0, tr.max_rel_err,
                  tr.tolerance);
        add_check(rep, "test channel mean mse", tr.d, tr.mean_mse,
                  tr.tolerance * tr.d);
    }
    // mixed measure closed form vs water-filling
    {
        const SpectralDensity ou =
            SpectralDensity::ornstein_uhlenbeck(1.0, std::sqrt(2.0));
        const double closed = mixed_rd(ou, 10.0, 0.5).upper;
        const WeightedSpectrum ws = weighted_psd(ou, WeightFunction::mixed(10.0));
        const WaterFillSolution sol = solve_at_distortion(ws, 0.5);
        add_check(rep, "mixed measure closed form vs water-filling", closed, sol.rate,
                  1e-4);
    }
    return rep;
}

void print_report(const VerificationReport& report, std::ostream& out) {
    out << "verification seed " << report.seed << ", tolerance scale x"
        << num(report.tolerance_scale) << "\n";
    int passed = 0;
    for (const auto& c : report.checks) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": expected "
            << num(c.expected) << ", actual " << num(c.actual) << ", tolerance "
            << num(c.tolerance) << "\n";
        if (c.pass) ++passed;
    }
    out << passed << "/" << report.checks.size() << " checks passed\n";
}

}  // namespace ratedist
