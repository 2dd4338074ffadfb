// End-to-end acceptance gate. Runs nine numbered checks against the library
// and the installed CLI binary (--cli <path>), prints one PASS/FAIL line per
// check, and exits 0 only if every check passes.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ratedist/oracle.hpp"
#include "ratedist/ratefn.hpp"
#include "ratedist/verify.hpp"
#include "ratedist/waterfill.hpp"

namespace fs = std::filesystem;
using namespace ratedist;

namespace {

struct ExecResult {
    int code = -1;
    std::string out;
};

ExecResult exec_cmd(const std::string& cmd) {
    ExecResult res;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return res;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) res.out.append(buf, n);
    const int status = ::pclose(p);
    if (status >= 0 && WIFEXITED(status)) res.code = WEXITSTATUS(status);
    return res;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

// 1: the channel SNR example, through the real binary, within a second
bool criterion_channel_example(const std::string& cli, std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExecResult res = exec_cmd(quoted(cli) + " channel --target-d-over-s 0.1");
    const double dt = seconds_since(t0);
    const std::string expected = "SNR_min = 9.000 (9.54 dB)\n";
    std::ostringstream d;
    d << "got \"" << res.out.substr(0, 40) << "\", exit " << res.code << ", " << dt << " s";
    detail = d.str();
    return res.code == 0 && res.out == expected && dt < 1.0;
}

// 2: closed form vs water-filling across six correlations, 20 points each
bool criterion_closed_form(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double r : {0.1, -0.1, 1.0 / 3.0, -1.0 / 3.0, 0.7, -0.7}) {
        const WeightedSpectrum ws =
            weighted_psd(SpectralDensity::ar1(r, 1.0), WeightFunction::unit());
        const double lim = ar1_validity_limit(r, 1.0);
        for (int i = 1; i <= 20; ++i) {
            const double d = lim * i / 20.0;
            const double gap =
                std::fabs(solve_at_distortion(ws, d).rate - ar1_closed_form(r, 1.0, d));
            worst = std::max(worst, gap);
        }
    }
    const double dt = seconds_since(t0);
    std::ostringstream d;
    d << "worst gap " << worst << " nats, " << dt << " s";
    detail = d.str();
    return worst <= 1e-6 && dt < 5.0;
}

// 3: proportional weighting reduces to the flat-spectrum closed form
bool criterion_proportional(std::string& detail) {
    const WeightedSpectrum ws =
        weighted_psd(SpectralDensity::ar1(1.0 / 3.0, 1.0), WeightFunction::proportional());
    double worst = 0.0;
    for (double d : {0.1, 0.25, 0.5, 0.7}) {
        const double gap =
            std::fabs(solve_at_distortion(ws, d).rate - 0.5 * std::log(1.0 / d));
        worst = std::max(worst, gap);
    }
    std::ostringstream s;
    s << "worst gap " << worst << " nats";
    detail = s.str();
    return worst <= 1e-8;
}

// 4: growth identity across the validity region, and its spectral lower bound
bool criterion_growth(std::string& detail) {
    double worst_id = 0.0;
    for (double r : {0.1, -0.1, 1.0 / 3.0, -1.0 / 3.0, 0.7, -0.7}) {
        const double lim = ar1_validity_limit(r, 1.0);
        for (int i = 1; i <= 20; ++i) {
            const double d = lim * i / 20.0;
            const double gap = 0.5 * std::log(1.0 / d) - ar1_closed_form(r, 1.0, d);
            worst_id = std::max(worst_id, std::fabs(gap - growth_ar1(r)));
        }
    }
    const double bound_gap = std::fabs(
        growth_lower_bound(SpectralDensity::ar1(1.0 / 3.0, 1.0)).value - growth_ar1(1.0 / 3.0));
    std::ostringstream s;
    s << "worst identity gap " << worst_id << ", bound gap " << bound_gap;
    detail = s.str();
    return worst_id <= 1e-9 && bound_gap <= 1e-8;
}

// 5: alternating-minimization oracle against the analytic curves
bool criterion_blahut(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const DiscreteSource g = quantize_marginal({Marginal::gaussian, 1.0}, 257, 6.0);
    double worst_rel = 0.0;
    for (double d : {0.1, 0.25, 0.5}) {
        const double closed = 0.5 * std::log(1.0 / d);
        const BlahutResult res = blahut_at_distortion(g, d);
        worst_rel = std::max(worst_rel, std::fabs(res.rate - closed) / closed);
    }
    const DiscreteSource u = quantize_marginal({Marginal::uniform, 1.0}, 257, std::sqrt(3.0));
    const BlahutResult ures = blahut_at_distortion(u, 0.01, 1e-5);
    const bool in_band = ures.rate >= 2.1261 - 0.02 && ures.rate <= 2.3026 + 0.02;
    const double dt = seconds_since(t0);
    std::ostringstream s;
    s << "gaussian worst rel " << worst_rel << ", uniform rate " << ures.rate << ", " << dt
      << " s";
    detail = s.str();
    return worst_rel <= 0.02 && in_band && dt < 60.0;
}

// 6: eigenvalue means against spectral integrals, gap shrinking with n
bool criterion_szego(std::string& detail) {
    const SpectralDensity psd = SpectralDensity::ar1(1.0 / 3.0, 1.0);
    double prev_gap = 1e300, final_gap = 0.0, worst_trace = 0.0;
    bool monotone = true;
    for (int n : {64, 128, 256, 512}) {
        const ToeplitzCheck tc = toeplitz_eigen(psd, n);
        const SzegoResult lg = szego_check(tc, SzegoTransform::log);
        if (lg.gap >= prev_gap) monotone = false;
        prev_gap = lg.gap;
        final_gap = lg.gap;
        worst_trace = std::max(worst_trace, szego_check(tc, SzegoTransform::identity).gap);
    }
    std::ostringstream s;
    s << "log gap at n=512 " << final_gap << ", trace gap " << worst_trace
      << (monotone ? ", monotone" : ", NOT monotone");
    detail = s.str();
    return final_gap <= 0.01 && monotone && worst_trace <= 1e-10;
}

// 7: seeded channel simulation reproduces the error spectrum to 0.5%
bool criterion_test_channel(std::string& detail) {
    const ToeplitzCheck tc = toeplitz_eigen(SpectralDensity::ar1(1.0 / 3.0, 1.0), 512);
    const TestChannelReport rep =
        test_channel_simulate(tc, 0.25, 1000000, default_verify_seed);
    std::ostringstream s;
    s << "worst coordinate " << rep.max_rel_err << ", mean " << rep.mean_rel_err
      << " (seed " << rep.seed << ")";
    detail = s.str();
    return rep.max_rel_err <= 0.005 && rep.mean_rel_err <= 0.005;
}

// 8: default spectra figure from the real binary; integrals and pointwise law
bool criterion_fig1(const std::string& cli, std::string& detail) {
    const fs::path dir = fs::temp_directory_path() / "ratedist_acceptance";
    fs::create_directories(dir);
    const fs::path file = dir / "fig1.csv";
    fs::remove(file);
    const ExecResult res =
        exec_cmd("RATEDIST_OUT_DIR=" + quoted(dir.string()) + " " + quoted(cli) + " fig1");
    if (res.code != 0 || !fs::exists(file)) {
        detail = "binary exit " + std::to_string(res.code);
        return false;
    }
    std::ifstream in(file);
    std::string line;
    if (!std::getline(in, line) || line != "f,phi,err_nonweighted,err_proportional") {
        detail = "unexpected header \"" + line + "\"";
        return false;
    }
    double prev_f = 0.0, prev_nw = 0.0, prev_p = 0.0;
    double acc_nw = 0.0, acc_p = 0.0;
    bool pointwise = true;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto row = split_csv(line);
        if (row.size() != 4) {
            detail = "malformed row " + line;
            return false;
        }
        const double f = std::stod(row[0]);
        const double phi = std::stod(row[1]);
        const double enw = std::stod(row[2]);
        const double ep = std::stod(row[3]);
        if (ep != 0.7 * phi) pointwise = false;
        if (rows > 0) {
            acc_nw += 0.5 * (f - prev_f) * (prev_nw + enw);
            acc_p += 0.5 * (f - prev_f) * (prev_p + ep);
        }
        prev_f = f;
        prev_nw = enw;
        prev_p = ep;
        ++rows;
    }
    std::ostringstream s;
    s << "integrals " << acc_nw << " / " << acc_p << " over " << rows << " rows"
      << (pointwise ? ", proportional column exact" : ", proportional column NOT exact");
    detail = s.str();
    return rows == 8193 && pointwise && std::fabs(acc_nw - 0.7) <= 1e-8 &&
           std::fabs(acc_p - 0.7) <= 1e-8;
}

// 9: mixed measure closed form vs solver, floor rejection, wide-cut asymptote
bool criterion_mixed(std::string& detail) {
    const SpectralDensity ou = SpectralDensity::ornstein_uhlenbeck(1.0, std::sqrt(2.0));
    const double closed = mixed_rd(ou, 10.0, 0.5).upper;
    const WeightedSpectrum ws = weighted_psd(ou, WeightFunction::mixed(10.0));
    const double solved = solve_at_distortion(ws, 0.5).rate;
    const double gap = std::fabs(closed - solved);

    bool rejected = false;
    try {
        mixed_rd(ou, 10.0, 0.02);
    } catch (const std::out_of_range&) {
        rejected = true;
    }

    const MixedRange range = mixed_rd_range(ou, 1000.0);
    const double rate = mixed_rd(ou, 1000.0, range.floor_d).upper;
    const double asym = example2_asymptotes(std::sqrt(2.0), range.floor_d).mixed_rate;
    const double ratio_err = std::fabs(rate / asym - 1.0);

    std::ostringstream s;
    s << "closed " << closed << " vs solved " << solved << " (gap " << gap << "), floor "
      << (rejected ? "rejected" : "NOT rejected") << ", asymptote ratio error " << ratio_err;
    detail = s.str();
    return gap <= 1e-4 && rejected && ratio_err <= 0.05;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    if (cli.empty()) {
        std::cerr << "usage: acceptance --cli <path-to-ratedist-binary>\n";
        return 2;
    }

    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::string&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "channel SNR example through the CLI",
         [&](std::string& d) { return criterion_channel_example(cli, d); }},
        {2, "closed form vs water-filling across correlations", criterion_closed_form},
        {3, "proportional weighting vs flat closed form", criterion_proportional},
        {4, "measure-change growth identity and lower bound", criterion_growth},
        {5, "alternating-minimization oracle agreement", criterion_blahut},
        {6, "eigenvalue means vs spectral integrals", criterion_szego},
        {7, "seeded test-channel error spectrum", criterion_test_channel},
        {8, "default figure spectra through the CLI",
         [&](std::string& d) { return criterion_fig1(cli, d); }},
        {9, "mixed measure closed form, floor, and asymptote", criterion_mixed},
    };

    int passed = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name
                  << " [" << detail << "]\n";
        if (ok) ++passed;
    }
    std::cout << passed << "/" << criteria.size() << " criteria passed\n";
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
