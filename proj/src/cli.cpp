#include "ratedist/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ratedist/oracle.hpp"
#include "ratedist/ratefn.hpp"
#include "ratedist/spectra.hpp"
#include "ratedist/verify.hpp"
#include "ratedist/version.hpp"
#include "ratedist/waterfill.hpp"

namespace ratedist {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_usage = 2;

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

/// Round through the 12-significant-digit representation, so emitted files
/// and in-memory summaries agree exactly.
double round12(double v) { return std::strtod(fmt(v).c_str(), nullptr); }

std::string default_out_dir() {
    if (const char* env = std::getenv("RATEDIST_OUT_DIR")) return env;
    return ".";
}

/// Buffered write: the file appears only after the content is complete.
void write_output(const std::string& path, const std::string& content,
                  std::ostream& out) {
    if (path == "-") {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << content;
    f.flush();
    if (!f) {
        f.close();
        std::remove(path.c_str());
        throw std::runtime_error("failed while writing " + path);
    }
    out << "wrote " << path << "\n";
}

struct ModelFlags {
    std::string model;  // ar1 | white | ou | tabulated
    double r = 1.0 / 3.0;
    double S = 1.0;
    double B = 0.0;      // white bandwidth / mixed cut bandwidth
    double a = 1.0;      // OU decay
    double beta = std::numbers::sqrt2;
    std::string psd_csv;
    std::string domain = "discrete";
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
    cmd->add_option("--model", m.model, "source model: ar1, white, ou, tabulated")
        ->required()
        ->check(CLI::IsMember({"ar1", "white", "ou", "tabulated"}));
    cmd->add_option("--r", m.r, "AR(1) lag-1 correlation, |r| < 1");
    cmd->add_option("--S", m.S, "total power");
    cmd->add_option("--B", m.B, "bandwidth (white model) or mixed-measure cut bandwidth");
    cmd->add_option("--a", m.a, "Ornstein-Uhlenbeck decay rate");
    cmd->add_option("--beta", m.beta, "Ornstein-Uhlenbeck diffusion coefficient");
    cmd->add_option("--psd-csv", m.psd_csv, "tabulated density file (columns f,phi)");
    cmd->add_option("--domain", m.domain,
                    "tabulated density domain: discrete, bandlimited, infinite")
        ->check(CLI::IsMember({"discrete", "bandlimited", "infinite"}));
}

SpectralDensity make_model(const ModelFlags& m) {
    if (m.model == "ar1") return SpectralDensity::ar1(m.r, m.S);
    if (m.model == "white") {
        if (!(m.B > 0.0)) throw std::invalid_argument("white model requires --B > 0");
        return SpectralDensity::white(m.S, m.B);
    }
    if (m.model == "ou") return SpectralDensity::ornstein_uhlenbeck(m.a, m.beta);
    if (m.psd_csv.empty())
        throw std::invalid_argument("tabulated model requires --psd-csv");
    const Domain dom = m.domain == "discrete"      ? Domain::discrete_time
                       : m.domain == "bandlimited" ? Domain::bandlimited
                                                   : Domain::infinite_band;
    return SpectralDensity::from_csv_file(m.psd_csv, dom);
}

Marginal parse_marginal(const std::string& name) {
    if (name == "gaussian") return Marginal::gaussian;
    if (name == "uniform") return Marginal::uniform;
    return Marginal::laplace;
}

struct RdCurveFlags {
    ModelFlags model;
    std::string measure;
    std::vector<double> d;
    double d_min = 0.0, d_max = 0.0;
    int points = 0;
    int grid = 4096;
    std::string marginal = "gaussian";
    double divergence = 0.0;
    std::string units = "nats";
    std::string format = "csv";
    std::string output;
};

std::vector<double> distortion_grid(const RdCurveFlags& f) {
    if (!f.d.empty()) {
        if (f.points != 0)
            throw std::invalid_argument("give either --d or a --d-min/--d-max/--points grid");
        return f.d;
    }
    if (f.points < 2) throw std::invalid_argument("--points must be >= 2");
    if (!(f.d_min > 0.0) || !(f.d_max > f.d_min))
        throw std::invalid_argument("need 0 < --d-min < --d-max");
    std::vector<double> d(static_cast<std::size_t>(f.points));
    for (int i = 0; i < f.points; ++i)
        d[static_cast<std::size_t>(i)] =
            f.d_min + (f.d_max - f.d_min) * i / (f.points - 1);
    return d;
}

RdCurve compute_rd_curve(const RdCurveFlags& f) {
    const SpectralDensity psd = make_model(f.model);
    const Marginal marg = parse_marginal(f.marginal);
    const FrequencyGrid grid(0.5, f.grid);
    RdCurve curve;

    if (f.measure == "nonweighted") {
        if (marg != Marginal::gaussian)
            throw std::invalid_argument(
                "non-Gaussian marginals are supported for the proportional and mixed "
                "measures only");
        curve.measure = MeasureKind::nonweighted;
        if (psd.is_ou()) {
            curve.units = RateUnits::per_second;
            for (double d : distortion_grid(f)) {
                const WaterFillSolution sol = solve_ou_nonweighted(psd, d, f.grid);
                curve.points.push_back({d, sol.rate, sol.rate});
            }
        } else {
            const WeightedSpectrum ws = weighted_psd(psd, WeightFunction::unit(), grid);
            curve.units = ws.units;
            for (double d : distortion_grid(f)) {
                const WaterFillSolution sol = solve_at_distortion(ws, d);
                curve.points.push_back({d, sol.rate, sol.rate});
            }
        }
        return curve;
    }

    if (f.measure == "proportional") {
        curve.measure = MeasureKind::proportional;
        if (psd.domain() == Domain::infinite_band)
            throw std::invalid_argument(
                "the proportional measure over an unbounded band needs infinite rate; "
                "use the mixed measure with a cut bandwidth --B");
        const SourceModel src =
            SourceModel::make(psd, MarginalFamily{marg, total_power(psd)});
        if (psd.domain() == Domain::discrete_time) {
            curve.units = RateUnits::per_sample;
            for (double d : distortion_grid(f)) {
                const RateBound b = prop_rd_discrete(src, d);
                curve.points.push_back({d, b.lower, b.upper});
            }
        } else {
            curve.units = RateUnits::per_second;
            const double B = psd.grid_limit();
            for (double d : distortion_grid(f)) {
                const RateBound b = prop_rd_bandlimited(src, B, d);
                curve.points.push_back({d, b.lower, b.upper});
            }
        }
        return curve;
    }

    // mixed
    curve.measure = MeasureKind::mixed;
    curve.units = RateUnits::per_second;
    if (!(f.model.B > 0.0))
        throw std::invalid_argument("the mixed measure requires a cut bandwidth --B > 0");
    if (marg != Marginal::gaussian)
        throw std::invalid_argument(
            "mixed-measure lower bounds take an explicit --divergence, not a marginal");
    curve.mixed_bandwidth = f.model.B;
    for (double d : distortion_grid(f)) {
        const RateBound b = mixed_rd(psd, f.model.B, d, f.divergence);
        curve.points.push_back({d, b.lower, b.upper});
    }
    return curve;
}

std::string units_label(RateUnits u, bool bits) {
    const std::string base = u == RateUnits::per_sample ? "/sample" : "/second";
    return (bits ? "bits" : "nats") + base;
}

int run_rd_curve(const RdCurveFlags& f, std::ostream& out) {
    RdCurve curve = compute_rd_curve(f);
    const bool bits = f.units == "bits";
    const double scale = bits ? 1.0 / std::numbers::ln2 : 1.0;
    const std::string label = units_label(curve.units, bits);
    const std::string measure = measure_name(curve.measure);

    std::string path = f.output;
    if (path.empty())
        path = default_out_dir() + "/rd_curve." + (f.format == "json" ? "json" : "csv");

    std::string content;
    if (f.format == "csv") {
        std::ostringstream ss;
        ss << "d,rate_lower,rate_upper,units,measure\n";
        for (const RdPoint& p : curve.points)
            ss << fmt(p.d) << ',' << fmt(p.rate_lower * scale) << ','
               << fmt(p.rate_upper * scale) << ',' << label << ',' << measure << "\n";
        content = ss.str();
    } else {
        nlohmann::json j;
        j["version"] = version;
        j["measure"] = measure;
        j["units"] = label;
        if (curve.measure == MeasureKind::mixed)
            j["mixed_bandwidth"] = round12(curve.mixed_bandwidth);
        j["points"] = nlohmann::json::array();
        for (const RdPoint& p : curve.points)
            j["points"].push_back({{"d", round12(p.d)},
                                   {"rate_lower", round12(p.rate_lower * scale)},
                                   {"rate_upper", round12(p.rate_upper * scale)}});
        content = j.dump(2) + "\n";
    }
    write_output(path, content, out);
    return exit_ok;
}

struct Fig1Flags {
    double r = 1.0 / 3.0;
    double S = 1.0;
    double d = 0.7;
    int grid = 4096;
    std::string output;
};

int run_fig1(const Fig1Flags& f, std::ostream& out) {
    const SpectralDensity psd = SpectralDensity::ar1(f.r, f.S);
    if (!(f.d > 0.0) || f.d > f.S)
        throw std::out_of_range("fig1: d must lie in (0, S]");
    const FrequencyGrid grid(0.5, f.grid);
    const WeightedSpectrum ws = weighted_psd(psd, WeightFunction::unit(), grid);
    const WaterFillSolution sol = solve_at_distortion(ws, f.d);
    const double prop_scale = f.d / f.S;

    // rows sit exactly on the solver's quadrature nodes, mirrored to the full
    // band, at round-trippable precision: a plain trapezoid over the rows then
    // reproduces d for both error columns to accumulation error
    const std::vector<double>& half = ws.segments.front().f;
    std::vector<double> nodes;
    nodes.reserve(2 * half.size() - 1);
    for (auto it = half.rbegin(); it != half.rend(); ++it) nodes.push_back(0.0 - *it);
    nodes.insert(nodes.end(), half.begin() + 1, half.end());

    std::ostringstream ss;
    ss << "f,phi,err_nonweighted,err_proportional\n";
    for (double fr : nodes) {
        const double phi = eval_psd(psd, fr);
        ss << fmt(fr, "%.17g") << ',' << fmt(phi, "%.17g") << ','
           << fmt(std::min(sol.mu, phi), "%.17g") << ','
           << fmt(prop_scale * phi, "%.17g") << "\n";
    }

    std::string path = f.output.empty() ? default_out_dir() + "/fig1.csv" : f.output;
    write_output(path, ss.str(), out);
    return exit_ok;
}

struct ChannelFlags {
    double snr = -1.0;
    double target = -1.0;
    bool have_snr = false, have_target = false;
    std::string marginal = "gaussian";
    double divergence = -1.0;
    bool have_divergence = false;
};

int run_channel(const ChannelFlags& f, std::ostream& out) {
    if (f.have_snr == f.have_target)
        throw std::invalid_argument("give exactly one of --snr and --target-d-over-s");
    const double div = f.have_divergence
                           ? f.divergence
                           : divergence_rate_iid(MarginalFamily{parse_marginal(f.marginal), 1.0});
    if (f.have_target) {
        const double snr = min_snr_for_distortion(f.target, div);
        if (snr > 0.0)
            out << "SNR_min = " << fmt(snr, "%.3f") << " ("
                << fmt(10.0 * std::log10(snr), "%.2f") << " dB)\n";
        else
            out << "SNR_min = 0.000 (-inf dB)\n";
    } else {
        out << "d/S >= " << fmt(channel_distortion_bound(f.snr, div), "%.4g") << "\n";
    }
    return exit_ok;
}

struct VerifyFlags {
    std::uint64_t seed = default_verify_seed;
    double tolerance_scale = 1.0;
};

int run_verify(const VerifyFlags& f, std::ostream& out) {
    const VerificationReport rep = run_verification(f.seed, f.tolerance_scale);
    print_report(rep, out);
    return rep.all_pass() ? exit_ok : exit_verify_failed;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"rate-distortion bounds for stationary sources under non-weighted, "
                 "proportional and mixed MSE distortion"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    RdCurveFlags rd;
    CLI::App* rd_cmd = app.add_subcommand(
        "rd-curve", "evaluate R(d) bounds over a distortion grid and write them out");
    add_model_flags(rd_cmd, rd.model);
    rd_cmd->add_option("--measure", rd.measure,
                       "distortion measure: nonweighted, proportional, mixed")
        ->required()
        ->check(CLI::IsMember({"nonweighted", "proportional", "mixed"}));
    rd_cmd->add_option("--d", rd.d, "distortion value (repeatable)");
    rd_cmd->add_option("--d-min", rd.d_min, "distortion grid start");
    rd_cmd->add_option("--d-max", rd.d_max, "distortion grid end");
    rd_cmd->add_option("--points", rd.points, "distortion grid size");
    rd_cmd->add_option("--grid", rd.grid, "frequency grid intervals (even, >= 16)");
    rd_cmd->add_option("--marginal", rd.marginal,
                       "marginal family: gaussian, uniform, laplace")
        ->check(CLI::IsMember({"gaussian", "uniform", "laplace"}));
    rd_cmd->add_option("--divergence", rd.divergence,
                       "divergence rate for the mixed-measure lower bound, nats");
    rd_cmd->add_option("--units", rd.units, "rate units: nats, bits")
        ->check(CLI::IsMember({"nats", "bits"}));
    rd_cmd->add_option("--format", rd.format, "output format: csv, json")
        ->check(CLI::IsMember({"csv", "json"}));
    rd_cmd->add_option("--output", rd.output,
                       "output path (- for stdout; default $RATEDIST_OUT_DIR/rd_curve.*)");

    Fig1Flags fig;
    CLI::App* fig_cmd = app.add_subcommand(
        "fig1", "emit source and reconstruction-error spectra for the AR(1) example");
    fig_cmd->add_option("--r", fig.r, "AR(1) lag-1 correlation");
    fig_cmd->add_option("--S", fig.S, "total power");
    fig_cmd->add_option("--d", fig.d, "distortion");
    fig_cmd->add_option("--grid", fig.grid, "frequency grid intervals (even, >= 16)");
    fig_cmd->add_option("--output", fig.output,
                        "output path (- for stdout; default $RATEDIST_OUT_DIR/fig1.csv)");

    ChannelFlags ch;
    CLI::App* ch_cmd = app.add_subcommand(
        "channel", "matched-bandwidth white Gaussian channel distortion/SNR bound");
    ch_cmd->add_option("--snr", ch.snr, "channel signal-to-noise ratio")
        ->check(CLI::NonNegativeNumber);
    ch_cmd->add_option("--target-d-over-s", ch.target, "proportional distortion target d/S");
    ch_cmd->add_option("--marginal", ch.marginal,
                       "marginal family: gaussian, uniform, laplace")
        ->check(CLI::IsMember({"gaussian", "uniform", "laplace"}));
    ch_cmd->add_option("--divergence", ch.divergence,
                       "divergence rate in nats (overrides --marginal)");

    VerifyFlags vf;
    CLI::App* vf_cmd = app.add_subcommand(
        "verify", "run the full cross-check suite; exit 0 iff every check passes");
    vf_cmd->add_option("--seed", vf.seed, "Monte Carlo seed");
    vf_cmd->add_option("--tolerance-scale", vf.tolerance_scale,
                       "multiplies every check tolerance (0 forces the failure path)")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    ch.have_snr = ch_cmd->count("--snr") > 0;
    ch.have_target = ch_cmd->count("--target-d-over-s") > 0;
    ch.have_divergence = ch_cmd->count("--divergence") > 0;

    try {
        if (rd_cmd->parsed()) return run_rd_curve(rd, out);
        if (fig_cmd->parsed()) return run_fig1(fig, out);
        if (ch_cmd->parsed()) return run_channel(ch, out);
        return run_verify(vf, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace ratedist
