#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "ratedist/cli.hpp"
#include "ratedist/spectra.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"ratedist"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = ratedist::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

fs::path test_dir() {
    const fs::path dir = fs::temp_directory_path() / "ratedist_cli_tests";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("version and help are available") {
    const auto v = run_cli({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);
    const auto h = run_cli({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("rd-curve") != std::string::npos);
    CHECK(h.out.find("channel") != std::string::npos);
    CHECK(h.out.find("verify") != std::string::npos);
}

TEST_CASE("a subcommand is required") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
}

TEST_CASE("channel reports the minimum snr for a target") {
    const auto g = run_cli({"channel", "--target-d-over-s", "0.1"});
    CHECK(g.code == 0);
    CHECK(g.out == "SNR_min = 9.000 (9.54 dB)\n");
    const auto l = run_cli({"channel", "--target-d-over-s", "0.1", "--marginal", "laplace"});
    CHECK(l.code == 0);
    CHECK(l.out == "SNR_min = 7.653 (8.84 dB)\n");
    const auto u = run_cli({"channel", "--target-d-over-s", "0.1", "--marginal", "uniform"});
    CHECK(u.code == 0);
    CHECK(u.out == "SNR_min = 6.026 (7.80 dB)\n");
    // an explicit divergence overrides the marginal
    const auto o = run_cli({"channel", "--target-d-over-s", "0.1", "--marginal", "laplace",
                            "--divergence", "0"});
    CHECK(o.out == "SNR_min = 9.000 (9.54 dB)\n");
    // a trivial target needs no channel at all
    const auto z = run_cli({"channel", "--target-d-over-s", "1.0"});
    CHECK(z.code == 0);
    CHECK(z.out == "SNR_min = 0.000 (-inf dB)\n");
}

TEST_CASE("channel reports the distortion floor for an snr") {
    const auto z = run_cli({"channel", "--snr", "0"});
    CHECK(z.code == 0);
    CHECK(z.out == "d/S >= 1\n");
    const auto n = run_cli({"channel", "--snr", "9"});
    CHECK(n.code == 0);
    CHECK(n.out == "d/S >= 0.1\n");
}

TEST_CASE("channel needs exactly one mode") {
    const auto both = run_cli({"channel", "--snr", "9", "--target-d-over-s", "0.1"});
    CHECK(both.code == 2);
    CHECK(both.err.find("error:") != std::string::npos);
    const auto neither = run_cli({"channel"});
    CHECK(neither.code == 2);
}

TEST_CASE("rd-curve emits the non-weighted curve on stdout") {
    const auto r = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                            "--d", "0.25", "--output", "-"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "d,rate_lower,rate_upper,units,measure");
    const auto row = split_csv(lines[1]);
    REQUIRE(row.size() == 5);
    CHECK(row[0] == "0.25");
    CHECK(row[1] == row[2]);  // the non-weighted curve is exact, not a band
    CHECK(std::stod(row[2]) == doctest::Approx(0.634255662731753582).epsilon(1e-6));
    CHECK(row[3] == "nats/sample");
    CHECK(row[4] == "nonweighted");
}

TEST_CASE("rd-curve converts rates to bits") {
    const auto nats = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                               "--d", "0.25", "--output", "-"});
    const auto bits = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                               "--d", "0.25", "--units", "bits", "--output", "-"});
    REQUIRE(nats.code == 0);
    REQUIRE(bits.code == 0);
    const auto nrow = split_csv(split_lines(nats.out)[1]);
    const auto brow = split_csv(split_lines(bits.out)[1]);
    CHECK(brow[3] == "bits/sample");
    CHECK(std::stod(brow[2]) ==
          doctest::Approx(std::stod(nrow[2]) / std::numbers::ln2).epsilon(1e-9));
}

TEST_CASE("rd-curve at full power costs nothing") {
    const auto r = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                            "--d", "1.0", "--output", "-"});
    REQUIRE(r.code == 0);
    const auto row = split_csv(split_lines(r.out)[1]);
    CHECK(std::stod(row[2]) <= 1e-8);
}

TEST_CASE("rd-curve proportional band for an iid uniform source") {
    const auto r = run_cli({"rd-curve", "--model", "ar1", "--r", "0", "--measure",
                            "proportional", "--marginal", "uniform", "--d", "0.01",
                            "--output", "-"});
    REQUIRE(r.code == 0);
    const auto row = split_csv(split_lines(r.out)[1]);
    CHECK(std::stod(row[1]) == doctest::Approx(2.1260998846833731).epsilon(1e-9));
    CHECK(std::stod(row[2]) == doctest::Approx(2.3025850929940457).epsilon(1e-9));
    CHECK(row[4] == "proportional");
}

TEST_CASE("rd-curve proportional band for a band-limited source") {
    const auto r = run_cli({"rd-curve", "--model", "white", "--B", "2", "--measure",
                            "proportional", "--d", "0.1", "--output", "-"});
    REQUIRE(r.code == 0);
    const auto row = split_csv(split_lines(r.out)[1]);
    CHECK(std::stod(row[2]) == doctest::Approx(2.0 * std::log(10.0)).epsilon(1e-12));
    CHECK(row[3] == "nats/second");
}

TEST_CASE("rd-curve mixed measure emits the reference value") {
    const auto r = run_cli({"rd-curve", "--model", "ou", "--measure", "mixed", "--B", "10",
                            "--d", "0.5", "--output", "-"});
    REQUIRE(r.code == 0);
    const auto row = split_csv(split_lines(r.out)[1]);
    CHECK(std::stod(row[2]) == doctest::Approx(7.03434873900676170).epsilon(1e-9));
    CHECK(row[1] == row[2]);  // no divergence given
    CHECK(row[3] == "nats/second");
    CHECK(row[4] == "mixed");
    // an explicit divergence separates the band edges
    const auto b = run_cli({"rd-curve", "--model", "ou", "--measure", "mixed", "--B", "10",
                            "--d", "0.5", "--divergence", "0.25", "--output", "-"});
    const auto brow = split_csv(split_lines(b.out)[1]);
    CHECK(std::stod(brow[2]) - std::stod(brow[1]) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("rd-curve json output round-trips") {
    const auto r = run_cli({"rd-curve", "--model", "ou", "--measure", "mixed", "--B", "10",
                            "--d", "0.5", "--format", "json", "--output", "-"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["measure"] == "mixed");
    CHECK(j["units"] == "nats/second");
    CHECK(j["mixed_bandwidth"].get<double>() == 10.0);
    REQUIRE(j["points"].size() == 1);
    CHECK(j["points"][0]["d"].get<double>() == 0.5);
    CHECK(j["points"][0]["rate_upper"].get<double>() ==
          doctest::Approx(7.03434873900676170).epsilon(1e-9));
}

TEST_CASE("rd-curve grids sweep between the endpoints") {
    const auto r = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                            "--d-min", "0.2", "--d-max", "0.4", "--points", "3",
                            "--output", "-"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(split_csv(lines[1])[0] == "0.2");
    CHECK(split_csv(lines[2])[0] == "0.3");
    CHECK(split_csv(lines[3])[0] == "0.4");
    // rates fall as d grows
    CHECK(std::stod(split_csv(lines[1])[2]) > std::stod(split_csv(lines[2])[2]));
    CHECK(std::stod(split_csv(lines[2])[2]) > std::stod(split_csv(lines[3])[2]));
}

TEST_CASE("rd-curve rejects conflicting or missing grids") {
    CHECK(run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted", "--d", "0.3",
                   "--d-min", "0.1", "--d-max", "0.5", "--points", "3", "--output", "-"})
              .code == 2);
    CHECK(run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted", "--output", "-"})
              .code == 2);
    CHECK(run_cli({"rd-curve", "--model", "ar1", "--d", "0.3", "--output", "-"}).code == 2);
    CHECK(run_cli({"rd-curve", "--model", "ar1", "--measure", "sideways", "--d", "0.3",
                   "--output", "-"})
              .code == 2);
    CHECK(run_cli({"rd-curve", "--model", "white", "--measure", "proportional", "--d", "0.3",
                   "--output", "-"})
              .code == 2);
}

TEST_CASE("rd-curve explains unsupported measure combinations") {
    const auto prop_ou = run_cli({"rd-curve", "--model", "ou", "--measure", "proportional",
                                  "--d", "0.5", "--output", "-"});
    CHECK(prop_ou.code == 2);
    CHECK(prop_ou.err.find("mixed measure") != std::string::npos);
    const auto nw_marg = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                                  "--marginal", "uniform", "--d", "0.25", "--output", "-"});
    CHECK(nw_marg.code == 2);
    const auto corr_marg = run_cli({"rd-curve", "--model", "ar1", "--measure", "proportional",
                                    "--marginal", "uniform", "--d", "0.25", "--output", "-"});
    CHECK(corr_marg.code == 2);
    const auto mixed_marg = run_cli({"rd-curve", "--model", "ou", "--measure", "mixed",
                                     "--B", "10", "--marginal", "uniform", "--d", "0.5",
                                     "--output", "-"});
    CHECK(mixed_marg.code == 2);
    CHECK(mixed_marg.err.find("--divergence") != std::string::npos);
    const auto mixed_no_b = run_cli({"rd-curve", "--model", "ou", "--measure", "mixed",
                                     "--d", "0.5", "--output", "-"});
    CHECK(mixed_no_b.code == 2);
}

TEST_CASE("rd-curve reports the mixed distortion limits on a bad target") {
    const auto r = run_cli({"rd-curve", "--model", "ou", "--measure", "mixed", "--B", "10",
                            "--d", "0.02", "--output", "-"});
    CHECK(r.code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(r.err.find("0.020261") != std::string::npos);
}

TEST_CASE("rd-curve tabulated input reproduces the analytic model") {
    // tabulate the density on the solver's own nodes, full precision
    const auto psd = ratedist::SpectralDensity::ar1(1.0 / 3.0, 1.0);
    const fs::path csv = test_dir() / "ar1_psd.csv";
    {
        std::ofstream f(csv);
        f << "f,phi\n";
        char buf[64];
        for (int i = 0; i <= 4096; ++i) {
            const double fr = 0.0 + (0.5 - 0.0) * static_cast<double>(i) / 4096;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", fr,
                          ratedist::eval_psd(psd, fr));
            f << buf;
        }
    }
    const auto tab = run_cli({"rd-curve", "--model", "tabulated", "--psd-csv", csv.string(),
                              "--domain", "discrete", "--measure", "nonweighted", "--d", "0.7",
                              "--output", "-"});
    const auto ana = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                              "--d", "0.7", "--output", "-"});
    REQUIRE(tab.code == 0);
    REQUIRE(ana.code == 0);
    CHECK(split_csv(split_lines(tab.out)[1])[2] == split_csv(split_lines(ana.out)[1])[2]);
    // a tabulated model without a file is refused
    CHECK(run_cli({"rd-curve", "--model", "tabulated", "--measure", "nonweighted", "--d",
                   "0.5", "--output", "-"})
              .code == 2);
}

TEST_CASE("rd-curve writes files only on success") {
    const fs::path dir = test_dir();
    const fs::path good = dir / "curve_out.csv";
    fs::remove(good);
    const auto ok = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                             "--d", "0.25", "--output", good.string()});
    REQUIRE(ok.code == 0);
    CHECK(ok.out == "wrote " + good.string() + "\n");
    CHECK(fs::exists(good));

    const fs::path bad = dir / "curve_bad.csv";
    fs::remove(bad);
    const auto fail = run_cli({"rd-curve", "--model", "ou", "--measure", "mixed", "--B", "10",
                               "--d", "0.02", "--output", bad.string()});
    CHECK(fail.code == 2);
    CHECK(!fs::exists(bad));

    const auto nodir = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                                "--d", "0.25", "--output", "/nonexistent_dir/x.csv"});
    CHECK(nodir.code == 2);
}

TEST_CASE("rd-curve honors the output directory variable") {
    const fs::path dir = test_dir() / "env_out";
    fs::create_directories(dir);
    fs::remove(dir / "rd_curve.csv");
    ::setenv("RATEDIST_OUT_DIR", dir.c_str(), 1);
    const auto r = run_cli({"rd-curve", "--model", "ar1", "--measure", "nonweighted",
                            "--d", "0.25"});
    ::unsetenv("RATEDIST_OUT_DIR");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "rd_curve.csv"));
}

TEST_CASE("fig1 emits both error spectra over the full band") {
    const auto r = run_cli({"fig1", "--output", "-"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 8194);  // header + mirrored solver nodes
    CHECK(lines[0] == "f,phi,err_nonweighted,err_proportional");

    const auto first = split_csv(lines[1]);
    CHECK(std::stod(first[0]) == -0.5);
    CHECK(std::stod(first[1]) == doctest::Approx(0.5).epsilon(1e-14));
    const auto mid = split_csv(lines[1 + 4096]);
    CHECK(std::stod(mid[0]) == 0.0);
    CHECK(std::stod(mid[1]) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::stod(mid[3]) == doctest::Approx(1.4).epsilon(1e-14));

    // the proportional column is exactly (d/S) phi, row by row
    double prev_f = 0.0;
    double acc_nw = 0.0, acc_prop = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto row = split_csv(lines[i]);
        REQUIRE(row.size() == 4);
        const double f = std::stod(row[0]);
        const double phi = std::stod(row[1]);
        const double enw = std::stod(row[2]);
        const double ep = std::stod(row[3]);
        CHECK(ep == 0.7 * phi);
        CHECK(enw <= phi * (1.0 + 1e-12));
        if (i > 1) {
            const double h = f - prev_f;
            const auto prow = split_csv(lines[i - 1]);
            acc_nw += 0.5 * h * (std::stod(prow[2]) + enw);
            acc_prop += 0.5 * h * (std::stod(prow[3]) + ep);
        }
        prev_f = f;
    }
    // both error spectra integrate to the distortion
    CHECK(acc_nw == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(acc_prop == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("fig1 output is deterministic") {
    const auto a = run_cli({"fig1", "--output", "-"});
    const auto b = run_cli({"fig1", "--output", "-"});
    CHECK(a.out == b.out);
}

TEST_CASE("fig1 flat source has constant columns") {
    const auto r = run_cli({"fig1", "--r", "0", "--d", "0.5", "--grid", "64", "--output", "-"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 130);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto row = split_csv(lines[i]);
        CHECK(std::stod(row[1]) == 1.0);
        CHECK(std::stod(row[2]) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(std::stod(row[3]) == 0.5);
    }
}

TEST_CASE("fig1 validates the distortion") {
    CHECK(run_cli({"fig1", "--d", "1.5", "--output", "-"}).code == 2);
    CHECK(run_cli({"fig1", "--d", "0", "--output", "-"}).code == 2);
}

TEST_CASE("verify passes with the default seed and is reproducible") {
    const auto a = run_cli({"verify"});
    CHECK(a.code == 0);
    CHECK(a.out.find("verification seed") != std::string::npos);
    CHECK(a.out.find("11/11 checks passed") != std::string::npos);
    CHECK(a.out.find("[FAIL]") == std::string::npos);
    const auto b = run_cli({"verify"});
    CHECK(a.out == b.out);
}

TEST_CASE("verify fails loudly when tolerances collapse") {
    const auto r = run_cli({"verify", "--tolerance-scale", "0"});
    CHECK(r.code == 1);
    CHECK(r.out.find("[FAIL]") != std::string::npos);
    CHECK(r.out.find("/11 checks passed") != std::string::npos);
}
