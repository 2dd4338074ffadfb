#include "ratedist/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "ratedist/kernels.hpp"
#include "ratedist/rng.hpp"
#include "ratedist/version.hpp"

namespace ratedist {

namespace {

double marginal_density_shape(const MarginalFamily& family, double x) {
    const double sigma = std::sqrt(family.variance);
    switch (family.kind) {
        case Marginal::gaussian:
            return std::exp(-0.5 * x * x / family.variance);
        case Marginal::uniform:
            return std::fabs(x) <= std::sqrt(3.0) * sigma ? 1.0 : 0.0;
        case Marginal::laplace:
            // variance 2 b^2
            return std::exp(-std::fabs(x) * std::numbers::sqrt2 / sigma);
    }
    return 0.0;
}

struct BaWorkspace {
    int n = 0;
    std::vector<double> a;       // exp(s (x_i - x_j)^2), row-major symmetric
    std::vector<double> ad;      // a * squared distance
    std::vector<double> t, c;    // p_i / z_i and the per-column update factors

    std::span<const double> row_a(int i) const {
        return {a.data() + static_cast<std::size_t>(i) * n, static_cast<std::size_t>(n)};
    }
    std::span<const double> row_ad(int i) const {
        return {ad.data() + static_cast<std::size_t>(i) * n, static_cast<std::size_t>(n)};
    }
};

void ba_build(BaWorkspace& w, const DiscreteSource& src, double slope) {
    const int n = static_cast<int>(src.support.size());
    w.n = n;
    w.a.resize(static_cast<std::size_t>(n) * n);
    w.ad.resize(w.a.size());
    w.t.resize(static_cast<std::size_t>(n));
    w.c.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double diff = src.support[static_cast<std::size_t>(i)] -
                                src.support[static_cast<std::size_t>(j)];
            const double dist = diff * diff;
            const double aij = std::exp(slope * dist);
            w.a[static_cast<std::size_t>(i) * n + j] = aij;
            w.ad[static_cast<std::size_t>(i) * n + j] = aij * dist;
        }
    }
}

/// One BA solve at fixed slope; q is the output distribution, warm-started by
/// the caller and left at the fixed point.
BlahutResult ba_solve(BaWorkspace& w, const DiscreteSource& src, double slope,
                      std::vector<double>& q, double tol, int max_iter) {
    const int n = w.n;
    const std::vector<double>& p = src.pmf;
    BlahutResult res;
    res.slope = slope;
    for (int it = 1; it <= max_iter; ++it) {
        double dist = 0.0, logsum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double zi = kernels::dot(w.row_a(i), q);
            const double pi = p[static_cast<std::size_t>(i)];
            w.t[static_cast<std::size_t>(i)] = pi / zi;
            dist += pi * kernels::dot(w.row_ad(i), q) / zi;
            logsum += pi * std::log(zi);
        }
        // c_j = sum_i (p_i / z_i) a_ij is both the multiplicative q update
        // (the matrix is symmetric, so column j is row j) and, via convexity
        // of -sum_i p_i ln z_i over the simplex, max_j c_j - 1 bounds the
        // objective gap to the fixed point; that bound is the stopping rule,
        // which stays sound when boundary atoms decay only sublinearly
        double cmax = 0.0;
        for (int j = 0; j < n; ++j) {
            w.c[static_cast<std::size_t>(j)] = kernels::dot(w.row_a(j), w.t);
            cmax = std::max(cmax, w.c[static_cast<std::size_t>(j)]);
        }
        const double rate = slope * dist - logsum;
        res.distortion = dist;
        res.rate = std::max(0.0, rate);
        res.iterations = it;
        res.residual = std::max(0.0, cmax - 1.0);
        if (res.residual <= tol) {
            res.converged = true;
            return res;
        }
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            q[static_cast<std::size_t>(j)] *= w.c[static_cast<std::size_t>(j)];
            total += q[static_cast<std::size_t>(j)];
        }
        for (double& qj : q) qj /= total;
    }
    std::ostringstream msg;
    msg << "blahut_arimoto: no convergence after " << max_iter
        << " iterations (gap bound " << res.residual << ")";
    throw std::runtime_error(msg.str());
}

}  // namespace

DiscreteSource quantize_marginal(const MarginalFamily& family, int n_points,
                                 double span_sigmas) {
    if (n_points < 3 || n_points % 2 == 0)
        throw std::invalid_argument("quantize_marginal: n_points must be odd and >= 3");
    if (!(span_sigmas > 0.0))
        throw std::invalid_argument("quantize_marginal: span must be > 0");
    if (!(family.variance > 0.0))
        throw std::invalid_argument("quantize_marginal: variance must be > 0");
    const double half = span_sigmas * std::sqrt(family.variance);
    DiscreteSource src;
    src.support.resize(static_cast<std::size_t>(n_points));
    src.pmf.resize(static_cast<std::size_t>(n_points));
    double total = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double x = -half + 2.0 * half * i / (n_points - 1);
        src.support[static_cast<std::size_t>(i)] = x;
        const double m = marginal_density_shape(family, x);
        src.pmf[static_cast<std::size_t>(i)] = m;
        total += m;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("quantize_marginal: density vanishes on the whole grid");
    for (std::size_t i = 0; i < src.pmf.size(); ++i) {
        src.pmf[i] /= total;
        src.variance += src.pmf[i] * src.support[i] * src.support[i];
    }
    return src;
}

BlahutResult blahut_arimoto(const DiscreteSource& src, double slope, double tol,
                            int max_iter) {
    if (!(slope < 0.0)) throw std::invalid_argument("blahut_arimoto: slope must be < 0");
    if (!(tol > 0.0)) throw std::invalid_argument("blahut_arimoto: tol must be > 0");
    BaWorkspace w;
    ba_build(w, src, slope);
    std::vector<double> q = src.pmf;
    return ba_solve(w, src, slope, q, tol, max_iter);
}

BlahutResult blahut_at_distortion(const DiscreteSource& src, double target_d,
                                  double abs_tol) {
    if (!(target_d > 0.0) || target_d >= src.variance)
        throw std::out_of_range(
            "blahut_at_distortion: target must lie in (0, source variance)");
    BaWorkspace w;
    // hold the inner gap an order below abs_tol's effect on distortion so the
    // slope bisection terminates against iterate noise; every evaluation
    // restarts q from the source pmf, since a q carried over from another
    // slope can have reproduction atoms collapsed so deep that reviving them
    // multiplicatively would take millions of iterations
    const double inner_tol = std::clamp(10.0 * abs_tol, 1e-8, 1e-4);
    const auto eval = [&](double slope) {
        ba_build(w, src, slope);
        std::vector<double> q = src.pmf;
        return ba_solve(w, src, slope, q, inner_tol, 50000);
    };

    // distortion is nondecreasing in slope; expand a bracket around the
    // Gaussian-matched guess s = -1/(2 d)
    double hi = -1.0 / (2.0 * target_d);  // larger slope -> larger distortion
    double lo = hi;
    BlahutResult res = eval(hi);
    for (int k = 0; k < 60 && res.distortion < target_d; ++k) {
        lo = hi;
        hi *= 0.5;
        res = eval(hi);
    }
    if (res.distortion < target_d)
        throw std::runtime_error("blahut_at_distortion: distortion target unreachable");
    if (std::fabs(res.distortion - target_d) <= abs_tol) return res;
    BlahutResult res_lo = eval(lo);
    for (int k = 0; k < 60 && res_lo.distortion > target_d; ++k) {
        hi = lo;
        lo *= 2.0;
        res_lo = eval(lo);
    }
    if (res_lo.distortion > target_d)
        throw std::runtime_error("blahut_at_distortion: failed to bracket the target");

    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        res = eval(mid);
        if (std::fabs(res.distortion - target_d) <= abs_tol) return res;
        (res.distortion < target_d ? lo : hi) = mid;
    }
    throw std::runtime_error("blahut_at_distortion: slope bisection did not converge");
}

ToeplitzCheck toeplitz_eigen(const SpectralDensity& ar1, int n) {
    if (!ar1.is_ar1())
        throw std::invalid_argument("toeplitz_eigen: needs an AR(1) density");
    if (n < 2 || n > 1024)
        throw std::invalid_argument("toeplitz_eigen: n must lie in [2, 1024]");
    const auto& m = ar1.as_ar1();
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cov(i, j) = m.power * std::pow(m.r, std::abs(i - j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("toeplitz_eigen: eigensolver failed");
    ToeplitzCheck out;
    out.n = n;
    out.r = m.r;
    out.power = m.power;
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

SzegoResult szego_check(const ToeplitzCheck& check, SzegoTransform g) {
    if (check.eigenvalues.empty())
        throw std::invalid_argument("szego_check: no eigenvalues");
    SzegoResult out;
    double acc = 0.0;
    if (g == SzegoTransform::identity) {
        for (double l : check.eigenvalues) acc += l;
        out.spectral_integral = check.power;  // integral of the density = S
    } else {
        for (double l : check.eigenvalues) {
            if (!(l > 0.0))
                throw std::invalid_argument("szego_check: log of a nonpositive eigenvalue");
            acc += std::log(l);
        }
        out.spectral_integral = std::log(check.power) + std::log1p(-check.r * check.r);
    }
    out.eigen_mean = acc / check.n;
    out.gap = std::fabs(out.eigen_mean - out.spectral_integral);
    return out;
}

TestChannelReport test_channel_simulate(const ToeplitzCheck& check, double d,
                                        std::int64_t n_samples, std::uint64_t seed) {
    const double S = check.power;
    if (!(d > 0.0) || d > S * (1.0 + 1e-12))
        throw std::out_of_range("test_channel_simulate: d must lie in (0, S]");
    if (n_samples < 1)
        throw std::invalid_argument("test_channel_simulate: n_samples must be >= 1");

    TestChannelReport rep;
    rep.d = d;
    rep.power = S;
    rep.n_samples = n_samples;
    rep.seed = seed;
    rep.backend = kernels::backend_name();
    rep.tolerance = 4.0 / std::sqrt(static_cast<double>(n_samples));
    rep.rate_per_coordinate = 0.5 * std::log(S / d);

    const double ratio = d / S;
    const double a = 1.0 - ratio;
    const std::size_t chunk = 1 << 16;
    std::vector<double> z0(chunk), z1(chunk);

    rep.empirical_mse.reserve(check.eigenvalues.size());
    rep.target_gamma.reserve(check.eigenvalues.size());
    double mean_acc = 0.0, max_rel = 0.0;
    for (std::size_t k = 0; k < check.eigenvalues.size(); ++k) {
        const double lambda = check.eigenvalues[k];
        // Z - X* = (a-1) X* + noise, with X* var lambda, noise var a lambda d/S
        const double c0 = (a - 1.0) * std::sqrt(lambda);
        const double c1 = std::sqrt(a * lambda * ratio);
        const std::uint64_t key = stream_key(seed, static_cast<std::uint64_t>(k));
        double acc = 0.0;
        std::int64_t done = 0;
        while (done < n_samples) {
            const std::size_t m =
                static_cast<std::size_t>(std::min<std::int64_t>(
                    static_cast<std::int64_t>(chunk), n_samples - done));
            kernels::gaussian_pairs(key, 2 * static_cast<std::uint64_t>(done), m,
                                    z0.data(), z1.data());
            acc += kernels::sum_sq_lincomb(std::span(z0.data(), m),
                                           std::span(z1.data(), m), c0, c1);
            done += static_cast<std::int64_t>(m);
        }
        const double mse = acc / static_cast<double>(n_samples);
        const double gamma = ratio * lambda;
        rep.empirical_mse.push_back(mse);
        rep.target_gamma.push_back(gamma);
        mean_acc += mse;
        max_rel = std::max(max_rel, std::fabs(mse / gamma - 1.0));
    }
    rep.mean_mse = mean_acc / static_cast<double>(check.eigenvalues.size());
    rep.mean_rel_err = std::fabs(rep.mean_mse / d - 1.0);
    rep.max_rel_err = max_rel;
    rep.pass = max_rel <= rep.tolerance && rep.mean_rel_err <= rep.tolerance;
    return rep;
}

void to_json(nlohmann::json& j, const BlahutResult& r) {
    j = nlohmann::json{
        {"version", version},       {"distortion", r.distortion},
        {"rate", r.rate},           {"slope", r.slope},
        {"iterations", r.iterations}, {"converged", r.converged},
        {"residual", r.residual},
    };
}

void to_json(nlohmann::json& j, const TestChannelReport& r) {
    j = nlohmann::json{
        {"version", version},
        {"d", r.d},
        {"power", r.power},
        {"n_samples", r.n_samples},
        {"seed", r.seed},
        {"backend", r.backend},
        {"empirical_mse", r.empirical_mse},
        {"target_gamma", r.target_gamma},
        {"max_rel_err", r.max_rel_err},
        {"mean_mse", r.mean_mse},
        {"mean_rel_err", r.mean_rel_err},
        {"tolerance", r.tolerance},
        {"rate_per_coordinate", r.rate_per_coordinate},
        {"pass", r.pass},
    };
}

}  // namespace ratedist
