// Independent brute-force verifiers: Blahut-Arimoto on quantized scalar
// sources, Toeplitz eigenvalue checks of the principal-axes picture, and a
// seeded Monte Carlo simulation of the forward test channel.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratedist/ratefn.hpp"

namespace ratedist {

struct DiscreteSource {
    std::vector<double> support;  // sorted, distinct
    std::vector<double> pmf;      // sums to 1 within 1e-12
    double variance = 0.0;        // second moment of the pmf
};

/// Uniform grid on [-span*sigma, span*sigma] with pmf proportional to the
/// marginal density, renormalized. n_points odd, >= 3.
DiscreteSource quantize_marginal(const MarginalFamily& family, int n_points,
                                 double span_sigmas);

struct BlahutResult {
    double distortion = 0.0;
    double rate = 0.0;       // nats
    double slope = 0.0;      // Lagrange multiplier s < 0 of the solved point
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;   // certified bound on the objective gap at return
};

/// One point of the quantized source's R(D) curve at Lagrange slope s < 0,
/// by deterministic alternating minimization over squared error on the
/// support grid. Stops once the certified optimality gap falls to tol, so
/// the returned rate sits at most tol above the curve at its distortion.
/// Throws std::runtime_error if max_iter is hit first.
BlahutResult blahut_arimoto(const DiscreteSource& src, double slope,
                            double tol = 1e-5, int max_iter = 50000);

/// Tune the slope until the returned distortion matches target_d
/// (|D - target| <= abs_tol), bisecting on the monotone D(s). Iteration cost
/// grows roughly inversely with abs_tol once boundary reproduction atoms turn
/// the inner iteration sublinear, so ask only for the precision you need.
BlahutResult blahut_at_distortion(const DiscreteSource& src, double target_d,
                                  double abs_tol = 1e-4);

struct ToeplitzCheck {
    int n = 0;
    std::vector<double> eigenvalues;  // ascending, all > 0 for AR(1)
    double r = 0.0;                   // AR(1) parameters of the covariance
    double power = 0.0;
};

/// Dense symmetric eigendecomposition of the n x n AR(1) covariance
/// [S r^{|i-j|}], 2 <= n <= 1024.
ToeplitzCheck toeplitz_eigen(const SpectralDensity& ar1, int n);

enum class SzegoTransform { identity, log };

struct SzegoResult {
    double eigen_mean = 0.0;         // (1/n) sum g(lambda_k)
    double spectral_integral = 0.0;  // integral g(Phi(f)) df
    double gap = 0.0;                // |difference|
};

SzegoResult szego_check(const ToeplitzCheck& check, SzegoTransform g);

struct TestChannelReport {
    double d = 0.0;
    double power = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::string backend;
    std::vector<double> empirical_mse;  // per principal coordinate
    std::vector<double> target_gamma;   // (d/S) lambda_k
    double max_rel_err = 0.0;           // max_k |mse_k/gamma_k - 1|
    double mean_mse = 0.0;              // average over coordinates
    double mean_rel_err = 0.0;          // |mean_mse/d - 1|
    double tolerance = 0.0;             // 4/sqrt(n_samples)
    double rate_per_coordinate = 0.0;   // Gaussian analytic (1/2) ln(S/d)
    bool pass = false;                  // every coordinate within tolerance
};

/// Simulate Z_k = a X*_k + n_k with a = 1 - d/S and noise variance
/// a lambda_k d/S, one independent counter stream per coordinate derived from
/// (seed, k). The empirical E(Z_k - X*_k)^2 must match gamma_k = (d/S)
/// lambda_k within 4/sqrt(n_samples) relative.
TestChannelReport test_channel_simulate(const ToeplitzCheck& check, double d,
                                        std::int64_t n_samples, std::uint64_t seed);

void to_json(nlohmann::json& j, const BlahutResult& r);
void to_json(nlohmann::json& j, const TestChannelReport& r);

}  // namespace ratedist
