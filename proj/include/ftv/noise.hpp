#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "ftv/frame.hpp"
#include "ftv/grid.hpp"

namespace ftv {

/// White-noise level sigma / sqrt(n) discretized on the grid.
struct NoiseSpec {
    double sigma = 1.0;
    long long n = 0;  // 0: couple to the grid, n = N^d
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::string rng = "splitmix64-boxmuller";

    long long effective_n(int dim, int side) const;
    /// sigma * sqrt(N^d / n).
    double pixel_sd(int dim, int side) const;
};

/// Counter-based stream: a pure function of its three keys.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t replicate, std::uint64_t counter);
double counter_uniform(std::uint64_t seed, std::uint64_t replicate, std::uint64_t counter);  // in (0, 1]
double counter_normal(std::uint64_t seed, std::uint64_t replicate, std::uint64_t cell);

struct Observations {
    CoefficientVector coefficients;
    FrameDescriptor frame;
    NoiseSpec noise;
    double gamma = 0.0;
    double kappa = 0.0;
};

double gamma_universal(double kappa, double sigma, long long n, std::size_t card);

TorusSignal simulate_pixels(const TorusSignal& truth, const NoiseSpec& noise);

/// Y = analyze(pixels) on the frame, gamma from the universal rule.
Observations observe_pixels(const TorusSignal& pixels, const Frame& frame, const NoiseSpec& noise, double kappa);
Observations observe(const TorusSignal& truth, const Frame& frame, const NoiseSpec& noise, double kappa);

/// sigma from the MAD of the finest full-depth wavelet details, rescaled to
/// the white-noise level of n.
double estimate_sigma_mad(const TorusSignal& pixels, long long n, int vanishing_moments = 3);

} // namespace ftv
