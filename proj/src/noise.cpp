#include "ftv/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ftv {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

long long NoiseSpec::effective_n(int dim, int side) const {
    return n > 0 ? n : static_cast<long long>(ipow(side, dim));
}

double NoiseSpec::pixel_sd(int dim, int side) const {
    const double cells = static_cast<double>(ipow(side, dim));
    return sigma * std::sqrt(cells / static_cast<double>(effective_n(dim, side)));
}

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t replicate, std::uint64_t counter) {
    return splitmix(splitmix(splitmix(seed) ^ replicate) ^ counter);
}

double counter_uniform(std::uint64_t seed, std::uint64_t replicate, std::uint64_t counter) {
    return static_cast<double>((counter_hash(seed, replicate, counter) >> 11) + 1) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t replicate, std::uint64_t cell) {
    const double u1 = counter_uniform(seed, replicate, 2 * cell);
    const double u2 = counter_uniform(seed, replicate, 2 * cell + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double gamma_universal(double kappa, double sigma, long long n, std::size_t card) {
    if (!(kappa > 0.0) || !(sigma > 0.0) || n <= 0 || card < 1) {
        throw std::invalid_argument("gamma_universal: kappa, sigma, n and #Omega_n must be positive");
    }
    return kappa * sigma * std::sqrt(2.0 * std::log(static_cast<double>(card)) / static_cast<double>(n));
}

TorusSignal simulate_pixels(const TorusSignal& truth, const NoiseSpec& noise) {
    if (truth.size() == 0) {
        throw std::invalid_argument("simulate_pixels: empty truth");
    }
    if (!(noise.sigma > 0.0) || !std::isfinite(noise.sigma)) {
        throw std::invalid_argument("simulate_pixels: sigma must be positive and finite");
    }
    const auto cells = static_cast<long long>(truth.size());
    if (noise.n < 0 || noise.n > cells) {
        throw std::invalid_argument("simulate_pixels: n = " + std::to_string(noise.n) +
                                    " exceeds the grid capacity N^d = " + std::to_string(cells));
    }
    if (noise.rng != NoiseSpec{}.rng) {
        throw std::invalid_argument("simulate_pixels: unknown generator '" + noise.rng + "'");
    }
    const double sd = noise.pixel_sd(truth.dim(), truth.side());
    TorusSignal out = truth;
    auto v = out.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] += sd * counter_normal(noise.seed, noise.replicate, i);
    }
    return out;
}

Observations observe_pixels(const TorusSignal& pixels, const Frame& frame, const NoiseSpec& noise, double kappa) {
    const long long n = noise.effective_n(pixels.dim(), pixels.side());
    if (n != frame.n()) {
        throw std::invalid_argument("observe: noise level n = " + std::to_string(n) +
                                    " does not match the frame's n = " + std::to_string(frame.n()));
    }
    Observations obs;
    obs.coefficients = frame.analyze(pixels);
    obs.frame = frame.descriptor();
    obs.noise = noise;
    obs.noise.n = n;
    obs.kappa = kappa;
    obs.gamma = gamma_universal(kappa, noise.sigma, n, frame.size());
    return obs;
}

Observations observe(const TorusSignal& truth, const Frame& frame, const NoiseSpec& noise, double kappa) {
    return observe_pixels(simulate_pixels(truth, noise), frame, noise, kappa);
}

double estimate_sigma_mad(const TorusSignal& pixels, long long n, int vanishing_moments) {
    const int d = pixels.dim();
    const int side = pixels.side();
    if (side < 2) {
        throw std::invalid_argument("estimate_sigma_mad: grid too small");
    }
    if (n <= 0 || n > static_cast<long long>(pixels.size())) {
        throw std::invalid_argument("estimate_sigma_mad: n must lie in 1..N^d");
    }
    PeriodicDwt dwt(d, side, vanishing_moments);
    std::vector<double> c(pixels.values().begin(), pixels.values().end());
    dwt.forward(c);
    // finest details: at least one per-axis coordinate in the upper half
    std::vector<double> fine;
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::size_t rem = i;
        bool upper = false;
        for (int a = 0; a < d; ++a) {
            upper = upper || static_cast<int>(rem % side) >= side / 2;
            rem /= side;
        }
        if (upper) {
            fine.push_back(std::abs(c[i]));
        }
    }
    auto mid = fine.begin() + static_cast<std::ptrdiff_t>(fine.size() / 2);
    std::nth_element(fine.begin(), mid, fine.end());
    double med = *mid;
    if (fine.size() % 2 == 0) {
        med = 0.5 * (med + *std::max_element(fine.begin(), mid));
    }
    const double pixel_sd = med / 0.6744897501960817;
    return pixel_sd * std::sqrt(static_cast<double>(n) / static_cast<double>(pixels.size()));
}

} // namespace ftv
