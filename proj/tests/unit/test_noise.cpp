#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "ftv/noise.hpp"
#include "ftv/truth.hpp"

using namespace ftv;

TEST_CASE("universal threshold") {
    CHECK(gamma_universal(1.0, 1.0, 100, 1) == 0.0);
    CHECK(std::abs(gamma_universal(1.0, 1.0, 100, 100) - 0.30349) <= 5e-6);
    CHECK(gamma_universal(1.0, 1.0, 100, 100) == doctest::Approx(std::sqrt(2.0 * std::log(100.0) / 100.0)));
    const double g = gamma_universal(std::sqrt(2.0), 0.5, 1024, 512);
    CHECK(gamma_universal(std::sqrt(2.0), 1.0, 1024, 512) == doctest::Approx(2.0 * g).scale(0).epsilon(1e-15));
    CHECK(gamma_universal(2.0, 0.5, 1024, 512) > g);
    CHECK(gamma_universal(std::sqrt(2.0), 0.5, 1024, 1024) > g);
    CHECK(gamma_universal(std::sqrt(2.0), 0.5, 2048, 512) < g);
    CHECK_THROWS_AS(gamma_universal(0.0, 1.0, 10, 10), std::invalid_argument);
    CHECK_THROWS_AS(gamma_universal(1.0, -1.0, 10, 10), std::invalid_argument);
    CHECK_THROWS_AS(gamma_universal(1.0, 1.0, 0, 10), std::invalid_argument);
    CHECK_THROWS_AS(gamma_universal(1.0, 1.0, 10, 0), std::invalid_argument);
}

TEST_CASE("pixel simulation") {
    const TorusSignal truth = truth_library("step1d", 1, 256).signal;
    NoiseSpec tiny{1e-300, 0, 7};
    const auto quiet = simulate_pixels(truth, tiny);
    double dev = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        dev = std::max(dev, std::abs(quiet[i] - truth[i]));
    }
    CHECK(dev < 1e-290);

    NoiseSpec spec{0.3, 0, 99, 4};
    const auto a = simulate_pixels(truth, spec);
    const auto b = simulate_pixels(truth, spec);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    for (std::size_t i = 0; i < truth.size(); i += 17) {
        CHECK(a[i] == truth[i] + 0.3 * counter_normal(99, 4, i));
    }
    spec.replicate = 5;
    const auto c = simulate_pixels(truth, spec);
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));

    NoiseSpec coarse{0.3, 64, 1};
    CHECK(coarse.pixel_sd(1, 256) == doctest::Approx(0.6));
    NoiseSpec too_many{0.3, 512, 1};
    CHECK_THROWS_AS(simulate_pixels(truth, too_many), std::invalid_argument);
    NoiseSpec other_rng{0.3, 0, 1};
    other_rng.rng = "mt19937";
    CHECK_THROWS_AS(simulate_pixels(truth, other_rng), std::invalid_argument);
}

TEST_CASE("pure noise has the nominal variance") {
    const int side = 1 << 16;
    const auto s = simulate_pixels(TorusSignal(1, side), NoiseSpec{1.0, 0, 2024});
    double m = 0.0;
    for (double v : s.values()) {
        m += v;
    }
    m /= side;
    double var = 0.0;
    for (double v : s.values()) {
        var += (v - m) * (v - m);
    }
    var /= side - 1;
    CHECK(var >= 0.98);
    CHECK(var <= 1.02);

    // n < N^d: variance sigma^2 N^d / n
    const auto t = simulate_pixels(TorusSignal(2, 512), NoiseSpec{0.5, 512 * 128, 3});
    double sq = 0.0;
    for (double v : t.values()) {
        sq += v * v;
    }
    CHECK(sq / t.size() == doctest::Approx(0.25 * 4.0).scale(0).epsilon(0.02));
}

TEST_CASE("observations") {
    const WaveletFrame frame(FrameDescriptor::wavelet(), 1, 64, 64);
    const auto truth = truth_library("step_ramp1d", 1, 64).signal;
    const auto quiet = observe(truth, frame, NoiseSpec{1e-300, 0, 1}, std::sqrt(2.0));
    const auto exact = frame.analyze(truth);
    for (std::size_t i = 0; i < exact.size(); ++i) {
        CHECK(std::abs(quiet.coefficients.values[i] - exact.values[i]) < 1e-10);
    }
    CHECK(quiet.gamma > 0.0);
    CHECK(quiet.noise.n == 64);
    CHECK_THROWS_AS(observe(truth, frame, NoiseSpec{1.0, 32, 1}, 1.0), std::invalid_argument);

    // one fixed coefficient across replicates: variance sigma^2 / n
    const double sigma = 0.8;
    const int reps = 10000;
    const std::size_t w = 23;
    double sum = 0.0;
    double sq = 0.0;
    for (int r = 0; r < reps; ++r) {
        NoiseSpec spec{sigma, 0, 55, static_cast<std::uint64_t>(r)};
        const double y = observe(TorusSignal(1, 64), frame, spec, 1.0).coefficients.values[w];
        sum += y;
        sq += y * y;
    }
    const double var = (sq - sum * sum / reps) / (reps - 1);
    CHECK(var >= 0.95 * sigma * sigma / 64);
    CHECK(var <= 1.05 * sigma * sigma / 64);
}

TEST_CASE("coverage of the event A_n") {
    const int n = 1024;
    const double kappa = std::sqrt(2.0);
    const double sigma = 1.0;
    const WaveletFrame frame(FrameDescriptor::wavelet(), 1, n, n);
    const int reps = 2000;
    int inside = 0;
    for (int r = 0; r < reps; ++r) {
        const auto obs = observe(TorusSignal(1, n), frame, NoiseSpec{sigma, 0, 77, static_cast<std::uint64_t>(r)}, kappa);
        inside += max_abs(obs.coefficients) <= obs.gamma ? 1 : 0;
    }
    const double card = static_cast<double>(frame.size());
    const double bound = 1.0 - std::pow(card, 1.0 - kappa * kappa);
    const double se = std::sqrt(bound * (1.0 - bound) / reps);
    CHECK(static_cast<double>(inside) / reps >= bound - 3.0 * se);
}

TEST_CASE("standardized wavelet noise passes moment and Lilliefors checks") {
    const int n = 1024;
    const double sigma = 2.0;
    const WaveletFrame frame(FrameDescriptor::wavelet(), 1, n, n);
    std::vector<double> z;
    for (std::uint64_t r = 0; z.size() < 10000; ++r) {
        const auto obs = observe(TorusSignal(1, n), frame, NoiseSpec{sigma, 0, 31337, r}, 1.0);
        for (double v : obs.coefficients.values) {
            if (z.size() < 10000) {
                z.push_back(v * std::sqrt(static_cast<double>(n)) / sigma);
            }
        }
    }
    const double m = static_cast<double>(z.size());
    double mean = 0.0;
    for (double v : z) {
        mean += v;
    }
    mean /= m;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : z) {
        const double c = v - mean;
        m2 += c * c;
        m3 += c * c * c;
        m4 += c * c * c * c;
    }
    m2 /= m;
    m3 /= m;
    m4 /= m;
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2) - 3.0;
    const double z99 = 2.5758293035489004;
    CHECK(std::abs(mean) * std::sqrt(m) < z99);
    CHECK(std::abs(skew) / std::sqrt(6.0 / m) < z99);
    CHECK(std::abs(kurt) / std::sqrt(24.0 / m) < z99);

    // Lilliefors: KS against the normal with estimated moments, 1% critical
    // value 1.031 / sqrt(m) for large m.
    std::sort(z.begin(), z.end());
    boost::math::normal fitted(mean, std::sqrt(m2 * m / (m - 1)));
    double ks = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = boost::math::cdf(fitted, z[i]);
        ks = std::max({ks, (i + 1) / m - f, f - i / m});
    }
    CHECK(ks < 1.031 / std::sqrt(m));
}

TEST_CASE("MAD sigma estimate") {
    const auto truth = truth_library("cartoon2d", 2, 256).signal;
    const auto pix = simulate_pixels(truth, NoiseSpec{0.7, 0, 5});
    CHECK(estimate_sigma_mad(pix, 256 * 256) == doctest::Approx(0.7).scale(0).epsilon(0.03));
    const auto pix1 = simulate_pixels(TorusSignal(1, 4096), NoiseSpec{0.3, 1024, 5});
    CHECK(estimate_sigma_mad(pix1, 1024) == doctest::Approx(0.3).scale(0).epsilon(0.05));
    CHECK_THROWS_AS(estimate_sigma_mad(pix1, 8192), std::invalid_argument);
}

TEST_CASE("truth library") {
    const auto c = truth_library("constant", 2, 16, {{"c", 0.5}});
    CHECK(c.bv == 0.0);
    CHECK(c.sup == 0.5);
    const auto step = truth_library("step1d", 1, 128);
    CHECK(step.bv == 2.0);
    CHECK(step.sup == 1.0);
    const auto disc = truth_library("disc2d", 2, 256, {{"radius", 0.25}});
    const double perimeter = bv_seminorm(disc.signal, TvFlavor::isotropic);
    CHECK(std::abs(perimeter - std::numbers::pi / 2) <= 0.05 * std::numbers::pi / 2);
    const auto sharp = truth_library("disc2d", 2, 256, {{"edge", 0.0}});
    CHECK(sharp.bv <= sharp.bound);
    const auto square = truth_library("square2d", 2, 64);
    CHECK(square.bv == 2.0);

    for (const auto& name : truth_names()) {
        const int d = name.find("2d") != std::string::npos ? 2 : 1;
        const auto t = truth_library(name, d, d == 1 ? 1024 : 128);
        CHECK(t.sup <= t.bound);
        CHECK(t.bv <= t.bound);
        CHECK(t.bound > 0.0);
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = truth_library("random_cartoon2d", 2, 64, {{"seed", seed}});
        CHECK(t.bv <= t.bound);
    }
    const auto r1 = truth_library("random_cartoon2d", 2, 32, {{"seed", 3}});
    const auto r2 = truth_library("random_cartoon2d", 2, 32, {{"seed", 3}});
    CHECK(std::equal(r1.signal.values().begin(), r1.signal.values().end(), r2.signal.values().begin()));

    CHECK_THROWS_AS(truth_library("sawtooth", 1, 64), std::invalid_argument);
    CHECK_THROWS_AS(truth_library("step1d", 1, 64, {{"heigth", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(truth_library("disc2d", 1, 64), std::invalid_argument);
}
