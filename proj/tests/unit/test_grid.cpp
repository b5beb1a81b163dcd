#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "ftv/grid.hpp"
#include "ftv/signal_io.hpp"

using namespace ftv;

namespace {

TorusSignal random_signal(int d, int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    TorusSignal s(d, n);
    for (double& v : s.values()) {
        v = g(rng);
    }
    return s;
}

VectorField random_field(int d, int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    VectorField p{d, n, std::vector<double>(ipow(n, d) * d)};
    for (double& v : p.values) {
        v = g(rng);
    }
    return p;
}

} // namespace

TEST_CASE("signal construction validates shape and values") {
    CHECK_THROWS_AS(TorusSignal(1, 6), std::invalid_argument);
    CHECK_THROWS_AS(TorusSignal(4, 2), std::invalid_argument);
    CHECK_THROWS_AS(TorusSignal(1, 4, std::vector<double>{1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(TorusSignal(1, 2, std::vector<double>{1, std::nan("")}), std::invalid_argument);
    const TorusSignal s(2, 4);
    CHECK(s.size() == 16);
    // periodic wrap on both axes
    CHECK(s.shift(3, 1, 1) == 0);
    CHECK(s.shift(12, 0, 1) == 0);
    CHECK(s.shift(0, 0, -1) == 12);
}

TEST_CASE("lq_norm examples") {
    const TorusSignal c(2, 8, -0.75);
    CHECK(lq_norm(c, 2.0) == doctest::Approx(0.75).scale(0).epsilon(1e-15));
    const TorusSignal spike(1, 4, std::vector<double>{1, 0, 0, 0});
    CHECK(lq_norm(spike, 1.0) == 0.25);
    CHECK(lq_norm(spike, std::numeric_limits<double>::infinity()) == 1.0);
    CHECK_THROWS_AS(lq_norm(spike, 0.5), std::invalid_argument);
    CHECK(lq_norm(TorusSignal(1, 8), 3.0) == 0.0);
}

TEST_CASE("lq_norm is monotone in q and matches the inner product at q = 2") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_signal(1 + trial % 3, 8, rng);
        double prev = 0.0;
        for (double q : {1.0, 1.5, 2.0, 3.0, 8.0, 40.0, std::numeric_limits<double>::infinity()}) {
            const double v = lq_norm(s, q);
            CHECK(v >= prev * (1 - 1e-14));
            prev = v;
        }
        const double l2 = lq_norm(s, 2.0);
        CHECK(std::abs(l2 * l2 - inner(s, s)) <= 1e-12 * inner(s, s));
    }
}

TEST_CASE("bv_seminorm exact oracles") {
    CHECK(bv_seminorm(TorusSignal(3, 4, 2.5)) == 0.0);

    TorusSignal block(1, 8);
    block[2] = block[3] = block[4] = 1.0;
    CHECK(bv_seminorm(block) == 2.0);

    TorusSignal square(2, 64);
    for (int r = 8; r < 24; ++r) {
        for (int c = 30; c < 46; ++c) {
            square[r * 64 + c] = 1.0;
        }
    }
    CHECK(bv_seminorm(square) == 1.0);
    // dyadic height keeps the value exact
    square *= 0.375;
    CHECK(bv_seminorm(square) == 0.375);
}

TEST_CASE("bv_seminorm properties") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> alpha(-3.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 1 + trial % 3;
        const auto u = random_signal(d, 8, rng);
        const auto v = random_signal(d, 8, rng);
        const double a = alpha(rng);
        const double aniso = bv_seminorm(u);
        const double iso = bv_seminorm(u, TvFlavor::isotropic);
        CHECK(aniso >= iso * (1 - 1e-14));
        CHECK(iso >= aniso / std::sqrt(static_cast<double>(d)) * (1 - 1e-14));
        CHECK(bv_seminorm(a * u) == doctest::Approx(std::abs(a) * aniso).scale(0).epsilon(1e-13));
        CHECK(bv_seminorm(a * u, TvFlavor::isotropic) ==
              doctest::Approx(std::abs(a) * iso).scale(0).epsilon(1e-13));
        CHECK(bv_seminorm(u + v) <= (aniso + bv_seminorm(v)) * (1 + 1e-14));
        CHECK(bv_seminorm(u + v, TvFlavor::isotropic) <=
              (iso + bv_seminorm(v, TvFlavor::isotropic)) * (1 + 1e-14));
    }
}

TEST_CASE("gradient of a constant vanishes") {
    const auto p = gradient(TorusSignal(2, 16, 3.0));
    for (double v : p.values) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("divergence is the negative adjoint of gradient") {
    std::mt19937_64 rng(3);
    for (auto [d, n] : {std::pair{1, 1024}, {2, 32}, {2, 128}, {3, 16}}) {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const auto u = random_signal(d, n, rng);
            const auto p = random_field(d, n, rng);
            const double lhs = inner(gradient(u), p);
            const double rhs = -inner(u, divergence(p));
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
        }
        CHECK(worst < 1e-12);
    }
    VectorField bad{2, 8, std::vector<double>(10)};
    CHECK_THROWS_AS(divergence(bad), std::invalid_argument);
}

TEST_CASE("divergence of gradient is the periodic finite-difference Laplacian") {
    const int n = 64;
    const int k = 5;
    TorusSignal u(1, n);
    for (int i = 0; i < n; ++i) {
        u[i] = std::cos(2 * std::numbers::pi * k * i / n);
    }
    const auto lap = divergence(gradient(u));
    const double s = std::sin(std::numbers::pi * k / n);
    const double eig = -4.0 * n * n * s * s;
    for (int i = 0; i < n; ++i) {
        CHECK(lap[i] == doctest::Approx(eig * u[i]).scale(0).epsilon(1e-10).scale(std::abs(eig)));
    }
}

TEST_CASE("signal file formats") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ftv_test_grid_io";
    fs::create_directories(dir);
    std::mt19937_64 rng(5);

    const auto s1 = random_signal(1, 16, rng);
    io::write_signal(dir / "a.csv", s1);
    const auto r1 = io::read_signal(dir / "a.csv");
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(r1[i] == s1[i]);
    }

    const auto s3 = random_signal(3, 4, rng);
    io::write_signal(dir / "b.tsig", s3);
    const auto r3 = io::read_signal(dir / "b.tsig");
    CHECK(r3.dim() == 3);
    for (std::size_t i = 0; i < s3.size(); ++i) {
        CHECK(r3[i] == s3[i]);
    }
    CHECK(fs::file_size(dir / "b.tsig") == 16 + 8 * 64);

    const auto s2 = random_signal(2, 8, rng);
    io::write_signal(dir / "c.pgm", s2);
    CHECK(fs::exists(dir / "c.pgm.json"));
    const auto r2 = io::read_signal(dir / "c.pgm");
    double spread = 0.0;
    for (double v : s2.values()) {
        spread = std::max(spread, std::abs(v));
    }
    for (std::size_t i = 0; i < s2.size(); ++i) {
        CHECK(std::abs(r2[i] - s2[i]) <= 2 * spread / 65535.0);
    }

    CHECK_THROWS_AS(io::read_signal(dir / "c.png"), std::invalid_argument);
    CHECK_THROWS(io::read_signal(dir / "missing.csv"));
    CHECK_THROWS_AS(io::write_signal(dir / "bad.csv", s2), std::invalid_argument);
    fs::remove_all(dir);
}
