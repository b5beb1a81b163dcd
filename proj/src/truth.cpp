#include "ftv/truth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "ftv/noise.hpp"

namespace ftv {

namespace {

using nlohmann::json;

class Params {
public:
    Params(const std::string& name, const json& p, std::set<std::string> allowed) : name_(name), p_(p) {
        if (!p_.is_object()) {
            throw std::invalid_argument("truth '" + name + "': parameters must be a JSON object");
        }
        for (const auto& [key, value] : p_.items()) {
            if (!allowed.count(key)) {
                throw std::invalid_argument("truth '" + name + "': unknown parameter '" + key + "'");
            }
        }
    }

    double real(const std::string& key, double fallback) const {
        if (!p_.contains(key)) {
            return fallback;
        }
        if (!p_.at(key).is_number()) {
            throw std::invalid_argument("truth '" + name_ + "': parameter '" + key + "' must be a number");
        }
        return p_.at(key).get<double>();
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
        if (!p_.contains(key)) {
            return fallback;
        }
        const auto& v = p_.at(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
            throw std::invalid_argument("truth '" + name_ + "': parameter '" + key + "' must be a non-negative integer");
        }
        return p_.at(key).get<std::uint64_t>();
    }

private:
    std::string name_;
    const json& p_;
};

void require_dim(const std::string& name, int dim, int want) {
    if (dim != want) {
        throw std::invalid_argument("truth '" + name + "' needs d = " + std::to_string(want) + ", got d = " +
                                    std::to_string(dim));
    }
}

// Piecewise function of x = i / N.
TorusSignal sample_1d(int side, const std::function<double(double)>& f) {
    TorusSignal s(1, side);
    for (int i = 0; i < side; ++i) {
        s[i] = f(static_cast<double>(i) / side);
    }
    return s;
}

// Radial profile falls linearly from h to 0 across `edge` cells centred on
// the circle; edge = 0 samples the sharp indicator at cell centres.
void add_disc(TorusSignal& s, double cx, double cy, double r, double h, double edge) {
    const int n = s.side();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = (i + 0.5) / n - cx;
            const double y = (j + 0.5) / n - cy;
            const double rho = std::sqrt(x * x + y * y);
            const double level = edge > 0.0 ? std::clamp((r - rho) * n / edge + 0.5, 0.0, 1.0) : (rho <= r ? 1.0 : 0.0);
            s[static_cast<std::size_t>(i) * n + j] += h * level;
        }
    }
}

// Cells with lo <= i/N < hi per axis.
void add_rect(TorusSignal& s, double lo0, double hi0, double lo1, double hi1, double h) {
    const int n = s.side();
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        if (x < lo0 || x >= hi0) {
            continue;
        }
        for (int j = 0; j < n; ++j) {
            const double y = static_cast<double>(j) / n;
            if (y >= lo1 && y < hi1) {
                s[static_cast<std::size_t>(i) * n + j] += h;
            }
        }
    }
}

struct Generated {
    TorusSignal signal;
    double bound;
};

Generated generate(const std::string& name, int dim, int side, const json& p) {
    const double cell = 1.0 / side;
    if (name == "constant") {
        Params a(name, p, {"c"});
        const double c = a.real("c", 0.5);
        return {TorusSignal(dim, side, c), std::abs(c)};
    }
    if (name == "step1d") {
        require_dim(name, dim, 1);
        Params a(name, p, {"height", "lo", "hi"});
        const double h = a.real("height", 1.0);
        const double lo = a.real("lo", 0.25);
        const double hi = a.real("hi", 0.75);
        return {sample_1d(side, [=](double x) { return (x >= lo && x < hi) ? h : 0.0; }), 2.0 * std::abs(h)};
    }
    if (name == "ramp1d") {
        require_dim(name, dim, 1);
        Params a(name, p, {"slope"});
        const double m = a.real("slope", 1.0);
        return {sample_1d(side, [=](double x) { return m * x; }), 2.0 * std::abs(m)};
    }
    if (name == "step_ramp1d") {
        require_dim(name, dim, 1);
        Params a(name, p, {"height"});
        const double h = a.real("height", 1.0);
        auto f = [=](double x) {
            if (x >= 0.125 && x < 0.375) {
                return h;
            }
            if (x >= 0.5 && x < 0.875) {
                return h * (x - 0.5) / 0.375;
            }
            return 0.0;
        };
        return {sample_1d(side, f), 4.0 * std::abs(h)};
    }
    if (name == "blocks1d") {
        require_dim(name, dim, 1);
        Params a(name, p, {"scale"});
        const double scale = a.real("scale", 0.2);
        static const double t[] = {0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
        static const double h[] = {4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
        double total = 0.0;
        for (double v : h) {
            total += std::abs(v);
        }
        auto f = [=](double x) {
            double acc = 0.0;
            for (int k = 0; k < 11; ++k) {
                acc += x >= t[k] ? h[k] : 0.0;
            }
            return scale * acc;
        };
        return {sample_1d(side, f), total * std::abs(scale)};
    }
    if (name == "disc2d") {
        require_dim(name, dim, 2);
        Params a(name, p, {"radius", "height", "cx", "cy", "edge"});
        const double r = a.real("radius", 0.25);
        const double h = a.real("height", 1.0);
        const double edge = a.real("edge", 2.0);
        TorusSignal s(2, side);
        add_disc(s, a.real("cx", 0.5), a.real("cy", 0.5), r, h, edge);
        return {std::move(s), std::abs(h) * std::max(1.0, 8.0 * r + 8.0 * cell)};
    }
    if (name == "square2d") {
        require_dim(name, dim, 2);
        Params a(name, p, {"lo", "hi", "height"});
        const double lo = a.real("lo", 0.25);
        const double hi = a.real("hi", 0.75);
        const double h = a.real("height", 1.0);
        TorusSignal s(2, side);
        add_rect(s, lo, hi, lo, hi, h);
        return {std::move(s), std::abs(h) * std::max(1.0, 4.0 * (hi - lo + cell))};
    }
    if (name == "cartoon2d") {
        require_dim(name, dim, 2);
        Params a(name, p, {"height", "edge"});
        const double h = a.real("height", 1.0);
        TorusSignal s(2, side);
        add_disc(s, 0.35, 0.35, 0.2, h, a.real("edge", 2.0));
        add_rect(s, 0.55, 0.9, 0.55, 0.9, 0.5 * h);
        const double bv = std::abs(h) * (8.0 * 0.2 + 8.0 * cell) + 0.5 * std::abs(h) * 4.0 * (0.35 + cell);
        return {std::move(s), std::max(std::abs(h), bv)};
    }
    if (name == "random_cartoon2d") {
        require_dim(name, dim, 2);
        Params a(name, p, {"seed", "shapes"});
        const std::uint64_t seed = a.integer("seed", 0);
        const std::uint64_t shapes = a.integer("shapes", 4);
        TorusSignal s(2, side);
        double sup_bound = 0.0;
        double bv_bound = 0.0;
        std::uint64_t counter = 0;
        auto u = [&]() { return counter_uniform(seed, 0xca7700ULL, counter++); };
        for (std::uint64_t k = 0; k < shapes; ++k) {
            const double h = u() - 0.5;
            const double w0 = 0.05 + 0.25 * u();
            const double w1 = 0.05 + 0.25 * u();
            const double lo0 = 0.7 * u();
            const double lo1 = 0.7 * u();
            add_rect(s, lo0, lo0 + w0, lo1, lo1 + w1, h);
            sup_bound += std::abs(h);
            bv_bound += 2.0 * std::abs(h) * (w0 + w1 + 2.0 * cell);
        }
        return {std::move(s), std::max(sup_bound, bv_bound)};
    }
    throw std::invalid_argument("unknown truth '" + name + "'");
}

} // namespace

std::vector<std::string> truth_names() {
    return {"constant", "step1d", "ramp1d", "step_ramp1d", "blocks1d",
            "disc2d", "square2d", "cartoon2d", "random_cartoon2d"};
}

Truth truth_library(const std::string& name, int dim, int side, const nlohmann::json& params) {
    auto [signal, bound] = generate(name, dim, side, params);
    Truth t;
    t.name = name;
    t.sup = sup_norm(signal);
    t.bv = bv_seminorm(signal);
    t.bound = bound;
    const double slack = 1e-12 * std::max(1.0, bound);
    if (t.sup > bound + slack || t.bv > bound + slack) {
        throw std::logic_error("truth '" + name + "' failed its BV_L certificate: sup " + std::to_string(t.sup) +
                               ", bv " + std::to_string(t.bv) + ", L " + std::to_string(bound));
    }
    t.signal = std::move(signal);
    return t;
}

} // namespace ftv
