#include "ftv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ftv {

namespace {

void check_shape(int dim, int side) {
    if (dim < 1 || dim > 3) {
        throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    }
    if (side < 1 || !is_power_of_two(side)) {
        throw std::invalid_argument("grid side must be a power of two, got " + std::to_string(side));
    }
}

void require_same_shape(const TorusSignal& a, const TorusSignal& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("signal shape mismatch");
    }
}

} // namespace

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(long long v) {
    if (!is_power_of_two(v)) {
        throw std::invalid_argument("not a power of two: " + std::to_string(v));
    }
    int l = 0;
    while ((1LL << l) < v) {
        ++l;
    }
    return l;
}

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

TorusSignal::TorusSignal(int dim, int side) : TorusSignal(dim, side, 0.0) {}

TorusSignal::TorusSignal(int dim, int side, double fill) : dim_(dim), side_(side) {
    check_shape(dim, side);
    values_.assign(ipow(static_cast<std::size_t>(side), dim), fill);
}

TorusSignal::TorusSignal(int dim, int side, std::vector<double> values)
    : dim_(dim), side_(side), values_(std::move(values)) {
    check_shape(dim, side);
    if (values_.size() != ipow(static_cast<std::size_t>(side), dim)) {
        throw std::invalid_argument("signal needs " + std::to_string(ipow(side, dim)) +
                                    " values, got " + std::to_string(values_.size()));
    }
    if (!all_finite()) {
        throw std::invalid_argument("signal values must be finite");
    }
}

std::size_t TorusSignal::stride(int axis) const {
    return ipow(static_cast<std::size_t>(side_), dim_ - 1 - axis);
}

std::size_t TorusSignal::shift(std::size_t i, int axis, int offset) const {
    const std::size_t st = stride(axis);
    const std::size_t n = static_cast<std::size_t>(side_);
    const std::size_t coord = (i / st) % n;
    const std::size_t moved = static_cast<std::size_t>(static_cast<long long>(coord + n) + offset) % n;
    return i - coord * st + moved * st;
}

bool TorusSignal::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

TorusSignal& TorusSignal::operator+=(const TorusSignal& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += o.values_[i];
    }
    return *this;
}

TorusSignal& TorusSignal::operator-=(const TorusSignal& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= o.values_[i];
    }
    return *this;
}

TorusSignal& TorusSignal::operator*=(double a) {
    for (double& v : values_) {
        v *= a;
    }
    return *this;
}

TorusSignal operator+(TorusSignal a, const TorusSignal& b) { return a += b; }
TorusSignal operator-(TorusSignal a, const TorusSignal& b) { return a -= b; }
TorusSignal operator*(double a, TorusSignal s) { return s *= a; }

std::span<const double> VectorField::component(int axis) const {
    const std::size_t n = values.size() / static_cast<std::size_t>(dim);
    return std::span<const double>(values).subspan(axis * n, n);
}

std::span<double> VectorField::component(int axis) {
    const std::size_t n = values.size() / static_cast<std::size_t>(dim);
    return std::span<double>(values).subspan(axis * n, n);
}

double lq_norm(const TorusSignal& s, double q) {
    if (!(q >= 1.0)) {
        throw std::invalid_argument("lq_norm requires q >= 1");
    }
    if (std::isinf(q)) {
        return sup_norm(s);
    }
    // Scale by the sup norm first so large q cannot overflow.
    const double top = sup_norm(s);
    if (top == 0.0) {
        return 0.0;
    }
    double acc = 0.0;
    for (double v : s.values()) {
        acc += std::pow(std::abs(v) / top, q);
    }
    return top * std::pow(acc / static_cast<double>(s.size()), 1.0 / q);
}

double inner(const TorusSignal& u, const TorusSignal& v) {
    require_same_shape(u, v);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += u[i] * v[i];
    }
    return acc / static_cast<double>(u.size());
}

double inner(const VectorField& p, const VectorField& r) {
    if (p.dim != r.dim || p.side != r.side || p.values.size() != r.values.size()) {
        throw std::invalid_argument("vector field shape mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        acc += p.values[i] * r.values[i];
    }
    return acc / static_cast<double>(p.values.size() / static_cast<std::size_t>(p.dim));
}

double sup_norm(const TorusSignal& s) {
    double m = 0.0;
    for (double v : s.values()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double mean(const TorusSignal& s) {
    double acc = 0.0;
    for (double v : s.values()) {
        acc += v;
    }
    return acc / static_cast<double>(s.size());
}

double bv_seminorm(const TorusSignal& s, TvFlavor flavor) {
    const int d = s.dim();
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (flavor == TvFlavor::anisotropic) {
            for (int a = 0; a < d; ++a) {
                acc += std::abs(s[s.shift(i, a, 1)] - s[i]);
            }
        } else {
            double sq = 0.0;
            for (int a = 0; a < d; ++a) {
                const double diff = s[s.shift(i, a, 1)] - s[i];
                sq += diff * diff;
            }
            acc += std::sqrt(sq);
        }
    }
    // h^{d-1} with h = 1/N
    return acc / std::pow(static_cast<double>(s.side()), d - 1);
}

VectorField gradient(const TorusSignal& s) {
    VectorField p{s.dim(), s.side(), std::vector<double>(s.size() * s.dim())};
    const double scale = static_cast<double>(s.side());
    for (int a = 0; a < s.dim(); ++a) {
        auto out = p.component(a);
        for (std::size_t i = 0; i < s.size(); ++i) {
            out[i] = scale * (s[s.shift(i, a, 1)] - s[i]);
        }
    }
    return p;
}

TorusSignal divergence(const VectorField& p) {
    TorusSignal out(p.dim, p.side);
    if (p.values.size() != out.size() * static_cast<std::size_t>(p.dim)) {
        throw std::invalid_argument("vector field has wrong length");
    }
    const double scale = static_cast<double>(p.side);
    for (int a = 0; a < p.dim; ++a) {
        auto comp = p.component(a);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += scale * (comp[i] - comp[out.shift(i, a, -1)]);
        }
    }
    return out;
}

double gradient_norm_bound(int dim, int side) {
    // Exact for even N: the alternating mode attains 2 per axis.
    return 2.0 * static_cast<double>(side) * std::sqrt(static_cast<double>(dim));
}

} // namespace ftv
