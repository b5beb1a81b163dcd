#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ftv/analysis.hpp"
#include "ftv/noise.hpp"
#include "ftv/truth.hpp"
#include "ftv/wavelet.hpp"

namespace ftv {

namespace {

int full_depth(const TorusSignal& s) {
    if (!is_power_of_two(s.side())) {
        throw std::invalid_argument("diagnostics need a power-of-two grid side");
    }
    return log2_exact(s.side());
}

/// Grid-normalized (unit grid L2) wavelet atom at position 0.
TorusSignal base_atom(int dim, int side, int scale, int type, int vanishing_moments) {
    const PeriodicDwt dwt(dim, side, vanishing_moments);
    TorusSignal a(dim, side);
    auto v = a.values();
    v[dwt.flat_index(scale, {0, 0, 0}, type)] = 1.0;
    dwt.inverse(v);
    a *= std::sqrt(static_cast<double>(a.size()));
    return a;
}

/// Cell index of i shifted by `cells` along every axis listed in `shift`.
std::size_t shifted_cell(std::size_t i, int dim, int side, const std::array<int, 3>& shift) {
    std::size_t out = 0;
    std::size_t stride = 1;
    for (int a = dim - 1; a >= 0; --a) {
        const auto c = static_cast<int>((i / stride) % side);
        out += static_cast<std::size_t>((c + shift[a]) % side) * stride;
        stride *= side;
    }
    return out;
}

} // namespace

InterpolationReport check_interpolation(const TorusSignal& s, double q, long long n, int vanishing_moments) {
    const int d = s.dim();
    const int depth = full_depth(s);
    InterpolationReport r;
    r.dim = d;
    r.q = q;
    r.n = n > 0 ? n : static_cast<long long>(s.size());
    r.sup = sup_norm(s);
    if (!(r.sup > 0.0)) {
        throw std::invalid_argument("check_interpolation: zero signal");
    }
    if (!(q >= 1.0)) {
        throw std::invalid_argument("check_interpolation: q must be >= 1");
    }
    if (d >= 2 && q > (d + 2.0) / d) {
        throw std::invalid_argument("check_interpolation: q must be <= (d+2)/d for d >= 2");
    }
    if (d == 1 && q > 3.0) {
        throw std::invalid_argument("check_interpolation: q must be <= 3 for d = 1");
    }
    if (d == 1 && r.n < 2) {
        throw std::invalid_argument("check_interpolation: the d = 1 form needs n >= 2");
    }
    r.lq = lq_norm(s, q);
    r.besov = besov_norm_neg_half_d(s, depth, vanishing_moments);
    r.bv_norm = lq_norm(s, 1.0) + bv_seminorm(s);
    if (d >= 2) {
        r.denominator = std::pow(r.besov, 2.0 / (d + 2.0)) * std::pow(r.bv_norm, d / (d + 2.0));
    } else {
        const double bv_third = std::cbrt(r.bv_norm);
        r.log_term = std::log(static_cast<double>(r.n)) * std::pow(r.besov, 2.0 / 3.0) * bv_third;
        r.tail_term = std::pow(r.sup, 2.0 / 3.0) * bv_third / static_cast<double>(r.n);
        r.denominator = r.log_term + r.tail_term;
    }
    r.ratio = r.lq / r.denominator;
    return r;
}

double wavelet_l1_constant(int dim, int side, int vanishing_moments) {
    if (!is_power_of_two(side) || side < 2) {
        throw std::invalid_argument("wavelet_l1_constant: side must be a power of two >= 2");
    }
    const int levels = log2_exact(side);
    double best = 0.0;
    for (int j = 0; j < levels; ++j) {
        for (int e = 1; e < (1 << dim); ++e) {
            const TorusSignal a = base_atom(dim, side, j, e, vanishing_moments);
            best = std::max(best, std::pow(2.0, j * dim / 2.0) * lq_norm(a, 1.0));
        }
    }
    return best;
}

JacksonReport check_jackson(const TorusSignal& s, long long n, int vanishing_moments) {
    const int depth = full_depth(s);
    if (n < 1 || n > static_cast<long long>(s.size())) {
        throw std::invalid_argument("check_jackson: n must lie in 1..N^d");
    }
    JacksonReport r;
    r.n = n;
    const int levels = wavelet_levels(s.dim(), n);
    r.besov_all = besov_norm_neg_half_d(s, depth, vanishing_moments);
    r.omega_max = besov_norm_neg_half_d(s, levels, vanishing_moments);
    r.sup = sup_norm(s);
    r.psi_l1 = wavelet_l1_constant(s.dim(), s.side(), vanishing_moments);
    r.constant = std::pow(2.0, s.dim() / 2.0) * r.psi_l1;
    r.rhs = r.omega_max + r.constant * r.sup / std::sqrt(static_cast<double>(n));
    r.holds = r.besov_all <= r.rhs * (1.0 + 1e-12);
    return r;
}

ParsevalReport check_parseval(const TorusSignal& s, int vanishing_moments) {
    full_depth(s);
    const PeriodicDwt dwt(s.dim(), s.side(), vanishing_moments);
    std::vector<double> c(s.values().begin(), s.values().end());
    dwt.forward(c);
    ParsevalReport r;
    for (double v : c) {
        r.coefficient_energy += v * v;
    }
    r.coefficient_energy /= static_cast<double>(s.size());
    r.energy = std::pow(lq_norm(s, 2.0), 2);
    r.relative_error = r.energy > 0.0 ? std::abs(r.coefficient_energy - r.energy) / r.energy : r.coefficient_energy;
    r.holds = r.relative_error <= 1e-10;
    return r;
}

LocalMeansReport check_local_means(const TorusSignal& s, const FrameDescriptor& madic, long long n) {
    LocalMeansReport r;
    r.n = n;
    r.local_means = local_means_sup(s, madic, n);
    r.l2 = lq_norm(s, 2.0);
    r.besov = besov_norm_neg_half_d(s, full_depth(s));
    r.ratio_to_besov = r.besov > 0.0 ? r.local_means / r.besov : 0.0;
    r.holds = r.local_means <= r.l2 * (1.0 + 1e-12);  // Cauchy-Schwarz, unit-norm kernels
    return r;
}

TorusSignal random_bv_signal(int dim, int side, std::uint64_t seed) {
    if (dim == 2) {
        return truth_library("random_cartoon2d", 2, side, {{"seed", seed}}).signal;
    }
    if (dim != 1) {
        throw std::invalid_argument("random_bv_signal: d must be 1 or 2");
    }
    std::uint64_t counter = 0;
    auto u = [&]() { return counter_uniform(seed, 0xb7b7ULL, counter++); };
    const int jumps = 2 + static_cast<int>(6.0 * u());
    TorusSignal s(1, side);
    for (int k = 0; k < jumps; ++k) {
        const double at = u();
        const double h = u() - 0.5;
        for (int i = 0; i < side; ++i) {
            if (static_cast<double>(i) / side >= at) {
                s[i] += h;
            }
        }
    }
    return s;
}

TorusSignal random_bounded_signal(int dim, int side, std::uint64_t seed) {
    TorusSignal s(dim, side);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = 2.0 * counter_uniform(seed, 0xb0b0ULL, i) - 1.0;
    }
    return s;
}

CorpusConstant interpolation_corpus(int dim, int side, double q, int count, std::uint64_t seed) {
    if (count < 1) {
        throw std::invalid_argument("interpolation_corpus: count must be >= 1");
    }
    CorpusConstant c;
    c.dim = dim;
    c.q = q;
    c.side = side;
    c.count = count;
    c.seed = seed;
    c.min_ratio = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
        const TorusSignal s = random_bv_signal(dim, side, counter_hash(seed, static_cast<std::uint64_t>(k), 0));
        if (!(sup_norm(s) > 0.0)) {
            continue;
        }
        const double r = check_interpolation(s, q).ratio;
        c.max_ratio = std::max(c.max_ratio, r);
        c.min_ratio = std::min(c.min_ratio, r);
    }
    return c;
}

std::size_t assouad_support_size(int dim, int scale) {
    if (dim < 1 || scale < 0 || scale * (dim - 1) > 62) {
        throw std::invalid_argument("assouad_support_size: invalid scale");
    }
    return std::size_t{1} << (scale * (dim - 1));
}

namespace {

struct AtomGeometry {
    TorusSignal atom;
    std::vector<std::size_t> support;
    double sup = 0.0;
    double bv = 0.0;
};

AtomGeometry atom_geometry(int dim, int side, int scale, int vanishing_moments) {
    if (scale < 0 || !is_power_of_two(side) || (1 << scale) >= side) {
        throw std::invalid_argument("assouad: scale " + std::to_string(scale) + " is not resolvable on a grid of side " +
                                    std::to_string(side));
    }
    AtomGeometry g;
    g.atom = base_atom(dim, side, scale, (1 << dim) - 1, vanishing_moments);
    for (std::size_t i = 0; i < g.atom.size(); ++i) {
        if (g.atom[i] != 0.0) {
            g.support.push_back(i);
        }
    }
    g.sup = sup_norm(g.atom);
    g.bv = bv_seminorm(g.atom);
    return g;
}

double amplitude_cap(int dim, int scale, std::size_t count, const AtomGeometry& g, double bound) {
    const double delta = dim - 1.0;
    const double bv_rate = 0.5 * bound * std::pow(2.0, -scale * (1.0 - dim / 2.0 + delta));
    const double sup_cap = 0.5 * bound / g.sup;
    const double bv_cert = 0.5 * bound / (static_cast<double>(count) * g.bv);
    return std::min({bv_rate, sup_cap, bv_cert});
}

} // namespace

double assouad_max_amplitude(int dim, int side, int scale, const AssouadOptions& opt) {
    const AtomGeometry g = atom_geometry(dim, side, scale, opt.vanishing_moments);
    return amplitude_cap(dim, scale, assouad_support_size(dim, scale), g, opt.bound);
}

AssouadFamily assouad_family(int scale, double amplitude, const TorusSignal& g0, int count, const AssouadOptions& opt) {
    const int dim = g0.dim();
    const int side = g0.side();
    const double L = opt.bound;
    const double slack = 1e-12 * std::max(1.0, L);
    if (!(L > 0.0)) {
        throw std::invalid_argument("assouad: L must be positive");
    }
    if (sup_norm(g0) > 0.5 * L + slack || bv_seminorm(g0) > 0.5 * L + slack) {
        throw std::invalid_argument("assouad: g0 must lie in BV_{L/2}");
    }
    const AtomGeometry g = atom_geometry(dim, side, scale, opt.vanishing_moments);
    const std::size_t want = assouad_support_size(dim, scale);

    AssouadFamily fam;
    fam.scale = scale;
    fam.amplitude = amplitude;
    fam.psi_sup = g.sup;
    fam.psi_bv = g.bv;
    fam.amplitude_cap = amplitude_cap(dim, scale, want, g, L);
    if (!(amplitude > 0.0) || amplitude > fam.amplitude_cap * (1.0 + 1e-12)) {
        throw std::invalid_argument("assouad: amplitude " + std::to_string(amplitude) + " violates the BV_L cap " +
                                    std::to_string(fam.amplitude_cap));
    }
    if (count < 1 || (want < 63 && static_cast<unsigned long long>(count) > (1ULL << want))) {
        throw std::invalid_argument("assouad: count must lie in 1..2^#R_j");
    }

    // greedy packing of shifted atoms with disjoint supports
    const int step = side >> scale;
    std::vector<char> used(g0.size(), 0);
    std::vector<std::array<int, 3>> shifts;
    const std::size_t positions = ipow(std::size_t{1} << scale, dim);
    for (std::size_t p = 0; p < positions && fam.support.size() < want; ++p) {
        std::array<int, 3> k{0, 0, 0};
        std::size_t rem = p;
        for (int a = dim - 1; a >= 0; --a) {
            k[a] = static_cast<int>(rem % (std::size_t{1} << scale));
            rem >>= scale;
        }
        const std::array<int, 3> shift{k[0] * step, k[1] * step, k[2] * step};
        const bool clash = std::any_of(g.support.begin(), g.support.end(),
                                       [&](std::size_t i) { return used[shifted_cell(i, dim, side, shift)] != 0; });
        if (clash) {
            continue;
        }
        for (std::size_t i : g.support) {
            used[shifted_cell(i, dim, side, shift)] = 1;
        }
        fam.support.push_back(FrameIndex{scale, k, (1 << dim) - 1});
        shifts.push_back(shift);
    }
    if (fam.support.size() < want) {
        throw std::invalid_argument("assouad: scale " + std::to_string(scale) + " cannot host " + std::to_string(want) +
                                    " disjoint atoms");
    }

    for (int p = 0; p < count; ++p) {
        std::vector<int> eps(want, 1);
        TorusSignal s = g0;
        for (std::size_t c = 0; c < want; ++c) {
            if (c < 63 && ((static_cast<unsigned long long>(p) >> c) & 1ULL)) {
                eps[c] = -1;
            }
            for (std::size_t i : g.support) {
                s[shifted_cell(i, dim, side, shifts[c])] += amplitude * eps[c] * g.atom[i];
            }
        }
        if (sup_norm(s) > L + slack || bv_seminorm(s) > L + slack) {
            throw std::logic_error("assouad: emitted signal failed the BV_L certificate");
        }
        fam.patterns.push_back(std::move(eps));
        fam.signals.push_back(std::move(s));
    }
    fam.delta = amplitude * lq_norm(g.atom, opt.q);
    return fam;
}

} // namespace ftv
