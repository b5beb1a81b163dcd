#include "ftv/frame.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace ftv {

namespace {

void check_dim(int dim) {
    if (dim < 1 || dim > 3) {
        throw std::invalid_argument("dimension must be 1, 2 or 3");
    }
}

std::vector<std::array<int, 3>> positions(int dim, int per_axis) {
    std::vector<std::array<int, 3>> out;
    out.reserve(ipow(per_axis, dim));
    const std::size_t total = ipow(per_axis, dim);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::array<int, 3> k{0, 0, 0};
        std::size_t rem = flat;
        for (int a = dim - 1; a >= 0; --a) {
            k[a] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        out.push_back(k);
    }
    return out;
}

} // namespace

FrameDescriptor FrameDescriptor::wavelet(int vanishing_moments) {
    FrameDescriptor f;
    f.kind = FrameKind::wavelet;
    f.vanishing_moments = vanishing_moments;
    return f;
}

FrameDescriptor FrameDescriptor::madic(int base, CubeKernelSpec kernel) {
    FrameDescriptor f;
    f.kind = FrameKind::madic;
    f.base = base;
    f.kernel = kernel;
    return f;
}

double FrameDescriptor::growth_exponent(int dim) const {
    return kind == FrameKind::wavelet ? 1.0 : std::max(1.0, dim / 2.0);
}

double FrameDescriptor::growth_poly_degree(int dim) const {
    return kind == FrameKind::wavelet ? 1.0 : std::max(1.0, dim / 2.0) + 1.0;
}

std::string FrameDescriptor::name() const {
    if (kind == FrameKind::wavelet) {
        return "wavelet(db" + std::to_string(vanishing_moments) + ")";
    }
    return "madic(m=" + std::to_string(base) + ")";
}

bool IndexSet::same_set(const IndexSet& other) const {
    return frame == other.frame && dim == other.dim && n == other.n && levels == other.levels &&
           offset_levels == other.offset_levels && indices.size() == other.indices.size();
}

int wavelet_levels(int dim, long long n) {
    check_dim(dim);
    if (n < (1LL << dim)) {
        throw std::invalid_argument("wavelet Omega_n needs n >= 2^d");
    }
    // largest J with 2^{Jd} <= n
    int levels = 0;
    while (levels < 62 / dim && (1LL << ((levels + 1) * dim)) <= n) {
        ++levels;
    }
    return levels;
}

int madic_levels(int base, int dim, long long n) {
    check_dim(dim);
    if (base < 2) {
        throw std::invalid_argument("m-adic base must be >= 2");
    }
    const auto md = static_cast<long long>(ipow(base, dim));
    if (n < md) {
        throw std::invalid_argument("m-adic Omega_n needs n >= m^d");
    }
    // smallest J with m^{Jd} >= n
    int levels = 0;
    long long reach = 1;
    while (reach < n) {
        reach *= md;
        ++levels;
    }
    return levels;
}

int madic_offset_levels(int base, int dim, long long n) {
    const int levels = madic_levels(base, dim, n);
    // R = J max{1, d/2}, rounded up to an integer depth
    return dim <= 2 ? levels : (levels * dim + 1) / 2;
}

namespace {

int madic_grid_cap(int base, int side) {
    int cap = 0;
    long long reach = base;
    while (reach <= side) {
        reach *= base;
        ++cap;
    }
    return cap;
}

} // namespace

std::size_t omega_cardinality(const FrameDescriptor& frame, int dim, long long n, int grid_side) {
    if (frame.kind == FrameKind::wavelet) {
        return ipow(2, wavelet_levels(dim, n) * dim);
    }
    const int levels = madic_levels(frame.base, dim, n);
    int r = madic_offset_levels(frame.base, dim, n);
    if (grid_side > 0) {
        r = std::min(r, madic_grid_cap(frame.base, grid_side));
    }
    return static_cast<std::size_t>(levels) * ipow(frame.base, dim * r);
}

IndexSet omega_n(const FrameDescriptor& frame, int dim, long long n, int grid_side) {
    IndexSet set;
    set.frame = frame;
    set.dim = dim;
    set.n = n;
    if (frame.kind == FrameKind::wavelet) {
        if (frame.vanishing_moments <= std::max(1.0, dim / 2.0) &&
            !(frame.vanishing_moments == 1 && dim == 1)) {
            throw std::invalid_argument("wavelet frame needs S > max{1, d/2} vanishing moments (Haar only in 1D)");
        }
        daubechies_filter(frame.vanishing_moments);
        set.levels = wavelet_levels(dim, n);
        const int all_types = 1 << dim;
        set.indices.reserve(ipow(2, set.levels * dim));
        for (int j = 0; j < set.levels; ++j) {
            for (const auto& k : positions(dim, 1 << j)) {
                for (int e = (j == 0 ? 0 : 1); e < all_types; ++e) {
                    set.indices.push_back(FrameIndex{j, k, e});
                }
            }
        }
        return set;
    }
    if (!is_power_of_two(frame.base)) {
        throw std::invalid_argument("m-adic base must be a power of two so offsets land on the grid");
    }
    set.levels = madic_levels(frame.base, dim, n);
    set.nominal_offset_levels = madic_offset_levels(frame.base, dim, n);
    set.offset_levels = set.nominal_offset_levels;
    if (grid_side > 0) {
        const int cap = madic_grid_cap(frame.base, grid_side);
        if (cap < set.offset_levels) {
            set.offset_levels = cap;
            set.offsets_capped = true;
        }
    }
    const auto offsets = positions(dim, static_cast<int>(ipow(frame.base, set.offset_levels)));
    set.indices.reserve(offsets.size() * static_cast<std::size_t>(set.levels));
    for (int j = 0; j < set.levels; ++j) {
        for (const auto& k : offsets) {
            set.indices.push_back(FrameIndex{j, k, 0});
        }
    }
    return set;
}

double dot(const CoefficientVector& a, const CoefficientVector& b) {
    if (a.values.size() != b.values.size()) {
        throw std::invalid_argument("coefficient vectors differ in length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        acc += a.values[i] * b.values[i];
    }
    return acc;
}

double max_abs(const CoefficientVector& c) {
    double m = 0.0;
    for (double v : c.values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

Frame::Frame(std::shared_ptr<const IndexSet> index_set, int side)
    : index_set_(std::move(index_set)), dim_(index_set_->dim), side_(side) {}

CoefficientVector Frame::analyze(const TorusSignal& s) const {
    if (s.dim() != dim_ || s.side() != side_) {
        throw std::invalid_argument("signal shape does not match the frame grid");
    }
    CoefficientVector c{index_set_, std::vector<double>(size())};
    analyze_into(s.values(), c.values);
    return c;
}

TorusSignal Frame::adjoint(const CoefficientVector& c) const {
    if (!c.index_set || !c.index_set->same_set(*index_set_) || c.values.size() != size()) {
        throw std::invalid_argument("coefficient vector is not indexed by this frame's Omega_n");
    }
    TorusSignal out(dim_, side_);
    adjoint_into(c.values, out.values());
    return out;
}

double Frame::operator_norm() const {
    if (!norm_cache_) {
        norm_cache_ = compute_operator_norm();
    }
    return *norm_cache_;
}

double Frame::compute_operator_norm() const {
    // Euclidean form B = N^{d/2} A, B^T = N^{-d/2} adjoint.
    const double root = std::sqrt(static_cast<double>(grid_size()));
    auto apply = [&](std::span<const double> x, std::span<double> y) {
        analyze_into(x, y);
        for (double& v : y) {
            v *= root;
        }
    };
    auto apply_adjoint = [&](std::span<const double> y, std::span<double> x) {
        adjoint_into(y, x);
        for (double& v : x) {
            v /= root;
        }
    };
    return power_iteration_norm(apply, apply_adjoint, grid_size(), size());
}

TorusSignal Frame::atom(std::size_t coefficient) const {
    std::vector<double> unit(size(), 0.0);
    unit.at(coefficient) = 1.0;
    TorusSignal out(dim_, side_);
    adjoint_into(unit, out.values());
    return out;
}

WaveletFrame::WaveletFrame(const FrameDescriptor& frame, int dim, long long n, int side)
    : Frame(std::make_shared<const IndexSet>(omega_n(frame, dim, n)), side),
      dwt_(dim, side, frame.vanishing_moments) {
    const int levels = index_set().levels;
    if ((1LL << levels) > side) {
        throw std::invalid_argument("grid side " + std::to_string(side) + " cannot resolve wavelet scale j = " +
                                    std::to_string(levels - 1) + " (needs N >= 2^" + std::to_string(levels) + ")");
    }
    slots_.reserve(size());
    for (const auto& idx : index_set().indices) {
        slots_.push_back(dwt_.flat_index(idx.scale, idx.position, idx.type));
    }
}

void WaveletFrame::analyze_into(std::span<const double> signal, std::span<double> coeffs) const {
    std::vector<double> work(signal.begin(), signal.end());
    dwt_.forward(work);
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid_size()));
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        coeffs[i] = scale * work[slots_[i]];
    }
}

void WaveletFrame::adjoint_into(std::span<const double> coeffs, std::span<double> signal) const {
    std::fill(signal.begin(), signal.end(), 0.0);
    const double scale = std::sqrt(static_cast<double>(grid_size()));
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        signal[slots_[i]] = scale * coeffs[i];
    }
    dwt_.inverse(signal);
}

std::unique_ptr<Frame> make_frame(const FrameDescriptor& frame, int dim, long long n, int side) {
    if (frame.kind == FrameKind::wavelet) {
        return std::make_unique<WaveletFrame>(frame, dim, n, side);
    }
    return std::make_unique<MadicFrame>(frame, dim, n, side);
}

double power_iteration_norm(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                            const std::function<void(std::span<const double>, std::span<double>)>& apply_adjoint,
                            std::size_t domain_size, std::size_t range_size, std::uint64_t seed, int min_iters,
                            int max_iters) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> x(domain_size);
    std::vector<double> y(range_size);
    for (double& v : x) {
        v = normal(rng);
    }
    auto normalize = [](std::vector<double>& v) {
        double sq = 0.0;
        for (double e : v) {
            sq += e * e;
        }
        const double nrm = std::sqrt(sq);
        if (nrm > 0.0) {
            for (double& e : v) {
                e /= nrm;
            }
        }
        return nrm;
    };
    normalize(x);
    double estimate = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        apply(x, y);
        double sq = 0.0;
        for (double e : y) {
            sq += e * e;
        }
        const double next = std::sqrt(sq);
        apply_adjoint(y, x);
        if (normalize(x) == 0.0) {
            return 0.0;
        }
        const bool settled = std::abs(next - estimate) <= 1e-14 * next;
        estimate = next;
        if (it + 1 >= min_iters && settled) {
            break;
        }
    }
    return estimate;
}

double besov_norm_neg_half_d(const TorusSignal& s, int max_scale, int vanishing_moments) {
    if (max_scale < 0 || (1LL << max_scale) > s.side()) {
        throw std::invalid_argument("grid side " + std::to_string(s.side()) + " cannot resolve wavelet scale " +
                                    std::to_string(max_scale - 1));
    }
    PeriodicDwt dwt(s.dim(), s.side(), vanishing_moments);
    std::vector<double> work(s.values().begin(), s.values().end());
    dwt.forward(work);
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.size()));
    const int width = 1 << max_scale;
    double best = std::abs(work[0]) * scale;
    for (std::size_t i = 0; i < work.size(); ++i) {
        std::size_t rem = i;
        bool inside = true;
        for (int a = 0; a < s.dim(); ++a) {
            if (static_cast<int>(rem % s.side()) >= width) {
                inside = false;
            }
            rem /= s.side();
        }
        if (inside) {
            best = std::max(best, std::abs(work[i]) * scale);
        }
    }
    return best;
}

double local_means_sup(const TorusSignal& s, const FrameDescriptor& madic, long long n) {
    if (madic.kind != FrameKind::madic) {
        throw std::invalid_argument("local means need an m-adic frame descriptor");
    }
    const MadicFrame frame(madic, s.dim(), n, s.side());
    return max_abs(frame.analyze(s));
}

} // namespace ftv
