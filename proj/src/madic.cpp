#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ftv/frame.hpp"

namespace ftv {

namespace {

// CDF of the normalized bump exp(-1/(1-v^2)) on [-1, 1].
class BumpCdf {
public:
    BumpCdf() { total_ = integrate(1.0); }

    double operator()(double u) const {
        if (u <= -1.0) {
            return 0.0;
        }
        if (u >= 1.0) {
            return 1.0;
        }
        return integrate(u) / total_;
    }

private:
    static double integrate(double upper) {
        auto bump = [](double v) {
            const double w = 1.0 - v * v;
            return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
        };
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump, -1.0, upper, 8, 1e-15);
    }

    double total_ = 1.0;
};

std::vector<double> sample_profile(const CubeKernelSpec& spec, int cells, const BumpCdf& cdf) {
    std::vector<double> profile(static_cast<std::size_t>(cells));
    double sq = 0.0;
    for (int t = 0; t < cells; ++t) {
        const double z = static_cast<double>(t) / cells;
        const double v = cdf((z - spec.plateau_lo) / spec.mollifier_radius) -
                         cdf((z - spec.plateau_hi) / spec.mollifier_radius);
        profile[t] = v;
        sq += v * v;
    }
    if (sq <= 0.0) {
        throw std::invalid_argument("m-adic kernel vanishes on a " + std::to_string(cells) + "-cell cube");
    }
    const double scale = 1.0 / std::sqrt(sq / cells);
    for (double& v : profile) {
        v *= scale;
    }
    return profile;
}

// Row-major array with per-axis extents; one axis is contracted at a time.
struct Extents {
    std::array<std::size_t, 3> len{1, 1, 1};
    int dim = 1;

    std::size_t total() const {
        std::size_t t = 1;
        for (int a = 0; a < dim; ++a) {
            t *= len[a];
        }
        return t;
    }
    std::size_t outer(int axis) const {
        std::size_t t = 1;
        for (int a = 0; a < axis; ++a) {
            t *= len[a];
        }
        return t;
    }
    std::size_t inner(int axis) const {
        std::size_t t = 1;
        for (int a = axis + 1; a < dim; ++a) {
            t *= len[a];
        }
        return t;
    }
};

// out[.., o, ..] = sum_t k[t] in[.., (o*stride + t) mod N, ..]
void correlate_axis(const std::vector<double>& in, Extents& shape, int axis, std::span<const double> kernel,
                    int count, int stride, int side, std::vector<double>& out) {
    const std::size_t outer = shape.outer(axis);
    const std::size_t inner = shape.inner(axis);
    const std::size_t len = shape.len[axis];
    out.assign(outer * static_cast<std::size_t>(count) * inner, 0.0);
    const int width = static_cast<int>(kernel.size());
    for (std::size_t o = 0; o < outer; ++o) {
        for (int p = 0; p < count; ++p) {
            double* dst = &out[(o * count + p) * inner];
            for (int t = 0; t < width; ++t) {
                const double w = kernel[t];
                if (w == 0.0) {
                    continue;
                }
                const std::size_t x = static_cast<std::size_t>((p * stride + t) % side);
                const double* src = &in[(o * len + x) * inner];
                for (std::size_t i = 0; i < inner; ++i) {
                    dst[i] += w * src[i];
                }
            }
        }
    }
    shape.len[axis] = static_cast<std::size_t>(count);
}

// Transpose of correlate_axis: scatter back onto the full axis.
void spread_axis(const std::vector<double>& in, Extents& shape, int axis, std::span<const double> kernel,
                 int count, int stride, int side, std::vector<double>& out) {
    const std::size_t outer = shape.outer(axis);
    const std::size_t inner = shape.inner(axis);
    out.assign(outer * static_cast<std::size_t>(side) * inner, 0.0);
    const int width = static_cast<int>(kernel.size());
    for (std::size_t o = 0; o < outer; ++o) {
        for (int p = 0; p < count; ++p) {
            const double* src = &in[(o * count + p) * inner];
            for (int t = 0; t < width; ++t) {
                const double w = kernel[t];
                if (w == 0.0) {
                    continue;
                }
                const std::size_t x = static_cast<std::size_t>((p * stride + t) % side);
                double* dst = &out[(o * side + x) * inner];
                for (std::size_t i = 0; i < inner; ++i) {
                    dst[i] += w * src[i];
                }
            }
        }
    }
    shape.len[axis] = static_cast<std::size_t>(side);
}

} // namespace

MadicFrame::MadicFrame(const FrameDescriptor& frame, int dim, long long n, int side)
    : Frame(std::make_shared<const IndexSet>(omega_n(frame, dim, n, side)), side) {
    const auto& set = index_set();
    const auto& spec = frame.kernel;
    if (!(spec.mollifier_radius > 0.0) || spec.plateau_lo - spec.mollifier_radius < 0.0 ||
        spec.plateau_hi + spec.mollifier_radius >= 1.0 || spec.plateau_lo >= spec.plateau_hi) {
        throw std::invalid_argument("m-adic kernel support must lie inside [0,1)");
    }
    if (static_cast<long long>(ipow(frame.base, set.levels)) > side) {
        throw std::invalid_argument("grid side " + std::to_string(side) + " cannot resolve m-adic scale j = " +
                                    std::to_string(set.levels - 1) + " (needs N >= m^" +
                                    std::to_string(set.levels) + ")");
    }
    offsets_per_axis_ = static_cast<int>(ipow(frame.base, set.offset_levels));
    offset_stride_ = side / offsets_per_axis_;
    const BumpCdf cdf;
    for (int j = 0; j < set.levels; ++j) {
        profiles_.push_back(sample_profile(spec, side / static_cast<int>(ipow(frame.base, j)), cdf));
    }
    const auto native = sample_profile(spec, side, cdf);
    kernel_sup_ = std::pow(*std::max_element(native.begin(), native.end()), dim);
    if (dim == 1 && kernel_sup_ > 2.0) {
        throw std::invalid_argument("m-adic kernel violates ||K||_inf <= 2");
    }
}

void MadicFrame::analyze_into(std::span<const double> signal, std::span<double> coeffs) const {
    const int d = dim();
    const int N = side();
    const std::size_t per_scale = ipow(offsets_per_axis_, d);
    std::vector<double> a;
    std::vector<double> b;
    for (int j = 0; j < index_set().levels; ++j) {
        Extents shape;
        shape.dim = d;
        for (int ax = 0; ax < d; ++ax) {
            shape.len[ax] = static_cast<std::size_t>(N);
        }
        a.assign(signal.begin(), signal.end());
        for (int ax = 0; ax < d; ++ax) {
            correlate_axis(a, shape, ax, profiles_[j], offsets_per_axis_, offset_stride_, N, b);
            std::swap(a, b);
        }
        // <phi, s> = N^{-d} m^{jd/2} sum prod k s
        const double scale = std::pow(static_cast<double>(descriptor().base), 0.5 * j * d) /
                             static_cast<double>(grid_size());
        for (std::size_t i = 0; i < per_scale; ++i) {
            coeffs[j * per_scale + i] = scale * a[i];
        }
    }
}

void MadicFrame::adjoint_into(std::span<const double> coeffs, std::span<double> signal) const {
    const int d = dim();
    const int N = side();
    const std::size_t per_scale = ipow(offsets_per_axis_, d);
    std::fill(signal.begin(), signal.end(), 0.0);
    std::vector<double> a;
    std::vector<double> b;
    for (int j = 0; j < index_set().levels; ++j) {
        Extents shape;
        shape.dim = d;
        for (int ax = 0; ax < d; ++ax) {
            shape.len[ax] = static_cast<std::size_t>(offsets_per_axis_);
        }
        const double scale = std::pow(static_cast<double>(descriptor().base), 0.5 * j * d);
        a.assign(coeffs.begin() + static_cast<std::ptrdiff_t>(j * per_scale),
                 coeffs.begin() + static_cast<std::ptrdiff_t>((j + 1) * per_scale));
        for (int ax = d - 1; ax >= 0; --ax) {
            spread_axis(a, shape, ax, profiles_[j], offsets_per_axis_, offset_stride_, N, b);
            std::swap(a, b);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            signal[i] += scale * a[i];
        }
    }
}

} // namespace ftv
