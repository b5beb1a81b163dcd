#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ftv {

/// Real values on an N^d periodic grid, row-major, cell i sampling x_i = i/N.
class TorusSignal {
public:
    TorusSignal() = default;
    TorusSignal(int dim, int side);
    TorusSignal(int dim, int side, double fill);
    TorusSignal(int dim, int side, std::vector<double> values);

    int dim() const { return dim_; }
    int side() const { return side_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    /// Stride of axis a in the row-major layout (axis 0 is slowest).
    std::size_t stride(int axis) const;
    /// Periodic neighbour of cell i shifted by +1 (or -1) along an axis.
    std::size_t shift(std::size_t i, int axis, int offset) const;

    bool same_shape(const TorusSignal& other) const {
        return dim_ == other.dim_ && side_ == other.side_;
    }
    bool all_finite() const;

    TorusSignal& operator+=(const TorusSignal& o);
    TorusSignal& operator-=(const TorusSignal& o);
    TorusSignal& operator*=(double a);

private:
    int dim_ = 0;
    int side_ = 0;
    std::vector<double> values_;
};

TorusSignal operator+(TorusSignal a, const TorusSignal& b);
TorusSignal operator-(TorusSignal a, const TorusSignal& b);
TorusSignal operator*(double a, TorusSignal s);

bool is_power_of_two(long long v);
int log2_exact(long long v);
std::size_t ipow(std::size_t base, int exp);

enum class TvFlavor { anisotropic, isotropic };

/// Gradient components stacked axis-major: d arrays of N^d values each.
struct VectorField {
    int dim = 0;
    int side = 0;
    std::vector<double> values;

    std::span<const double> component(int axis) const;
    std::span<double> component(int axis);
};

/// q = infinity is spelled `std::numeric_limits<double>::infinity()`.
double lq_norm(const TorusSignal& s, double q);
double inner(const TorusSignal& u, const TorusSignal& v);
double inner(const VectorField& p, const VectorField& r);
double sup_norm(const TorusSignal& s);
double mean(const TorusSignal& s);

double bv_seminorm(const TorusSignal& s, TvFlavor flavor = TvFlavor::anisotropic);

/// N * forward difference along each axis, periodic.
VectorField gradient(const TorusSignal& s);
/// N * backward difference; the negative grid adjoint of `gradient`.
TorusSignal divergence(const VectorField& p);

/// Largest singular value of `gradient` under the grid inner products.
double gradient_norm_bound(int dim, int side);

} // namespace ftv
