#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftv/grid.hpp"
#include "ftv/wavelet.hpp"

namespace ftv {

enum class FrameKind { wavelet, madic };

/// Smoothed-cube kernel: indicator of [plateau_lo, plateau_hi] per axis
/// convolved with a C-infinity bump of radius `mollifier_radius`.
struct CubeKernelSpec {
    double plateau_lo = 0.25;
    double plateau_hi = 0.75;
    double mollifier_radius = 0.125;

    bool operator==(const CubeKernelSpec&) const = default;
};

struct FrameDescriptor {
    FrameKind kind = FrameKind::wavelet;
    int vanishing_moments = 3;  // wavelet
    int base = 2;               // madic m
    CubeKernelSpec kernel;      // madic

    static FrameDescriptor wavelet(int vanishing_moments = 3);
    static FrameDescriptor madic(int base = 2, CubeKernelSpec kernel = {});

    /// Gamma in c n^Gamma <= #Omega_n <= Q(n).
    double growth_exponent(int dim) const;
    /// Degree of the polynomial Q.
    double growth_poly_degree(int dim) const;

    std::string name() const;
    bool operator==(const FrameDescriptor&) const = default;
};

/// Wavelet: (scale j, position k, type e). m-adic: (scale j, offset numerators
/// on the m^-R grid), type unused. Types are bitmasks, bit (d-1-a) is e_a.
struct FrameIndex {
    int scale = 0;
    std::array<int, 3> position{0, 0, 0};
    int type = 0;

    bool operator==(const FrameIndex&) const = default;
};

/// The truncated index set Omega_n in canonical order.
struct IndexSet {
    FrameDescriptor frame;
    int dim = 0;
    long long n = 0;
    int levels = 0;           // J
    int offset_levels = 0;    // R in force (m-adic), after any grid cap
    int nominal_offset_levels = 0;
    bool offsets_capped = false;
    std::vector<FrameIndex> indices;

    std::size_t size() const { return indices.size(); }
    bool same_set(const IndexSet& other) const;
};

/// J for the wavelet system: floor(log2(n) / d).
int wavelet_levels(int dim, long long n);
/// J and nominal R for the m-adic system.
int madic_levels(int base, int dim, long long n);
int madic_offset_levels(int base, int dim, long long n);

/// Cardinality of Omega_n without materializing it (grid_side = 0: no cap).
std::size_t omega_cardinality(const FrameDescriptor& frame, int dim, long long n, int grid_side = 0);

/// Omega_n; with grid_side > 0 the m-adic offset depth is capped at log_m(N).
IndexSet omega_n(const FrameDescriptor& frame, int dim, long long n, int grid_side = 0);

struct CoefficientVector {
    std::shared_ptr<const IndexSet> index_set;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

double dot(const CoefficientVector& a, const CoefficientVector& b);
double max_abs(const CoefficientVector& c);

/// A dictionary instantiated on an N^d grid at information level n. Atoms have
/// unit norm in the grid inner product; analysis computes <phi_w, s>.
class Frame {
public:
    virtual ~Frame() = default;

    const FrameDescriptor& descriptor() const { return index_set_->frame; }
    const IndexSet& index_set() const { return *index_set_; }
    std::shared_ptr<const IndexSet> shared_index_set() const { return index_set_; }
    int dim() const { return dim_; }
    int side() const { return side_; }
    long long n() const { return index_set_->n; }
    std::size_t grid_size() const { return ipow(side_, dim_); }
    std::size_t size() const { return index_set_->size(); }

    CoefficientVector analyze(const TorusSignal& s) const;
    TorusSignal adjoint(const CoefficientVector& c) const;

    /// Raw kernels: `coeffs` has size(), `signal` has grid_size() entries.
    virtual void analyze_into(std::span<const double> signal, std::span<double> coeffs) const = 0;
    virtual void adjoint_into(std::span<const double> coeffs, std::span<double> signal) const = 0;

    /// Largest singular value of analysis, grid L2 -> l2. Cached.
    double operator_norm() const;

    /// Atom phi_w as a grid function.
    TorusSignal atom(std::size_t coefficient) const;

protected:
    Frame(std::shared_ptr<const IndexSet> index_set, int side);
    virtual double compute_operator_norm() const;

private:
    std::shared_ptr<const IndexSet> index_set_;
    int dim_;
    int side_;
    mutable std::optional<double> norm_cache_;
};

class WaveletFrame final : public Frame {
public:
    WaveletFrame(const FrameDescriptor& frame, int dim, long long n, int side);

    void analyze_into(std::span<const double> signal, std::span<double> coeffs) const override;
    void adjoint_into(std::span<const double> coeffs, std::span<double> signal) const override;

    const PeriodicDwt& transform() const { return dwt_; }
    /// Flat slot of each Omega_n coefficient in the full-depth DWT layout.
    std::span<const std::size_t> slots() const { return slots_; }

protected:
    double compute_operator_norm() const override { return 1.0; }

private:
    PeriodicDwt dwt_;
    std::vector<std::size_t> slots_;
};

class MadicFrame final : public Frame {
public:
    MadicFrame(const FrameDescriptor& frame, int dim, long long n, int side);

    void analyze_into(std::span<const double> signal, std::span<double> coeffs) const override;
    void adjoint_into(std::span<const double> coeffs, std::span<double> signal) const override;

    /// Sup norm of the unit-L2 kernel K sampled on the full grid.
    double kernel_sup() const { return kernel_sup_; }
    /// Sampled per-axis profile at scale j (grid-normalized: mean square 1).
    std::span<const double> profile(int scale) const { return profiles_[scale]; }

private:
    int offsets_per_axis_;
    int offset_stride_;
    std::vector<std::vector<double>> profiles_;
    double kernel_sup_ = 0.0;
};

std::unique_ptr<Frame> make_frame(const FrameDescriptor& frame, int dim, long long n, int side);

/// Power iteration for the largest singular value of a linear map.
/// Runs at least `min_iters` sweeps and stops once the estimate settles.
double power_iteration_norm(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                            const std::function<void(std::span<const double>, std::span<double>)>& apply_adjoint,
                            std::size_t domain_size, std::size_t range_size, std::uint64_t seed = 12345,
                            int min_iters = 64, int max_iters = 5000);

/// max over the wavelet coefficients of scales 0..max_scale-1 (plus father):
/// the B^{-d/2}_{inf,inf} norm in its wavelet form.
double besov_norm_neg_half_d(const TorusSignal& s, int max_scale, int vanishing_moments = 3);

/// Sup of the m-adic kernel means over Omega_n.
double local_means_sup(const TorusSignal& s, const FrameDescriptor& madic, long long n);

} // namespace ftv
