#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ftv {

/// Orthonormal Daubechies lowpass filter with `vanishing_moments` zero
/// moments (length 2S, sum sqrt(2)). S = 1 is Haar. Supported: 1..10.
std::span<const double> daubechies_filter(int vanishing_moments);

/// Full-depth periodized separable DWT on an N^d grid (Euclidean-orthonormal).
///
/// After `forward`, the coefficient of scale j, position k and type e sits at
/// per-axis coordinate e_a * 2^j + k_a; the single father coefficient is at 0.
class PeriodicDwt {
public:
    PeriodicDwt(int dim, int side, int vanishing_moments);

    int dim() const { return dim_; }
    int side() const { return side_; }
    int levels() const { return levels_; }
    std::size_t size() const { return size_; }

    void forward(std::span<double> data) const;
    void inverse(std::span<double> data) const;

    /// Flat position of (j, k, e) in the transformed layout; e is a bitmask
    /// whose bit (d-1-a) is e_a.
    std::size_t flat_index(int scale, const std::array<int, 3>& position, int type) const;

private:
    void transform_block(std::span<double> data, int block, bool inverse) const;
    void analysis_step(std::span<double> line, int m, std::vector<double>& scratch) const;
    void synthesis_step(std::span<double> line, int m, std::vector<double>& scratch) const;

    int dim_;
    int side_;
    int levels_;
    std::size_t size_;
    std::vector<double> low_;
    std::vector<double> high_;
};

} // namespace ftv
