#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ftv::detail {

/// argmin_x 1/2 |x - y|^2 + lambda sum_k |x_{k+1} - x_k| over an open chain.
/// Linear-time dynamic programme; out may not alias y.
void chain_tv_prox(std::span<const double> y, std::span<double> out, double lambda);

/// Same with the wrap edge |x_0 - x_{n-1}| included. `wrap_dual` is the
/// multiplier of the wrap edge; pass the previous value back in as a warm start.
void ring_tv_prox(std::span<const double> y, std::span<double> out, double lambda, double& wrap_dual);

/// Ring prox applied to every line of an N^d grid along one axis, in place.
/// `wrap_duals` holds one warm start per line (resized on first use).
class LineProx {
public:
    LineProx(int dim, int side, int axis);

    void apply(std::span<double> values, double lambda, std::vector<double>& wrap_duals) const;
    std::size_t lines() const { return lines_; }

private:
    int side_;
    std::size_t stride_;
    std::size_t block_;
    std::size_t lines_;
    std::size_t cells_;
};

} // namespace ftv::detail
