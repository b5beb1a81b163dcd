#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ftv/grid.hpp"

namespace ftv::detail {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// min_x TV(x) + indicator(|x|_inf <= beta) + indicator(B x in [lo, hi]),
/// all in Euclidean pixel coordinates (TV = plain sum of |differences|).
///
/// Anisotropic TV is split by axis: axis 0 sits in the primal prox together
/// with the box (exact ring proxes then a clip), the other axes are dual
/// blocks with identity coupling. Isotropic TV is a dual block coupled
/// through the gradient. The tube is the last dual block.
struct TubeProblem {
    int dim = 1;
    int side = 1;
    TvFlavor flavor = TvFlavor::anisotropic;
    double beta = 1.0;
    std::vector<double> lo, hi;  // tube, one entry per row of B
    LinearMap analyze;           // B
    LinearMap analyze_t;         // B^T
    double b_norm = 1.0;         // upper bound on |B|
    // Optional exact Euclidean projection onto {x : B x in [lo, hi]}.
    std::function<void(std::span<double>)> project_tube;
    std::vector<double> x0;
};

struct PdhgSettings {
    int max_iters = 20000;
    int check_every = 20;
    int history_every = 100;
    double gap_tol = 1e-6;      // gap <= gap_tol (1 + objective), reported units
    double infeas_tol = 1e-12;  // tube violation of the returned point, reported units
    double gap_scale = 1.0;     // Euclidean TV -> reported
    double infeas_scale = 1.0;  // Euclidean tube units -> reported
    bool restarts = true;
    double initial_weight = 1.0;  // omega: tau = eta / omega, sigma = eta * omega
    double theta = 1.0;           // extrapolation
};

struct PdhgTrace {
    int iteration;
    double infeasibility;       // tube violation of the raw primal iterate
    double dual_infeasibility;  // l1 mismatch in the dual certificate
    double gap;                 // best primal minus best dual bound
    double primal_weight;
};

struct PdhgOutcome {
    std::vector<double> x;  // best point found (box-clipped, projected when possible)
    int iterations = 0;
    bool converged = false;
    bool infeasible = false;  // dual bound exceeded every attainable objective
    double objective = 0.0;   // reported units
    double gap = 0.0;
    double infeasibility = 0.0;
    std::vector<PdhgTrace> history;
};

PdhgOutcome run_pdhg(const TubeProblem& problem, const PdhgSettings& settings);

/// Periodic forward differences without the N factor, axis-major blocks.
class Differences {
public:
    Differences(int dim, int side);

    std::size_t cells() const { return cells_; }
    std::size_t size() const { return cells_ * dim_; }
    double norm_bound() const;

    void apply(std::span<const double> x, std::span<double> out) const;
    void adjoint(std::span<const double> p, std::span<double> out) const;
    double tv(std::span<const double> dx, TvFlavor flavor) const;
    void project(std::span<double> p, double radius, TvFlavor flavor) const;

private:
    int dim_;
    int side_;
    std::size_t cells_;
};

double tv_of_block(std::span<const double> dx, int dim, std::size_t cells, TvFlavor flavor);
void project_tv_ball(std::span<double> p, int dim, std::size_t cells, double radius, TvFlavor flavor);

} // namespace ftv::detail
