#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ftv/frame.hpp"
#include "ftv/grid.hpp"
#include "ftv/noise.hpp"

namespace ftv {

struct SolverConfig {
    int max_iters = 20000;
    double feas_tol = 0.0;      // 0: 1e-6 * gamma, floored at 1e-12
    double rel_obj_tol = 1e-6;
    double step_ratio = 0.5;    // tau share of the step budget; 0.5 balances tau and sigma
    double linf_bound = 0.0;    // beta; 0: log n
    TvFlavor tv_flavor = TvFlavor::anisotropic;
    double over_relaxation = 1.0;
    bool adaptive_steps = true;
    int check_every = 20;
    int history_every = 100;

    void validate() const;
    double resolved_feas_tol(double gamma) const;
    double resolved_linf_bound(long long n) const;
};

struct ResidualRecord {
    int iteration = 0;
    double primal = 0.0;  // constraint violation (or ROF fixed-point residual)
    double dual = 0.0;    // dual infeasibility
    double gap = 0.0;     // objective minus a dual bound
    double step_weight = 0.0;
};

struct SolverResult {
    TorusSignal estimate;
    double objective = 0.0;       // bv_seminorm of the estimate
    double feas_residual = 0.0;   // max |<phi, g> - Y| - gamma, clipped at 0
    int iterations = 0;
    bool converged = false;
    bool empty_feasible_set_convention = false;
    std::string status;
    double gamma = 0.0;
    double linf_bound = 0.0;
    double feas_tol = 0.0;
    double duality_gap = 0.0;
    double penalized_objective = 0.0;  // ROF energy; 0 for the constrained program
    std::vector<ResidualRecord> history;
};

/// argmin bv(g) over ||g||_inf <= beta and max_w |<phi_w, g> - Y_w| <= gamma.
SolverResult solve_frame_constrained_tv(const Observations& obs, const Frame& frame, const SolverConfig& cfg = {});

/// argmin ||g - y||^2 + lambda bv(g), both in grid units.
SolverResult solve_rof(const TorusSignal& pixels, double lambda, const SolverConfig& cfg = {});

enum class Divergence { l2, bregman_tv };

struct LambdaSweep {
    double best_lambda = 0.0;
    std::vector<double> lambdas;
    std::vector<double> losses;
    std::vector<TorusSignal> estimates;
};

/// Symmetrized TV Bregman divergence <p_u - p_v, u - v> with p from
/// sign(differences), sign(0) = 0.
double bregman_tv(const TorusSignal& u, const TorusSignal& v, TvFlavor flavor = TvFlavor::anisotropic);

LambdaSweep oracle_lambda_sweep(const TorusSignal& pixels, const TorusSignal& truth, const std::vector<double>& lambdas,
                                Divergence divergence, const SolverConfig& cfg = {});

nlohmann::json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SolverResult& r);

} // namespace ftv
