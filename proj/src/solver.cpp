#include "ftv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pdhg.hpp"

namespace ftv {

using detail::Differences;

void SolverConfig::validate() const {
    if (max_iters < 1) {
        throw std::invalid_argument("solver: max_iters must be >= 1");
    }
    if (feas_tol < 0.0 || !(rel_obj_tol > 0.0)) {
        throw std::invalid_argument("solver: tolerances must be positive");
    }
    if (!(step_ratio > 0.0 && step_ratio < 1.0)) {
        throw std::invalid_argument("solver: step_ratio must lie in (0, 1)");
    }
    if (linf_bound < 0.0) {
        throw std::invalid_argument("solver: linf_bound must be positive (0 selects log n)");
    }
    if (!(over_relaxation >= 0.0 && over_relaxation <= 1.0)) {
        throw std::invalid_argument("solver: over_relaxation must lie in [0, 1]");
    }
    if (check_every < 1 || history_every < 1) {
        throw std::invalid_argument("solver: check_every and history_every must be >= 1");
    }
}

double SolverConfig::resolved_feas_tol(double gamma) const {
    return feas_tol > 0.0 ? feas_tol : std::max(1e-6 * gamma, 1e-12);
}

double SolverConfig::resolved_linf_bound(long long n) const {
    const double beta = linf_bound > 0.0 ? linf_bound : std::log(static_cast<double>(n));
    if (!(beta > 0.0)) {
        throw std::invalid_argument("solver: the default box bound log n vanishes for n = 1");
    }
    return beta;
}

SolverResult solve_frame_constrained_tv(const Observations& obs, const Frame& frame, const SolverConfig& cfg) {
    cfg.validate();
    if (!obs.coefficients.index_set || !obs.coefficients.index_set->same_set(frame.index_set())) {
        throw std::invalid_argument("solver: observations were not taken on this frame's index set");
    }
    if (obs.coefficients.size() != frame.size()) {
        throw std::invalid_argument("solver: coefficient count does not match the frame");
    }
    if (!(obs.gamma >= 0.0) || !std::isfinite(obs.gamma)) {
        throw std::invalid_argument("solver: gamma must be finite and >= 0");
    }

    const int d = frame.dim();
    const int side = frame.side();
    const std::size_t cells = ipow(side, d);
    const std::size_t m = frame.size();
    const double root_cells = std::sqrt(static_cast<double>(cells));
    const double beta = cfg.resolved_linf_bound(frame.n());
    const auto& y = obs.coefficients.values;

    SolverResult res;
    res.gamma = obs.gamma;
    res.linf_bound = beta;
    res.feas_tol = cfg.resolved_feas_tol(obs.gamma);

    std::vector<double> coeffs(m);
    auto feasibility = [&](const TorusSignal& g) {
        frame.analyze_into(g.values(), coeffs);
        double worst = 0.0;
        for (std::size_t w = 0; w < m; ++w) {
            worst = std::max(worst, std::abs(coeffs[w] - y[w]));
        }
        return std::max(0.0, worst - obs.gamma);
    };

    if (max_abs(obs.coefficients) <= obs.gamma) {
        res.estimate = TorusSignal(d, side);
        res.converged = true;
        res.status = "zero_feasible";
        return res;
    }

    // Euclidean pixel coordinates: B = N^{d/2} analysis, tube scaled alike.
    detail::TubeProblem pb;
    pb.dim = d;
    pb.side = side;
    pb.flavor = cfg.tv_flavor;
    pb.beta = beta;
    pb.lo.resize(m);
    pb.hi.resize(m);
    for (std::size_t w = 0; w < m; ++w) {
        pb.lo[w] = root_cells * (y[w] - obs.gamma);
        pb.hi[w] = root_cells * (y[w] + obs.gamma);
    }
    pb.x0.assign(cells, 0.0);
    std::vector<double> full(cells);
    const auto* wavelet = dynamic_cast<const WaveletFrame*>(&frame);
    if (wavelet) {
        const PeriodicDwt& dwt = wavelet->transform();
        const auto slots = wavelet->slots();
        pb.analyze = [&dwt, slots, &full](std::span<const double> g, std::span<double> out) {
            std::copy(g.begin(), g.end(), full.begin());
            dwt.forward(full);
            for (std::size_t w = 0; w < slots.size(); ++w) {
                out[w] = full[slots[w]];
            }
        };
        pb.analyze_t = [&dwt, slots](std::span<const double> c, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t w = 0; w < slots.size(); ++w) {
                out[slots[w]] = c[w];
            }
            dwt.inverse(out);
        };
        // orthonormal: clamping the Omega_n coefficients is the exact projection
        pb.project_tube = [&dwt, slots, &pb](std::span<double> g) {
            dwt.forward(g);
            for (std::size_t w = 0; w < slots.size(); ++w) {
                g[slots[w]] = std::clamp(g[slots[w]], pb.lo[w], pb.hi[w]);
            }
            dwt.inverse(g);
        };
        pb.b_norm = 1.0;
        // soft threshold: the tube point nearest zero
        std::fill(full.begin(), full.end(), 0.0);
        for (std::size_t w = 0; w < m; ++w) {
            full[slots[w]] = std::clamp(0.0, pb.lo[w], pb.hi[w]);
        }
        dwt.inverse(full);
        pb.x0 = full;
    } else {
        const double inv_root = 1.0 / root_cells;
        pb.analyze = [&frame, root_cells](std::span<const double> g, std::span<double> out) {
            frame.analyze_into(g, out);
            for (double& v : out) {
                v *= root_cells;
            }
        };
        pb.analyze_t = [&frame, inv_root](std::span<const double> c, std::span<double> out) {
            frame.adjoint_into(c, out);
            for (double& v : out) {
                v *= inv_root;
            }
        };
        pb.b_norm = frame.operator_norm();
    }

    detail::PdhgSettings st;
    st.max_iters = cfg.max_iters;
    st.check_every = cfg.check_every;
    st.history_every = cfg.history_every;
    st.gap_tol = cfg.rel_obj_tol;
    st.gap_scale = std::pow(static_cast<double>(side), 1 - d);
    st.infeas_scale = 1.0 / root_cells;
    st.infeas_tol = res.feas_tol;
    st.restarts = cfg.adaptive_steps;
    st.initial_weight = (1.0 - cfg.step_ratio) / cfg.step_ratio;
    st.theta = cfg.over_relaxation;
    detail::PdhgOutcome out = detail::run_pdhg(pb, st);

    res.iterations = out.iterations;
    for (const auto& h : out.history) {
        res.history.push_back({h.iteration, h.infeasibility, h.dual_infeasibility, h.gap, h.primal_weight});
    }
    if (out.infeasible) {
        res.estimate = TorusSignal(d, side);
        res.feas_residual = feasibility(res.estimate);
        res.converged = true;
        res.empty_feasible_set_convention = true;
        res.status = "empty_feasible_set_convention";
        return res;
    }
    res.estimate = TorusSignal(d, side, std::move(out.x));
    res.objective = bv_seminorm(res.estimate, cfg.tv_flavor);
    res.feas_residual = feasibility(res.estimate);
    res.duality_gap = out.gap;
    res.converged = out.converged && res.feas_residual <= res.feas_tol;
    res.status = res.converged ? "converged" : (out.converged ? "feasibility_tolerance" : "max_iters");
    return res;
}

SolverResult solve_rof(const TorusSignal& pixels, double lambda, const SolverConfig& cfg) {
    cfg.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("solve_rof: lambda must be positive and finite");
    }
    const int d = pixels.dim();
    const int side = pixels.side();
    const Differences diff(d, side);
    const std::size_t cells = diff.cells();
    const std::size_t np = diff.size();
    const TvFlavor flavor = cfg.tv_flavor;
    // Euclidean energy sum (g - y)^2 + w sum |Dg|, w = lambda N; grid energy is N^{-d} of it.
    const double weight = lambda * side;
    const double to_grid = 1.0 / static_cast<double>(cells);
    const auto y = pixels.values();

    std::vector<double> g(y.begin(), y.end()), g_prev(cells), g_bar(g), p(np, 0.0), dp(np), dtp(cells), from_dual(cells);
    const double l_norm = diff.norm_bound();
    double tau = 1.0 / l_norm;
    double sigma = 1.0 / l_norm;
    const double mu = 2.0;

    auto energy = [&](std::span<const double> v) {
        diff.apply(v, dp);
        double fit = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            fit += (v[i] - y[i]) * (v[i] - y[i]);
        }
        return fit + weight * diff.tv(dp, flavor);
    };

    SolverResult res;
    res.linf_bound = std::numeric_limits<double>::infinity();
    const double data_energy = energy(y);
    for (int it = 1; it <= cfg.max_iters; ++it) {
        diff.apply(g_bar, dp);
        for (std::size_t i = 0; i < np; ++i) {
            p[i] += sigma * dp[i];
        }
        diff.project(p, weight, flavor);
        diff.adjoint(p, dtp);
        g_prev = g;
        for (std::size_t i = 0; i < cells; ++i) {
            g[i] = (g[i] - tau * dtp[i] + 2.0 * tau * y[i]) / (1.0 + 2.0 * tau);
        }
        const double theta = 1.0 / std::sqrt(1.0 + mu * tau);
        tau *= theta;
        sigma /= theta;
        for (std::size_t i = 0; i < cells; ++i) {
            g_bar[i] = g[i] + theta * (g[i] - g_prev[i]);
        }
        res.iterations = it;
        if (it % cfg.check_every != 0 && it != cfg.max_iters) {
            continue;
        }
        // dual value <D^T p, y> - ||D^T p||^2 / 4 at the primal point y - D^T p / 2
        double lin = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            lin += dtp[i] * y[i];
            sq += dtp[i] * dtp[i];
            from_dual[i] = y[i] - 0.5 * dtp[i];
        }
        const double dual_obj = lin - 0.25 * sq;
        const double e_iter = energy(g);
        const double e_dual = energy(from_dual);
        const double primal_obj = std::min(e_iter, e_dual);
        double step = 0.0;
        double size = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            step = std::max(step, std::abs(g[i] - g_prev[i]));
            size = std::max(size, std::abs(g[i]));
        }
        const double gap = primal_obj - dual_obj;
        const double fixed_point = step / std::max(size, 1e-300);
        res.duality_gap = gap * to_grid;
        if (it % cfg.history_every == 0) {
            res.history.push_back({it, fixed_point, 0.0, res.duality_gap, 1.0});
        }
        if (gap <= cfg.rel_obj_tol * std::max(primal_obj, 1e-300) && fixed_point <= cfg.rel_obj_tol) {
            res.converged = true;
            if (e_dual < e_iter) {
                g.assign(from_dual.begin(), from_dual.end());
            }
            break;
        }
    }
    res.status = res.converged ? "converged" : "max_iters";
    res.estimate = TorusSignal(d, side, std::vector<double>(g.begin(), g.end()));
    res.objective = bv_seminorm(res.estimate, flavor);
    res.penalized_objective = energy(g) * to_grid;
    if (res.penalized_objective > data_energy * to_grid) {
        // never worse than the data itself
        res.estimate = pixels;
        res.objective = bv_seminorm(pixels, flavor);
        res.penalized_objective = data_energy * to_grid;
    }
    return res;
}

double bregman_tv(const TorusSignal& u, const TorusSignal& v, TvFlavor flavor) {
    if (!u.same_shape(v)) {
        throw std::invalid_argument("bregman_tv: shape mismatch");
    }
    const int d = u.dim();
    const Differences diff(d, u.side());
    const std::size_t cells = diff.cells();
    std::vector<double> du(diff.size()), dv(diff.size()), su(diff.size()), sv(diff.size());
    diff.apply(u.values(), du);
    diff.apply(v.values(), dv);
    auto subgradient = [&](const std::vector<double>& g, std::vector<double>& s) {
        if (flavor == TvFlavor::anisotropic || d == 1) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                s[i] = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
            }
            return;
        }
        for (std::size_t i = 0; i < cells; ++i) {
            double sq = 0.0;
            for (int a = 0; a < d; ++a) {
                sq += g[a * cells + i] * g[a * cells + i];
            }
            const double len = std::sqrt(sq);
            for (int a = 0; a < d; ++a) {
                s[a * cells + i] = len > 0.0 ? g[a * cells + i] / len : 0.0;
            }
        }
    };
    subgradient(du, su);
    subgradient(dv, sv);
    double acc = 0.0;
    for (std::size_t i = 0; i < du.size(); ++i) {
        acc += (su[i] - sv[i]) * (du[i] - dv[i]);
    }
    return acc * std::pow(static_cast<double>(u.side()), 1 - d);
}

LambdaSweep oracle_lambda_sweep(const TorusSignal& pixels, const TorusSignal& truth, const std::vector<double>& lambdas,
                                Divergence divergence, const SolverConfig& cfg) {
    if (lambdas.empty()) {
        throw std::invalid_argument("oracle_lambda_sweep: empty lambda grid");
    }
    if (!pixels.same_shape(truth)) {
        throw std::invalid_argument("oracle_lambda_sweep: pixels and truth differ in shape");
    }
    LambdaSweep sweep;
    sweep.lambdas = lambdas;
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : lambdas) {
        auto r = solve_rof(pixels, lambda, cfg);
        const double loss = divergence == Divergence::l2 ? std::pow(lq_norm(r.estimate - truth, 2.0), 2)
                                                         : bregman_tv(r.estimate, truth, cfg.tv_flavor);
        if (loss < best) {
            best = loss;
            sweep.best_lambda = lambda;
        }
        sweep.losses.push_back(loss);
        sweep.estimates.push_back(std::move(r.estimate));
    }
    return sweep;
}

namespace {

std::string flavor_name(TvFlavor f) {
    return f == TvFlavor::anisotropic ? "anisotropic" : "isotropic";
}

} // namespace

nlohmann::json to_json(const SolverConfig& cfg) {
    return {{"max_iters", cfg.max_iters},
            {"feas_tol", cfg.feas_tol},
            {"rel_obj_tol", cfg.rel_obj_tol},
            {"step_ratio", cfg.step_ratio},
            {"linf_bound", cfg.linf_bound},
            {"tv_flavor", flavor_name(cfg.tv_flavor)},
            {"over_relaxation", cfg.over_relaxation},
            {"adaptive_steps", cfg.adaptive_steps},
            {"check_every", cfg.check_every},
            {"history_every", cfg.history_every}};
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("solver config must be a JSON object");
    }
    SolverConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "max_iters") {
            cfg.max_iters = value.get<int>();
        } else if (key == "feas_tol") {
            cfg.feas_tol = value.get<double>();
        } else if (key == "rel_obj_tol") {
            cfg.rel_obj_tol = value.get<double>();
        } else if (key == "step_ratio") {
            cfg.step_ratio = value.get<double>();
        } else if (key == "linf_bound") {
            cfg.linf_bound = value.get<double>();
        } else if (key == "tv_flavor") {
            const auto name = value.get<std::string>();
            if (name != "anisotropic" && name != "isotropic") {
                throw std::invalid_argument("solver config: tv_flavor must be anisotropic or isotropic");
            }
            cfg.tv_flavor = name == "anisotropic" ? TvFlavor::anisotropic : TvFlavor::isotropic;
        } else if (key == "over_relaxation") {
            cfg.over_relaxation = value.get<double>();
        } else if (key == "adaptive_steps") {
            cfg.adaptive_steps = value.get<bool>();
        } else if (key == "check_every") {
            cfg.check_every = value.get<int>();
        } else if (key == "history_every") {
            cfg.history_every = value.get<int>();
        } else {
            throw std::invalid_argument("solver config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

nlohmann::json to_json(const SolverResult& r) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& h : r.history) {
        history.push_back({{"iteration", h.iteration},
                           {"primal_residual", h.primal},
                           {"dual_residual", h.dual},
                           {"gap", h.gap},
                           {"step_weight", h.step_weight}});
    }
    return {{"objective", r.objective},
            {"feas_residual", r.feas_residual},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"empty_feasible_set_convention", r.empty_feasible_set_convention},
            {"status", r.status},
            {"gamma", r.gamma},
            {"linf_bound", std::isfinite(r.linf_bound) ? nlohmann::json(r.linf_bound) : nlohmann::json(nullptr)},
            {"feas_tol", r.feas_tol},
            {"duality_gap", r.duality_gap},
            {"penalized_objective", r.penalized_objective},
            {"history", history}};
}

} // namespace ftv
