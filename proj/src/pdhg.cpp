#include "pdhg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "line_prox.hpp"

namespace ftv::detail {

Differences::Differences(int dim, int side) : dim_(dim), side_(side), cells_(ipow(side, dim)) {}

double Differences::norm_bound() const { return 2.0 * std::sqrt(static_cast<double>(dim_)); }

template <class F>
static void for_axis(int dim, int side, std::size_t cells, int axis, F&& f) {
    const std::size_t stride = ipow(side, dim - 1 - axis);
    const std::size_t block = stride * side;
    for (std::size_t base = 0; base < cells; base += block) {
        for (int k = 0; k < side; ++k) {
            const std::size_t row = base + k * stride;
            const std::size_t next = base + ((k + 1) % side) * stride;
            for (std::size_t r = 0; r < stride; ++r) {
                f(row + r, next + r);
            }
        }
    }
}

void Differences::apply(std::span<const double> x, std::span<double> out) const {
    for (int a = 0; a < dim_; ++a) {
        double* o = out.data() + a * cells_;
        for_axis(dim_, side_, cells_, a, [&](std::size_t i, std::size_t next) { o[i] = x[next] - x[i]; });
    }
}

void Differences::adjoint(std::span<const double> p, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (int a = 0; a < dim_; ++a) {
        const double* pa = p.data() + a * cells_;
        for_axis(dim_, side_, cells_, a, [&](std::size_t i, std::size_t next) {
            out[next] += pa[i];
            out[i] -= pa[i];
        });
    }
}

double Differences::tv(std::span<const double> dx, TvFlavor flavor) const {
    return tv_of_block(dx, dim_, cells_, flavor);
}

void Differences::project(std::span<double> p, double radius, TvFlavor flavor) const {
    project_tv_ball(p, dim_, cells_, radius, flavor);
}

double tv_of_block(std::span<const double> dx, int dim, std::size_t cells, TvFlavor flavor) {
    double acc = 0.0;
    if (flavor == TvFlavor::anisotropic || dim == 1) {
        for (double v : dx) {
            acc += std::abs(v);
        }
        return acc;
    }
    for (std::size_t i = 0; i < cells; ++i) {
        double sq = 0.0;
        for (int a = 0; a < dim; ++a) {
            sq += dx[a * cells + i] * dx[a * cells + i];
        }
        acc += std::sqrt(sq);
    }
    return acc;
}

void project_tv_ball(std::span<double> p, int dim, std::size_t cells, double radius, TvFlavor flavor) {
    if (flavor == TvFlavor::anisotropic || dim == 1) {
        for (double& v : p) {
            v = std::clamp(v, -radius, radius);
        }
        return;
    }
    for (std::size_t i = 0; i < cells; ++i) {
        double sq = 0.0;
        for (int a = 0; a < dim; ++a) {
            sq += p[a * cells + i] * p[a * cells + i];
        }
        if (sq > radius * radius) {
            const double shrink = radius / std::sqrt(sq);
            for (int a = 0; a < dim; ++a) {
                p[a * cells + i] *= shrink;
            }
        }
    }
}

PdhgOutcome run_pdhg(const TubeProblem& pb, const PdhgSettings& st) {
    const int d = pb.dim;
    const std::size_t cells = ipow(pb.side, d);
    const std::size_t m = pb.lo.size();
    const bool split = pb.flavor == TvFlavor::anisotropic || d == 1;
    const Differences diff(d, pb.side);
    // dual layout: [tube (m); split ? axes 1..d-1 (cells each) : gradient (d cells)]
    const std::size_t nu = split ? (d - 1) * cells : d * cells;
    std::vector<LineProx> lines;
    if (split) {
        for (int a = 0; a < d; ++a) {
            lines.emplace_back(d, pb.side, a);
        }
    }
    std::vector<std::vector<double>> wraps(d), wraps_check(d);

    std::vector<double> x(pb.x0), x_new(cells), xbar(cells), g(cells, 0.0), z(cells), v0(cells);
    std::vector<double> y(m, 0.0), u(nu, 0.0), bx(m), tmp(cells), tmp_u(nu);
    for (double& v : x) {
        v = std::clamp(v, -pb.beta, pb.beta);
    }

    auto apply_kt = [&](std::span<const double> yy, std::span<const double> uu, std::span<double> out) {
        pb.analyze_t(yy, out);
        if (split) {
            for (int a = 1; a < d; ++a) {
                const double* ua = uu.data() + (a - 1) * cells;
                for (std::size_t i = 0; i < cells; ++i) {
                    out[i] += ua[i];
                }
            }
        } else {
            diff.adjoint(uu, tmp);
            for (std::size_t i = 0; i < cells; ++i) {
                out[i] += tmp[i];
            }
        }
    };
    auto tube_violation = [&](std::span<const double> kx) {
        double worst = 0.0;
        for (std::size_t w = 0; w < m; ++w) {
            worst = std::max({worst, pb.lo[w] - kx[w], kx[w] - pb.hi[w]});
        }
        return worst;
    };
    std::vector<double> dx(diff.size());
    auto tv = [&](std::span<const double> v) {
        diff.apply(v, dx);
        return tv_of_block(dx, d, cells, pb.flavor);
    };
    // largest TV any point of the box can have
    const double tv_ceiling = 2.0 * pb.beta * static_cast<double>(cells) * (split ? d : std::sqrt(double(d)));

    double weight = st.initial_weight;
    const double k_norm = std::sqrt(pb.b_norm * pb.b_norm + (split ? d - 1.0 : diff.norm_bound() * diff.norm_bound()));
    const double eta = 0.99 / k_norm;
    double tau = eta / weight;
    double sigma = eta * weight;

    PdhgOutcome out;
    std::vector<double> best_x, fallback_x(x), candidate(cells);
    double best_obj = std::numeric_limits<double>::infinity();
    double best_dual = -std::numeric_limits<double>::infinity();
    double fallback_infeas = std::numeric_limits<double>::infinity();
    double fallback_obj = 0.0;

    std::vector<double> x_ref(x), y_ref(y), u_ref(u);
    double merit_ref = std::numeric_limits<double>::infinity();
    double merit_prev = std::numeric_limits<double>::infinity();
    int last_restart = 0;

    auto relative = [&](double gap, double obj) {
        return gap * st.gap_scale / (1.0 + std::max(obj, 0.0) * st.gap_scale);
    };

    for (int it = 1; it <= st.max_iters; ++it) {
        for (std::size_t i = 0; i < cells; ++i) {
            z[i] = x[i] - tau * g[i];
        }
        x_new = z;
        if (split) {
            lines[0].apply(x_new, tau, wraps[0]);
        }
        for (std::size_t i = 0; i < cells; ++i) {
            x_new[i] = std::clamp(x_new[i], -pb.beta, pb.beta);
            xbar[i] = x_new[i] + st.theta * (x_new[i] - x[i]);
        }
        pb.analyze(xbar, bx);
        for (std::size_t w = 0; w < m; ++w) {
            const double v = y[w] + sigma * bx[w];
            y[w] = v - sigma * std::clamp(v / sigma, pb.lo[w], pb.hi[w]);
        }
        if (split) {
            for (int a = 1; a < d; ++a) {
                double* ua = u.data() + (a - 1) * cells;
                std::span<double> t(tmp_u.data() + (a - 1) * cells, cells);
                for (std::size_t i = 0; i < cells; ++i) {
                    t[i] = ua[i] / sigma + xbar[i];
                }
                lines[a].apply(t, 1.0 / sigma, wraps[a]);
                for (std::size_t i = 0; i < cells; ++i) {
                    ua[i] += sigma * (xbar[i] - t[i]);
                }
            }
        } else {
            diff.apply(xbar, tmp_u);
            for (std::size_t i = 0; i < nu; ++i) {
                u[i] += sigma * tmp_u[i];
            }
            project_tv_ball(u, d, cells, 1.0, pb.flavor);
        }
        std::swap(x, x_new);
        apply_kt(y, u, g);

        const bool last = it == st.max_iters;
        if (it % st.check_every != 0 && !last) {
            continue;
        }

        // primal candidate
        candidate = x;
        pb.analyze(candidate, bx);
        const double raw_infeas = tube_violation(bx) * st.infeas_scale;
        if (pb.project_tube) {
            pb.project_tube(candidate);
            for (double& v : candidate) {
                v = std::clamp(v, -pb.beta, pb.beta);
            }
            pb.analyze(candidate, bx);
        }
        const double infeas = pb.project_tube ? tube_violation(bx) * st.infeas_scale : raw_infeas;
        const double obj = tv(candidate);
        if (infeas <= st.infeas_tol && obj < best_obj) {
            best_obj = obj;
            best_x = candidate;
        }
        if (infeas < fallback_infeas) {
            fallback_infeas = infeas;
            fallback_x = candidate;
            fallback_obj = obj;
        }

        // dual bound: TV(x) >= <v0, x> for v0 in the subdifferential at zero of
        // the primal TV part, then min over the box of <g + v0, x>
        double mismatch = 0.0;
        if (split) {
            for (std::size_t i = 0; i < cells; ++i) {
                z[i] = x[i] - tau * g[i];
            }
            v0 = z;
            lines[0].apply(v0, tau, wraps_check[0]);
            for (std::size_t i = 0; i < cells; ++i) {
                mismatch += std::abs(g[i] + (z[i] - v0[i]) / tau);
            }
        } else {
            for (std::size_t i = 0; i < cells; ++i) {
                mismatch += std::abs(g[i]);
            }
        }
        double support = 0.0;
        for (std::size_t w = 0; w < m; ++w) {
            support += std::max(y[w] * pb.lo[w], y[w] * pb.hi[w]);
        }
        const double dual = -support - pb.beta * mismatch;
        best_dual = std::max(best_dual, dual);

        const double gap = best_obj - best_dual;
        if (it % st.history_every < st.check_every || last) {
            out.history.push_back({it, raw_infeas, mismatch, gap * st.gap_scale, weight});
        }
        out.iterations = it;
        if (best_dual > tv_ceiling * (1.0 + 1e-9)) {
            out.infeasible = true;
            break;
        }
        if (!best_x.empty() && relative(gap, best_obj) <= st.gap_tol) {
            out.converged = true;
            break;
        }
        if (last || !st.restarts) {
            continue;
        }

        // adaptive primal weight, restarting from the current iterate
        const double merit = std::max(relative(obj - dual, obj), st.gap_tol * infeas / std::max(st.infeas_tol, 1e-300));
        const bool restart = merit <= 0.2 * merit_ref || (merit <= 0.8 * merit_ref && merit > merit_prev) ||
                             (it - last_restart) >= 0.36 * it;
        merit_prev = merit;
        if (!restart) {
            continue;
        }
        double ddx = 0.0;
        double ddy = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            ddx += (x[i] - x_ref[i]) * (x[i] - x_ref[i]);
        }
        for (std::size_t w = 0; w < m; ++w) {
            ddy += (y[w] - y_ref[w]) * (y[w] - y_ref[w]);
        }
        for (std::size_t i = 0; i < nu; ++i) {
            ddy += (u[i] - u_ref[i]) * (u[i] - u_ref[i]);
        }
        if (ddx > 1e-20 && ddy > 1e-20) {
            weight = std::exp(0.5 * std::log(std::sqrt(ddy / ddx)) + 0.5 * std::log(weight));
            tau = eta / weight;
            sigma = eta * weight;
        }
        x_ref = x;
        y_ref = y;
        u_ref = u;
        merit_ref = merit;
        merit_prev = std::numeric_limits<double>::infinity();
        last_restart = it;
    }

    if (!best_x.empty()) {
        out.x = std::move(best_x);
        out.objective = best_obj * st.gap_scale;
        out.gap = (best_obj - best_dual) * st.gap_scale;
        pb.analyze(out.x, bx);
        out.infeasibility = tube_violation(bx) * st.infeas_scale;
    } else {
        out.x = std::move(fallback_x);
        out.objective = fallback_obj * st.gap_scale;
        out.gap = std::numeric_limits<double>::infinity();
        out.infeasibility = fallback_infeas;
    }
    return out;
}

} // namespace ftv::detail
