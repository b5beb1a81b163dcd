#include "ftv/analysis.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "ftv/noise.hpp"
#include "ftv/truth.hpp"

namespace ftv {

double target_exponent(int dim, double q) {
    if (dim < 1) {
        throw std::invalid_argument("target_exponent: d must be >= 1");
    }
    if (!(q >= 1.0)) {
        throw std::invalid_argument("target_exponent: q must be >= 1");
    }
    const double d = dim;
    return -std::min(1.0 / (d + 2.0), 1.0 / (d * q));
}

std::string estimator_name(EstimatorKind e) {
    switch (e) {
    case EstimatorKind::frame_tv:
        return "frame_tv";
    case EstimatorKind::rof_oracle:
        return "rof_oracle";
    case EstimatorKind::wavelet_threshold:
        return "wavelet_threshold";
    case EstimatorKind::identity:
        return "identity";
    }
    return "frame_tv";
}

EstimatorKind estimator_from_name(const std::string& name) {
    for (auto e : {EstimatorKind::frame_tv, EstimatorKind::rof_oracle, EstimatorKind::wavelet_threshold,
                   EstimatorKind::identity}) {
        if (estimator_name(e) == name) {
            return e;
        }
    }
    throw std::invalid_argument("unknown estimator '" + name +
                                "' (frame_tv, rof_oracle, wavelet_threshold, identity)");
}

std::vector<double> default_rof_lambdas() {
    std::vector<double> out;
    for (int k = 0; k <= 24; ++k) {
        out.push_back(std::pow(10.0, -5.0 + k * 0.25));
    }
    return out;
}

int ExperimentSpec::side_for(long long n) const {
    if (n < 1) {
        throw std::invalid_argument("ladder values must be positive");
    }
    if (grid_side > 0) {
        const auto cells = static_cast<long long>(ipow(grid_side, dim));
        if (n > cells) {
            throw std::invalid_argument("ladder point n = " + std::to_string(n) + " exceeds the grid capacity N^d = " +
                                        std::to_string(cells));
        }
        return grid_side;
    }
    const auto side = static_cast<long long>(std::llround(std::pow(static_cast<double>(n), 1.0 / dim)));
    for (long long s : {side - 1, side, side + 1}) {
        if (s >= 1 && static_cast<long long>(ipow(static_cast<std::size_t>(s), dim)) == n) {
            if (!is_power_of_two(s)) {
                throw std::invalid_argument("ladder point n = " + std::to_string(n) +
                                            " gives a grid side that is not a power of two");
            }
            return static_cast<int>(s);
        }
    }
    throw std::invalid_argument("ladder point n = " + std::to_string(n) + " is not a perfect " + std::to_string(dim) +
                                "-th power; set grid_side to decouple n from the grid");
}

void ExperimentSpec::validate() const {
    if (dim < 1 || dim > 3) {
        throw std::invalid_argument("experiment: d must be 1, 2 or 3");
    }
    if (!(q >= 1.0)) {
        throw std::invalid_argument("experiment: q must be >= 1");
    }
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("experiment: kappa must be positive");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("experiment: sigma must be positive and finite");
    }
    if (replicates < 1) {
        throw std::invalid_argument("experiment: replicates must be >= 1");
    }
    if (ladder.empty()) {
        throw std::invalid_argument("experiment: empty ladder");
    }
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (ladder[i] <= ladder[i - 1]) {
            throw std::invalid_argument("experiment: ladder must be strictly increasing");
        }
    }
    if (grid_side < 0 || (grid_side > 0 && !is_power_of_two(grid_side))) {
        throw std::invalid_argument("experiment: grid_side must be 0 or a power of two");
    }
    if (estimator == EstimatorKind::wavelet_threshold && frame.kind != FrameKind::wavelet) {
        throw std::invalid_argument("experiment: wavelet_threshold needs a wavelet frame");
    }
    for (double l : rof_lambdas) {
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw std::invalid_argument("experiment: rof_lambdas must be positive");
        }
    }
    solver.validate();
    for (long long n : ladder) {
        const int side = side_for(n);
        omega_cardinality(frame, dim, n, side);  // throws on n below the frame's minimum
    }
    truth_library(truth, dim, side_for(ladder.front()), truth_params);
}

NoiseSpec replicate_noise(const ExperimentSpec& spec, long long n, int replicate) {
    NoiseSpec noise;
    noise.sigma = spec.sigma;
    noise.n = n;
    // keyed by n so that editing the ladder leaves other points untouched
    noise.seed = counter_hash(spec.seed, static_cast<std::uint64_t>(n), 0x6c6164646572ULL);
    noise.replicate = static_cast<std::uint64_t>(replicate);
    return noise;
}

namespace {

TorusSignal soft_threshold_estimate(const Observations& obs, const Frame& frame) {
    CoefficientVector c = obs.coefficients;
    for (double& v : c.values) {
        const double mag = std::max(0.0, std::abs(v) - obs.gamma);
        v = std::copysign(mag, v);
    }
    return frame.adjoint(c);
}

} // namespace

ReplicateOutcome run_replicate(const ExperimentSpec& spec, std::size_t ladder_index, int replicate) {
    const long long n = spec.ladder.at(ladder_index);
    const int side = spec.side_for(n);
    const TorusSignal truth = truth_library(spec.truth, spec.dim, side, spec.truth_params).signal;
    const NoiseSpec noise = replicate_noise(spec, n, replicate);
    const TorusSignal pixels = simulate_pixels(truth, noise);
    const auto frame = make_frame(spec.frame, spec.dim, n, side);
    const Observations obs = observe_pixels(pixels, *frame, noise, spec.kappa);

    ReplicateOutcome out;
    out.truth_feasible = max_abs(frame->analyze(pixels - truth)) <= obs.gamma;

    TorusSignal estimate;
    switch (spec.estimator) {
    case EstimatorKind::frame_tv: {
        SolverResult r = solve_frame_constrained_tv(obs, *frame, spec.solver);
        out.converged = r.converged;
        out.iterations = r.iterations;
        out.status = r.status;
        estimate = std::move(r.estimate);
        break;
    }
    case EstimatorKind::rof_oracle: {
        const auto lambdas = spec.rof_lambdas.empty() ? default_rof_lambdas() : spec.rof_lambdas;
        double best = std::numeric_limits<double>::infinity();
        for (double lambda : lambdas) {
            SolverResult r = solve_rof(pixels, lambda, spec.solver);
            const double risk = lq_norm(r.estimate - truth, spec.q);
            out.iterations += r.iterations;
            if (risk < best) {
                best = risk;
                out.converged = r.converged;
                out.status = r.status;
                estimate = std::move(r.estimate);
            }
        }
        break;
    }
    case EstimatorKind::wavelet_threshold:
        estimate = soft_threshold_estimate(obs, *frame);
        out.status = "closed_form";
        break;
    case EstimatorKind::identity:
        estimate = pixels;
        out.status = "closed_form";
        break;
    }
    out.risk = lq_norm(estimate - truth, spec.q);
    return out;
}

namespace {

struct Normal3 {
    // least squares for y ~ b0 + b1 x + b2 x^2; returns b and (X'X)^{-1}
    std::array<double, 3> b{};
    std::array<std::array<double, 3>, 3> inv{};
    double ssr = 0.0;
};

Normal3 quadratic_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::array<std::array<double, 3>, 3> a{};
    std::array<double, 3> r{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::array<double, 3> row{1.0, x[i], x[i] * x[i]};
        for (int p = 0; p < 3; ++p) {
            r[p] += row[p] * y[i];
            for (int q = 0; q < 3; ++q) {
                a[p][q] += row[p] * row[q];
            }
        }
    }
    // Gauss-Jordan on [a | I]
    std::array<std::array<double, 6>, 3> m{};
    for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) {
            m[p][q] = a[p][q];
        }
        m[p][3 + p] = 1.0;
    }
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int p = c + 1; p < 3; ++p) {
            if (std::abs(m[p][c]) > std::abs(m[piv][c])) {
                piv = p;
            }
        }
        if (m[piv][c] == 0.0) {
            throw std::invalid_argument("fit_rate: degenerate ladder");
        }
        std::swap(m[c], m[piv]);
        const double d = m[c][c];
        for (double& v : m[c]) {
            v /= d;
        }
        for (int p = 0; p < 3; ++p) {
            if (p != c) {
                const double f = m[p][c];
                for (int q = 0; q < 6; ++q) {
                    m[p][q] -= f * m[c][q];
                }
            }
        }
    }
    Normal3 out;
    for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) {
            out.inv[p][q] = m[p][3 + q];
            out.b[p] += out.inv[p][q] * r[q];
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (out.b[0] + out.b[1] * x[i] + out.b[2] * x[i] * x[i]);
        out.ssr += e * e;
    }
    return out;
}

void log_pairs(const std::vector<std::pair<double, double>>& points, std::vector<double>& x, std::vector<double>& y,
               std::size_t min_points) {
    if (points.size() < min_points) {
        throw std::invalid_argument("fit_rate: need at least " + std::to_string(min_points) + " points");
    }
    x.clear();
    y.clear();
    for (const auto& [n, risk] : points) {
        if (!(n > 0.0) || !(risk > 0.0) || !std::isfinite(n) || !std::isfinite(risk)) {
            throw std::invalid_argument("fit_rate: n and risk must be positive and finite");
        }
        x.push_back(std::log(n));
        y.push_back(std::log(risk));
    }
}

} // namespace

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    std::vector<double> x, y;
    log_pairs(points, x, y, 3);
    const double k = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_rate: degenerate ladder (all n equal)");
    }
    RateFit fit;
    fit.points = static_cast<int>(x.size());
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - fit.intercept - fit.slope * x[i];
        ssr += e * e;
    }
    fit.stderr_slope = std::sqrt(ssr / (k - 2.0) / sxx);
    return fit;
}

CurvatureTest curvature_test(const std::vector<std::pair<double, double>>& points, double level) {
    CurvatureTest t;
    if (points.size() < 4) {
        return t;
    }
    std::vector<double> x, y;
    log_pairs(points, x, y, 4);
    double mx = 0.0;
    for (double v : x) {
        mx += v;
    }
    mx /= static_cast<double>(x.size());
    for (double& v : x) {
        v -= mx;  // centring keeps the normal equations well conditioned
    }
    const Normal3 f = quadratic_fit(x, y);
    const double df = static_cast<double>(x.size()) - 3.0;
    t.applicable = true;
    t.coefficient = f.b[2];
    const double s2 = f.ssr / df;
    const double se = std::sqrt(s2 * f.inv[2][2]);
    double my = 0.0, syy = 0.0, x_range = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        my += y[i] / static_cast<double>(y.size());
        x_range = std::max(x_range, std::abs(x[i]));
    }
    for (double v : y) {
        syy += (v - my) * (v - my);
    }
    // an exact fit leaves no residual scale; judge the quadratic term by size alone
    const bool exact = f.ssr <= 1e-24 * std::max(syy, 1e-300);
    if (exact) {
        const bool curved = std::abs(f.b[2]) * x_range * x_range > 1e-9 * (1.0 + std::sqrt(syy));
        t.t_statistic = curved ? std::copysign(std::numeric_limits<double>::infinity(), f.b[2]) : 0.0;
        t.p_value = curved ? 0.0 : 1.0;
    } else if (se > 0.0) {
        t.t_statistic = f.b[2] / se;
        const boost::math::students_t dist(df);
        t.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t.t_statistic)));
    } else {
        t.t_statistic = f.b[2] == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), f.b[2]);
        t.p_value = f.b[2] == 0.0 ? 1.0 : 0.0;
    }
    t.fired = t.p_value < level;
    return t;
}

RateAnalysis analyze_rate(const std::vector<std::pair<double, double>>& points) {
    RateAnalysis a;
    a.all = fit_rate(points);
    a.curvature = curvature_test(points);
    if (a.curvature.fired) {
        auto rest = points;
        const auto smallest = std::min_element(rest.begin(), rest.end(),
                                               [](const auto& l, const auto& r) { return l.first < r.first; });
        rest.erase(smallest);
        a.dropped = fit_rate(rest);
    }
    return a;
}

RiskReport estimate_risk(const ExperimentSpec& spec, int threads) {
    spec.validate();
    RiskReport report;
    report.spec = spec;
    report.target = target_exponent(spec.dim, spec.q);

    const std::size_t points = spec.ladder.size();
    const auto reps = static_cast<std::size_t>(spec.replicates);
    const std::size_t tasks = points * reps;
    std::vector<ReplicateOutcome> results(tasks);

    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks) {
                return;
            }
            try {
                results[t] = run_replicate(spec, t / reps, static_cast<int>(t % reps));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(tasks);
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) {
            pool.emplace_back(work);
        }
        work();
    }
    if (error) {
        std::rethrow_exception(error);
    }

    // ordered reduction
    std::vector<std::pair<double, double>> fit_points;
    for (std::size_t i = 0; i < points; ++i) {
        RiskPoint p;
        p.n = spec.ladder[i];
        p.side = spec.side_for(p.n);
        p.card = omega_cardinality(spec.frame, spec.dim, p.n, p.side);
        p.gamma = gamma_universal(spec.kappa, spec.sigma, p.n, p.card);
        double sum = 0.0, feasible = 0.0, iters = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& o = results[i * reps + r];
            p.risks.push_back(o.risk);
            p.converged.push_back(o.converged);
            feasible += o.truth_feasible ? 1.0 : 0.0;
            iters += o.iterations;
            if (o.converged) {
                sum += o.risk;
                ++p.reps;
            } else {
                ++p.excluded;
            }
        }
        p.feas_freq = feasible / static_cast<double>(reps);
        p.converged_frac = static_cast<double>(p.reps) / static_cast<double>(reps);
        p.mean_iterations = iters / static_cast<double>(reps);
        if (p.reps > 0) {
            p.mean_risk = sum / p.reps;
            double ss = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                if (p.converged[r]) {
                    ss += (p.risks[r] - p.mean_risk) * (p.risks[r] - p.mean_risk);
                }
            }
            p.stderr_risk = p.reps > 1 ? std::sqrt(ss / (p.reps - 1) / p.reps) : 0.0;
            if (p.mean_risk > 0.0) {
                fit_points.emplace_back(static_cast<double>(p.n), p.mean_risk);
            }
        } else {
            p.mean_risk = std::numeric_limits<double>::quiet_NaN();
            p.stderr_risk = std::numeric_limits<double>::quiet_NaN();
        }
        if (p.excluded > 0) {
            report.warnings.push_back("n = " + std::to_string(p.n) + ": excluded " + std::to_string(p.excluded) +
                                      " non-converged replicate(s)");
        }
        report.total_excluded += p.excluded;
        report.total_replicates += static_cast<int>(reps);
        report.points.push_back(std::move(p));
    }
    if (report.total_excluded > 0.05 * report.total_replicates) {
        report.failed = true;
        report.warnings.push_back("more than 5% of replicates did not converge (" +
                                  std::to_string(report.total_excluded) + " of " +
                                  std::to_string(report.total_replicates) + ")");
    }
    if (fit_points.size() >= 3) {
        report.fit = analyze_rate(fit_points);
    } else if (points >= 3) {
        report.warnings.push_back("fewer than 3 ladder points with a positive mean risk; no slope fitted");
    }
    return report;
}

} // namespace ftv
