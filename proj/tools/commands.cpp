#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "ftv/noise.hpp"
#include "ftv/signal_io.hpp"
#include "ftv/truth.hpp"
#include "ftv/wavelet.hpp"

namespace ftv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path output_dir(const RunConfig& cfg) {
    const fs::path out = cfg.out;
    fs::create_directories(out);
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot write " + path.string());
    }
    f << text;
}

std::string hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

} // namespace

int run_denoise(const RunConfig& cfg, std::ostream& log) {
    const auto& c = cfg.denoise;
    if (c.input.empty()) {
        throw UsageError("denoise: --input is required");
    }
    if (!c.sigma && !c.estimate_sigma) {
        throw UsageError("denoise: pass --sigma VALUE or --estimate-sigma");
    }
    if (c.sigma && c.estimate_sigma) {
        throw UsageError("denoise: --sigma and --estimate-sigma are mutually exclusive");
    }
    TorusSignal pixels;
    try {
        pixels = io::read_signal(c.input);
    } catch (const std::exception& e) {
        throw UsageError(std::string("denoise: cannot read input: ") + e.what());
    }
    if (c.dim != 0 && pixels.dim() != c.dim) {
        throw UsageError("denoise: input is " + std::to_string(pixels.dim()) + "-dimensional, expected " +
                         std::to_string(c.dim));
    }
    const long long n = c.n > 0 ? c.n : static_cast<long long>(pixels.size());
    if (n > static_cast<long long>(pixels.size())) {
        throw UsageError("denoise: n exceeds the number of input samples");
    }
    const double sigma = c.sigma ? *c.sigma : estimate_sigma_mad(pixels, n);
    if (!(sigma > 0.0)) {
        throw UsageError("denoise: sigma must be positive (the estimate was " + std::to_string(sigma) + ")");
    }

    const auto frame = make_frame(c.frame, pixels.dim(), n, pixels.side());
    NoiseSpec noise;
    noise.sigma = sigma;
    noise.n = n;
    const Observations obs = observe_pixels(pixels, *frame, noise, c.kappa);
    const SolverResult res = solve_frame_constrained_tv(obs, *frame, c.solver);

    const CoefficientVector fitted = frame->analyze(res.estimate);
    double feasibility = 0.0;
    for (std::size_t i = 0; i < fitted.size(); ++i) {
        feasibility = std::max(feasibility, std::abs(fitted.values[i] - obs.coefficients.values[i]));
    }

    const fs::path out = output_dir(cfg);
    const fs::path estimate_path = out / ("estimate" + fs::path(c.input).extension().string());
    io::write_signal(estimate_path, res.estimate);
    json report = {{"input", c.input},
                   {"estimate", estimate_path.string()},
                   {"dim", pixels.dim()},
                   {"side", pixels.side()},
                   {"n", n},
                   {"sigma", sigma},
                   {"sigma_estimated", c.estimate_sigma},
                   {"kappa", c.kappa},
                   {"frame", to_json(c.frame)},
                   {"card_omega", frame->size()},
                   {"gamma", obs.gamma},
                   {"feasibility", feasibility},
                   {"solver", to_json(res)}};
    report["solver"].erase("history");
    write_text(out / "report.json", report.dump(2) + "\n");
    log << "denoise: " << res.status << " after " << res.iterations << " iterations, bv " << res.objective
        << ", gamma " << obs.gamma << "\n";
    return res.converged ? kExitOk : kExitNotConverged;
}

int run_simulate(const RunConfig& cfg, std::ostream& log) {
    const auto& c = cfg.simulate;
    if (c.format != "tsig" && c.format != "csv" && c.format != "pgm") {
        throw UsageError("simulate: format must be tsig, csv or pgm");
    }
    if ((c.format == "csv" && c.dim != 1) || (c.format == "pgm" && c.dim != 2)) {
        throw UsageError("simulate: csv holds 1D signals and pgm holds 2D signals");
    }
    Truth truth;
    try {
        truth = truth_library(c.truth, c.dim, c.side, c.truth_params);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("simulate: ") + e.what());
    }
    NoiseSpec noise;
    noise.sigma = c.sigma;
    noise.n = c.n;
    noise.seed = cfg.seed;
    noise.replicate = c.replicate;
    const TorusSignal pixels = simulate_pixels(truth.signal, noise);
    const long long n = noise.effective_n(c.dim, c.side);
    const auto frame = make_frame(c.frame, c.dim, n, c.side);
    const Observations obs = observe_pixels(pixels, *frame, noise, c.kappa);

    const fs::path out = output_dir(cfg);
    io::write_signal(out / ("truth." + c.format), truth.signal);
    io::write_signal(out / ("pixels." + c.format), pixels);
    json obs_json = {{"truth", c.truth},
                     {"truth_bound", truth.bound},
                     {"n", n},
                     {"sigma", c.sigma},
                     {"pixel_sd", noise.pixel_sd(c.dim, c.side)},
                     {"kappa", c.kappa},
                     {"gamma", obs.gamma},
                     {"card_omega", frame->size()},
                     {"frame", to_json(c.frame)},
                     {"seed", cfg.seed},
                     {"replicate", c.replicate},
                     {"coefficients", obs.coefficients.values}};
    write_text(out / "observations.json", obs_json.dump(2) + "\n");
    log << "simulate: wrote " << c.truth << " (" << c.dim << "D, N=" << c.side << ", n=" << n << ") to " << out.string()
        << "\n";
    return kExitOk;
}

int run_bench(const RunConfig& cfg, std::ostream& log) {
    ExperimentSpec spec = cfg.bench.experiment;
    spec.seed = cfg.seed;
    RiskReport report;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("bench: ") + e.what());
    }
    report = estimate_risk(spec, cfg.threads);
    const fs::path out = output_dir(cfg);
    write_text(out / "risk.csv", to_csv(report));
    write_text(out / "risk.json", to_json(report).dump(2) + "\n");
    write_text(out / "risk.svg", to_svg(report));
    for (const auto& w : report.warnings) {
        log << "warning: " << w << "\n";
    }
    for (const auto& p : report.points) {
        log << "n=" << p.n << " mean risk " << p.mean_risk << " +- " << p.stderr_risk << " (" << p.reps
            << " reps)\n";
    }
    if (report.fit) {
        log << "slope " << report.fit->primary().slope << " +- " << report.fit->primary().stderr_slope
            << ", target " << report.target << (report.fit->dropped ? " (smallest n dropped)" : "") << "\n";
    }
    return report.failed ? kExitNotConverged : kExitOk;
}

namespace {

TorusSignal diagnose_signal(const DiagnoseSource& s, std::uint64_t seed) {
    if (s.kind == "file") {
        try {
            return io::read_signal(s.path);
        } catch (const std::exception& e) {
            throw UsageError(std::string("diagnose: cannot read input: ") + e.what());
        }
    }
    if (s.dim < 1 || s.dim > 3 || s.side < 2 || !is_power_of_two(s.side)) {
        throw UsageError("diagnose: source needs d in 1..3 and a power-of-two side >= 2");
    }
    if (s.kind == "truth") {
        try {
            return truth_library(s.truth, s.dim, s.side, s.truth_params).signal;
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("diagnose: ") + e.what());
        }
    }
    if (s.kind == "zero") {
        return TorusSignal(s.dim, s.side);
    }
    if (s.kind == "random_bounded") {
        return random_bounded_signal(s.dim, s.side, seed);
    }
    // atom, grid-normalized
    const PeriodicDwt dwt(s.dim, s.side, 3);
    if (s.scale < 0 || (1 << s.scale) >= s.side || s.type < 0 || s.type >= (1 << s.dim) ||
        (s.scale > 0 && s.type == 0)) {
        throw UsageError("diagnose: atom scale/type out of range");
    }
    for (int a = 0; a < s.dim; ++a) {
        if (s.position[a] < 0 || s.position[a] >= (1 << s.scale)) {
            throw UsageError("diagnose: atom position out of range");
        }
    }
    TorusSignal atom(s.dim, s.side);
    atom[dwt.flat_index(s.scale, s.position, s.type)] = std::sqrt(static_cast<double>(atom.size()));
    dwt.inverse(atom.values());
    return atom;
}

} // namespace

int run_diagnose(const RunConfig& cfg, std::ostream& log) {
    const auto& c = cfg.diagnose;
    const TorusSignal s = diagnose_signal(c.source, cfg.seed);
    const int d = s.dim();
    const long long n = c.n > 0 ? c.n : static_cast<long long>(s.size());
    if (n > static_cast<long long>(s.size()) || n < (1LL << d)) {
        throw UsageError("diagnose: n must lie in 2^d..N^d");
    }
    const double q = c.q > 0.0 ? c.q : (d <= 2 ? 2.0 : (d + 2.0) / d);

    json checks;
    bool all = true;
    const auto parseval = check_parseval(s, c.vanishing_moments);
    checks["parseval"] = {{"status", parseval.holds ? "pass" : "fail"},
                          {"energy", parseval.energy},
                          {"coefficient_energy", parseval.coefficient_energy},
                          {"relative_error", parseval.relative_error}};
    all = all && parseval.holds;

    const auto jackson = check_jackson(s, n, c.vanishing_moments);
    checks["jackson"] = {{"status", jackson.holds ? "pass" : "fail"},
                         {"besov_all_scales", jackson.besov_all},
                         {"omega_max", jackson.omega_max},
                         {"sup", jackson.sup},
                         {"psi_l1", jackson.psi_l1},
                         {"constant", jackson.constant},
                         {"rhs", jackson.rhs}};
    all = all && jackson.holds;

    if (!(sup_norm(s) > 0.0)) {
        checks["interpolation"] = {{"status", "skipped"}, {"reason", "zero signal"}};
    } else {
        try {
            const auto r = check_interpolation(s, q, n, c.vanishing_moments);
            checks["interpolation"] = {{"status", "pass"},
                                       {"q", q},
                                       {"ratio", r.ratio},
                                       {"ratio_hex", hex(r.ratio)},
                                       {"lq", r.lq},
                                       {"besov", r.besov},
                                       {"bv_norm", r.bv_norm},
                                       {"log_term", r.log_term},
                                       {"tail_term", r.tail_term}};
        } catch (const std::invalid_argument& e) {
            checks["interpolation"] = {{"status", "skipped"}, {"reason", e.what()}};
        }
    }

    const auto lm = check_local_means(s, c.madic, n);
    checks["local_means"] = {{"status", lm.holds ? "pass" : "fail"},
                             {"local_means", lm.local_means},
                             {"l2", lm.l2},
                             {"besov", lm.besov},
                             {"ratio_to_besov", lm.ratio_to_besov}};
    all = all && lm.holds;

    json result = {{"dim", d}, {"side", s.side()}, {"n", n}, {"checks", checks}, {"all_passed", all}};
    if (c.corpus) {
        const auto cc = interpolation_corpus(c.corpus->dim, c.corpus->side, c.corpus->q, c.corpus->count, cfg.seed);
        result["corpus"] = {{"dim", cc.dim},
                            {"side", cc.side},
                            {"q", cc.q},
                            {"count", cc.count},
                            {"seed", cc.seed},
                            {"max_ratio", finite_or_null(cc.max_ratio)},
                            {"max_ratio_hex", hex(cc.max_ratio)},
                            {"min_ratio", finite_or_null(cc.min_ratio)},
                            {"min_ratio_hex", hex(cc.min_ratio)}};
        log << "corpus constant " << cc.max_ratio << " over " << cc.count << " signals\n";
    }
    write_text(output_dir(cfg) / "diagnose.json", result.dump(2) + "\n");
    log << "diagnose: " << (all ? "all checks passed" : "some checks failed") << "\n";
    return kExitOk;
}

} // namespace ftv::cli
