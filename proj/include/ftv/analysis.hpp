#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ftv/frame.hpp"
#include "ftv/grid.hpp"
#include "ftv/noise.hpp"
#include "ftv/solver.hpp"

namespace ftv {

/// -min{1/(d+2), 1/(dq)}; kinks at q = 1 + 2/d.
double target_exponent(int dim, double q);

enum class EstimatorKind { frame_tv, rof_oracle, wavelet_threshold, identity };

std::string estimator_name(EstimatorKind e);
EstimatorKind estimator_from_name(const std::string& name);

struct ExperimentSpec {
    int dim = 1;
    double q = 2.0;
    std::string truth = "step_ramp1d";
    nlohmann::json truth_params = nlohmann::json::object();
    FrameDescriptor frame;
    double kappa = 1.4142135623730951;
    double sigma = 0.5;
    std::vector<long long> ladder;
    int replicates = 20;
    SolverConfig solver;
    EstimatorKind estimator = EstimatorKind::frame_tv;
    std::uint64_t seed = 0;
    // 0 couples the grid to the ladder (N^d = n); otherwise a fixed N with n <= N^d.
    int grid_side = 0;
    // rof_oracle only; empty selects the default geometric grid.
    std::vector<double> rof_lambdas;

    void validate() const;
    int side_for(long long n) const;
};

nlohmann::json to_json(const FrameDescriptor& frame);
FrameDescriptor frame_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentSpec& spec);
/// Strict: unknown keys throw. Missing keys keep their defaults.
ExperimentSpec experiment_from_json(const nlohmann::json& j);

/// Default oracle grid: 25 values, geometric over [1e-5, 1e1].
std::vector<double> default_rof_lambdas();

struct ReplicateOutcome {
    double risk = 0.0;
    bool converged = true;
    bool truth_feasible = false;  // max |<phi, noise>| <= gamma
    int iterations = 0;
    std::string status;
};

/// Noise stream of one replicate; seeds are keyed by n, not by ladder position.
NoiseSpec replicate_noise(const ExperimentSpec& spec, long long n, int replicate);

/// One replicate of one ladder point; a pure function of (spec, index, rep).
ReplicateOutcome run_replicate(const ExperimentSpec& spec, std::size_t ladder_index, int replicate);

struct RiskPoint {
    long long n = 0;
    int side = 0;
    std::size_t card = 0;  // #Omega_n
    double gamma = 0.0;
    double mean_risk = 0.0;  // over converged replicates
    double stderr_risk = 0.0;
    int reps = 0;       // converged replicates used
    int excluded = 0;
    double feas_freq = 0.0;
    double converged_frac = 0.0;
    double mean_iterations = 0.0;
    std::vector<double> risks;  // every replicate, in order
    std::vector<bool> converged;
};

struct RateFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};

struct CurvatureTest {
    bool applicable = false;  // needs >= 4 points
    double coefficient = 0.0;
    double t_statistic = 0.0;
    double p_value = 1.0;
    bool fired = false;  // p < 0.05
};

struct RateAnalysis {
    RateFit all;
    CurvatureTest curvature;
    std::optional<RateFit> dropped;  // smallest n removed, when the test fires

    const RateFit& primary() const { return dropped ? *dropped : all; }
};

/// OLS of log(risk) on log(n). Needs >= 3 points, distinct n, positive risks.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);
CurvatureTest curvature_test(const std::vector<std::pair<double, double>>& points, double level = 0.05);
RateAnalysis analyze_rate(const std::vector<std::pair<double, double>>& points);

struct RiskReport {
    ExperimentSpec spec;
    std::vector<RiskPoint> points;
    double target = 0.0;
    std::optional<RateAnalysis> fit;  // only with >= 3 successful points
    int total_excluded = 0;
    int total_replicates = 0;
    bool failed = false;  // exclusions above 5%
    std::vector<std::string> warnings;
};

/// Replicates run on `threads` workers (0: hardware concurrency); the
/// reduction is in ladder/replicate order, so results do not depend on it.
RiskReport estimate_risk(const ExperimentSpec& spec, int threads = 0);

std::string risk_csv_header();
std::string to_csv(const RiskReport& report);
nlohmann::json to_json(const RiskReport& report);
/// Log-log plot of risk against n with a guide line of the target slope.
std::string to_svg(const RiskReport& report);

// ---- diagnostics ----

struct InterpolationReport {
    int dim = 0;
    double q = 0.0;
    long long n = 0;
    double lq = 0.0;
    double besov = 0.0;    // full grid depth
    double bv_norm = 0.0;  // L1 norm plus bv seminorm
    double sup = 0.0;
    double log_term = 0.0;   // d = 1: log(n) besov^{2/3} bv_norm^{1/3}
    double tail_term = 0.0;  // d = 1: n^{-1} sup^{2/3} bv_norm^{1/3}
    double denominator = 0.0;
    double ratio = 0.0;
};

/// d >= 2 requires q <= (d+2)/d, d = 1 requires q <= 3; n = 0 means N^d.
/// Zero signals are rejected.
InterpolationReport check_interpolation(const TorusSignal& s, double q, long long n = 0, int vanishing_moments = 3);

struct JacksonReport {
    long long n = 0;
    double besov_all = 0.0;  // every scale the grid resolves
    double omega_max = 0.0;  // scales in Omega_n
    double sup = 0.0;
    double psi_l1 = 0.0;
    double constant = 0.0;  // 2^{d/2} psi_l1
    double rhs = 0.0;
    bool holds = false;
};

/// max over types e and scales of 2^{jd/2} |psi_{j,0,e}|_{L1}, from materialized atoms.
double wavelet_l1_constant(int dim, int side, int vanishing_moments = 3);
JacksonReport check_jackson(const TorusSignal& s, long long n, int vanishing_moments = 3);

struct ParsevalReport {
    double energy = 0.0;        // |s|_2^2
    double coefficient_energy = 0.0;
    double relative_error = 0.0;
    bool holds = false;  // <= 1e-10
};

ParsevalReport check_parseval(const TorusSignal& s, int vanishing_moments = 3);

struct LocalMeansReport {
    long long n = 0;
    double local_means = 0.0;
    double l2 = 0.0;
    double besov = 0.0;  // wavelet form, full grid depth
    double ratio_to_besov = 0.0;
    bool holds = false;  // local means <= |s|_2 (unit-norm kernels)
};

LocalMeansReport check_local_means(const TorusSignal& s, const FrameDescriptor& madic, long long n);

/// Reproducible random members of BV: piecewise constant steps (d = 1),
/// random rectangles (d = 2).
TorusSignal random_bv_signal(int dim, int side, std::uint64_t seed);
/// I.i.d. uniform samples on [-1, 1].
TorusSignal random_bounded_signal(int dim, int side, std::uint64_t seed);

struct CorpusConstant {
    int dim = 0;
    double q = 0.0;
    int side = 0;
    int count = 0;
    std::uint64_t seed = 0;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
};

/// Largest interpolation ratio over `count` seeded random BV signals.
CorpusConstant interpolation_corpus(int dim, int side, double q, int count, std::uint64_t seed);

// ---- lower-bound instances ----

struct AssouadOptions {
    double bound = 1.0;  // L
    double q = 2.0;      // separation norm
    int vanishing_moments = 3;
};

struct AssouadFamily {
    int scale = 0;
    double amplitude = 0.0;
    std::vector<FrameIndex> support;  // R_j, pairwise disjoint atoms
    std::vector<std::vector<int>> patterns;
    std::vector<TorusSignal> signals;
    double psi_sup = 0.0;   // sup of one grid atom at scale j
    double psi_bv = 0.0;    // bv of one grid atom
    double delta = 0.0;     // amplitude * |psi_j|_{L^q}
    double amplitude_cap = 0.0;
};

/// Size of R_j: floor(2^{j(d-1)}).
std::size_t assouad_support_size(int dim, int scale);
/// Largest admissible amplitude for g0 = 0-like centres within BV_{L/2}.
double assouad_max_amplitude(int dim, int side, int scale, const AssouadOptions& opt = {});
/// Pattern p flips coordinate i when bit i of p is set. Amplitudes above the
/// cap or signals failing the BV_L certificate throw.
AssouadFamily assouad_family(int scale, double amplitude, const TorusSignal& g0, int count,
                             const AssouadOptions& opt = {});

} // namespace ftv
