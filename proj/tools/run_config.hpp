#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ftv/analysis.hpp"
#include "ftv/frame.hpp"
#include "ftv/solver.hpp"

namespace ftv::cli {

struct DenoiseConfig {
    std::string input;
    int dim = 0;  // 0: accept any; otherwise the input must match
    std::optional<double> sigma;
    bool estimate_sigma = false;
    double kappa = 1.4142135623730951;
    long long n = 0;  // 0: N^d
    FrameDescriptor frame;
    SolverConfig solver;
};

struct SimulateConfig {
    std::string truth = "step1d";
    nlohmann::json truth_params = nlohmann::json::object();
    int dim = 1;
    int side = 1024;
    double sigma = 0.5;
    long long n = 0;
    double kappa = 1.4142135623730951;
    FrameDescriptor frame;
    std::uint64_t replicate = 0;
    std::string format = "tsig";
};

struct BenchConfig {
    ExperimentSpec experiment;  // its seed comes from the run

    BenchConfig() {
        experiment.ladder = {256, 512, 1024, 2048};
        experiment.replicates = 10;
    }
};

/// Signal source for diagnose: a file, a named truth, a single wavelet atom,
/// the zero signal, or i.i.d. bounded noise (seeded by the run).
struct DiagnoseSource {
    std::string kind = "truth";  // file | truth | atom | zero | random_bounded
    std::string path;
    std::string truth = "step_ramp1d";
    nlohmann::json truth_params = nlohmann::json::object();
    int dim = 1;
    int side = 256;
    int scale = 1;
    std::array<int, 3> position{0, 0, 0};
    int type = 1;
};

struct CorpusConfig {
    int dim = 2;
    int side = 32;
    int count = 100;
    double q = 2.0;
};

struct DiagnoseConfig {
    DiagnoseSource source;
    double q = 0.0;   // 0: 2 for d <= 2, (d+2)/d otherwise
    long long n = 0;  // 0: N^d
    int vanishing_moments = 3;
    FrameDescriptor madic = FrameDescriptor::madic();
    std::optional<CorpusConfig> corpus;
};

struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out = "ftv_out";
    DenoiseConfig denoise;
    SimulateConfig simulate;
    BenchConfig bench;
    DiagnoseConfig diagnose;
};

/// Only the section of `command` is serialized.
nlohmann::json to_json(const RunConfig& cfg);
/// Strict: unknown keys, a section for another command or a mismatched
/// command name throw.
void merge_json(RunConfig& cfg, const nlohmann::json& j);

} // namespace ftv::cli
