#pragma once

#include <ostream>
#include <stdexcept>

#include "run_config.hpp"

namespace ftv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

/// Thrown for problems the user can fix (bad input, missing flags); exit 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int run_denoise(const RunConfig& cfg, std::ostream& log);
int run_simulate(const RunConfig& cfg, std::ostream& log);
int run_bench(const RunConfig& cfg, std::ostream& log);
int run_diagnose(const RunConfig& cfg, std::ostream& log);

} // namespace ftv::cli
