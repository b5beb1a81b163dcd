#pragma once

#include <filesystem>

#include "ftv/grid.hpp"

namespace ftv::io {

enum class SignalFormat { csv, pgm, tsig };

/// Picks the format from the file extension (.csv, .pgm, .tsig).
SignalFormat format_from_path(const std::filesystem::path& path);

TorusSignal read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const TorusSignal& s);

/// Binary P5 with maxval 65535. The value range is stored in `<path>.json`
/// as {"min": .., "max": ..}; without a sidecar the samples are read as v/65535.
TorusSignal read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const TorusSignal& s);
std::filesystem::path pgm_sidecar(const std::filesystem::path& path);

/// Little-endian {"TSIG", u32 version = 1, u32 d, u32 N} + N^d float64.
TorusSignal read_tsig(const std::filesystem::path& path);
void write_tsig(const std::filesystem::path& path, const TorusSignal& s);

TorusSignal read_signal(const std::filesystem::path& path);
void write_signal(const std::filesystem::path& path, const TorusSignal& s);

} // namespace ftv::io
