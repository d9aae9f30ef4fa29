#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "modsim/sim_engine.hpp"

namespace modsim {

enum class TraceFormat { csv, jsonl };

TraceFormat parse_trace_format(std::string_view text);

/// Writes the trace into `dir` as one file per record kind
/// (traversals, requests, rebalancing, occupancy, audits) plus
/// trace_meta.json. Returns the paths written, in a fixed order.
std::vector<std::filesystem::path> write_trace(const SimTrace& trace,
                                               const std::filesystem::path& dir,
                                               TraceFormat format);

/// Reads a trace written by write_trace (either format).
SimTrace read_trace(const std::filesystem::path& dir);

}  // namespace modsim
