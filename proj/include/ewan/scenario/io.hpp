#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "ewan/scenario/scenario.hpp"

namespace ewan::scenario {

/// Raised for unreadable, malformed or invalid scenario files.
class LoadError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Writes `s` as `path` plus one CSV per trace in `<stem>_traces/`, referenced
/// by relative path. Doubles are written with 17 significant digits, so a
/// save/load round trip is exact.
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// Reads and validates a scenario file. Missing keys take their defaults.
Scenario load_scenario(const std::filesystem::path& path);

/// Trace CSV with header `time_s,power_w`; times must step by `resolution`.
energy::HarvestTrace read_trace_csv(const std::filesystem::path& path, Duration resolution);
void write_trace_csv(const std::filesystem::path& path, const energy::HarvestTrace& trace);

}  // namespace ewan::scenario
