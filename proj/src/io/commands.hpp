#pragma once

// The four experiment commands: read a config, compute, write result files
// into an output directory and return the summary document.

#include <cstdint>
#include <optional>
#include <string>

#include "io/config.hpp"

namespace ccplan::io {

struct CommandOptions
{
    std::optional<std::uint64_t> seed;  ///< overrides the config seed
    int workers = 1;
    std::optional<int> runs;                ///< simulate: overrides seeds.runs
    PlannerMode mode = PlannerMode::ConvexPA;
    std::optional<PlannerMode> baseline;    ///< simulate: also run this mode on the same seeds
    bool timing = false;                    ///< simulate: record wall-clock solve times
};

Json run_contours(const ContourSpec& spec, const std::string& out_dir, const CommandOptions& opts);
Json run_conservatism(const ConservatismSpec& spec, const std::string& out_dir,
                      const CommandOptions& opts);
Json run_bbox(const BboxSpec& spec, const std::string& out_dir, const CommandOptions& opts);
Json run_simulate(const ScenarioSpec& spec, const std::string& out_dir, const CommandOptions& opts);

/// Dispatches on "contours", "conservatism", "bbox" or "simulate".
Json run_command(const std::string& command, const std::string& config_path,
                 const std::string& out_dir, const CommandOptions& opts);

/// Deterministic JSON text (two-space indent, trailing newline).
std::string dump_json(const Json& j);

}  // namespace ccplan::io
