#pragma once

// Configuration documents for the four commands, with strict parsing and
// canonical emission (parse(emit(x)) reproduces x exactly).

#include <cstdint>
#include <string>
#include <vector>

#include "convexify.hpp"
#include "io/json_reader.hpp"
#include "monte_carlo.hpp"
#include "planner/sim.hpp"

namespace ccplan::io {

struct SeedSpec
{
    std::uint64_t base = 1;
    int runs = 1;
};

struct ScenarioSpec
{
    Scenario scenario;
    SeedSpec seeds;
};

struct ContourSpec
{
    ContourConfig contour;
    double delta = 1e-3;
    std::uint64_t seed = 1;
};

struct Range
{
    double min = 0.0;
    double max = 0.0;
    int n = 1;

    double at(int i) const { return n == 1 ? min : min + (max - min) * i / (n - 1); }
};

struct ConservatismSpec
{
    double a = 4.0;
    double b = 2.0;
    Range rho;
    Range sigma_ratio;  ///< sigma_x / sigma_y with sigma_y = 1
};

enum class BoxMode { PA, US1, US2, Mixed };

std::string_view to_string(BoxMode m);

struct BboxEntry
{
    std::string label;
    Cov2 cov;  ///< deviation covariance in the ego-aligned frame
    HeadingStats heading;
    double delta = 1e-3;
};

struct BboxSpec
{
    RectShape ego_shape{2.5, 1.0};
    RectShape ov_shape{2.5, 1.0};
    int n_phi = 20;
    std::vector<BoxMode> modes;
    std::vector<BboxEntry> entries;
    int boundary_samples = 64;  ///< points per box edge checked against delta
    std::uint64_t mc_samples = 0;  ///< Monte Carlo samples at each corner, 0 skips
    std::uint64_t seed = 1;
};

ScenarioSpec parse_scenario(const Json& j);
ContourSpec parse_contours(const Json& j);
ConservatismSpec parse_conservatism(const Json& j);
BboxSpec parse_bbox(const Json& j);

Json emit_scenario(const ScenarioSpec& s);
Json emit_contours(const ContourSpec& s);
Json emit_conservatism(const ConservatismSpec& s);
Json emit_bbox(const BboxSpec& s);

}  // namespace ccplan::io
