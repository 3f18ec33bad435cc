#pragma once

// Sampling estimate of the true collision probability and the relative-mean
// probability grid used for contour plots.

#include <cstdint>
#include <vector>

#include "collision_prob.hpp"

namespace ccplan {

struct McEstimate
{
    double estimate = 0.0;
    double std_err = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

/// Standard error for comparisons: the Wald error, floored by the
/// Agresti-Coull error so an all-hit or no-hit sample does not report zero.
double comparison_std_err(const McEstimate& mc);

/// bound >= estimate - k * comparison_std_err.
bool bound_dominates(double bound, const McEstimate& mc, double k = 3.0);

/// Samples are drawn in fixed chunks with seeds derived from (seed, chunk),
/// so the result does not depend on `workers`. Zero variances are allowed.
McEstimate monte_carlo_prob(const VehicleBelief& ego, const VehicleBelief& ov,
                            std::uint64_t n_samples, std::uint64_t seed, int workers = 1);

struct GridSpec
{
    double x_min = 0.0, x_max = 0.0;
    int nx = 0;
    double y_min = 0.0, y_max = 0.0;
    int ny = 0;

    double x_at(int i) const { return nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1); }
    double y_at(int j) const { return ny == 1 ? y_min : y_min + (y_max - y_min) * j / (ny - 1); }
};

struct ContourConfig
{
    RectShape ego_shape{2.5, 1.0};
    RectShape ov_shape{2.5, 1.0};
    Cov2 ego_cov;
    Cov2 ov_cov;
    HeadingStats ego_heading;
    HeadingStats ov_heading;
    int n_phi = 20;
    GridSpec grid;
    std::uint64_t mc_samples = 10000;
};

struct ContourCell
{
    double mu_x = 0.0;
    double mu_y = 0.0;
    double p_us1 = 0.0;
    double p_pa = 0.0;
    double p_mc = 0.0;
    double mc_stderr = 0.0;
    std::uint64_t mc_hits = 0;
    std::uint64_t mc_samples = 0;

    McEstimate mc() const { return {p_mc, mc_stderr, mc_hits, mc_samples}; }
};

/// The two beliefs whose deviation mean (in the ego-aligned frame) is `rel`.
/// The OV sits at the origin.
std::pair<VehicleBelief, VehicleBelief> beliefs_at(const ContourConfig& cfg, Vec2 rel);

/// Row-major over (x, y) with x varying slowest. mc_samples = 0 skips MC.
std::vector<ContourCell> contour_grid(const ContourConfig& cfg, std::uint64_t seed, int workers);

}  // namespace ccplan
