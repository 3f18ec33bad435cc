#pragma once

// Per-step linear lateral bounds around tightened boxes.

#include <array>
#include <vector>

#include "linalg2.hpp"

namespace ccplan {

struct PlanPose
{
    double s = 0.0;
    double y = 0.0;
    double phi = 0.0;
    double v = 0.0;
};

/// Poses at times 0, step, 2*step, ...; returns the poses at each time + dt,
/// interpolated along the plan and extrapolated at constant velocity past its end.
std::vector<PlanPose> shift_plan(const std::vector<PlanPose>& plan, double step, double dt);

struct RoadBounds
{
    double y_lo = -4.0;
    double y_hi = 4.0;
};

/// A tightened box in road coordinates plus the OV center used for sorting.
struct PlacedBox
{
    std::array<Vec2, 4> corners{};
    Vec2 center;
};

enum class BoundCondition { Road, Edge, Ramp, Beyond };

/// y_lo_line(s) <= y <= y_hi_line(s), s_lo <= s <= s_hi.
struct CorridorStep
{
    double alpha_hi = 0.0, beta_hi = 0.0;
    double alpha_lo = 0.0, beta_lo = 0.0;
    double s_lo = -INFINITY, s_hi = INFINITY;
    BoundCondition cond_hi = BoundCondition::Road;
    BoundCondition cond_lo = BoundCondition::Road;
    bool collapsed = false;

    double upper(double s) const { return alpha_hi * s + beta_hi; }
    double lower(double s) const { return alpha_lo * s + beta_lo; }
};

struct Corridor
{
    std::vector<CorridorStep> steps;
    bool collapsed() const;
};

/// plan_points[k] and boxes[k] (one entry per OV) describe horizon step k.
Corridor build_corridor(const std::vector<Vec2>& plan_points,
                        const std::vector<std::vector<PlacedBox>>& boxes, const RoadBounds& road,
                        double delta_s);

}  // namespace ccplan
