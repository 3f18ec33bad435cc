#pragma once

#include "linalg2.hpp"

namespace ccplan {

/// Rectangle footprint by half-length (along heading) and half-width.
struct RectShape
{
    double a = 0.0;
    double b = 0.0;

    double half_diagonal() const { return std::hypot(a, b); }
    friend bool operator==(const RectShape&, const RectShape&) = default;
};

void validate(const RectShape& shape);

/// Relative-heading interval; lo may be -inf and hi +inf for the tails.
struct HeadingInterval
{
    double lo = 0.0;
    double hi = 0.0;
    double prob = 0.0;

    bool is_tail() const { return std::isinf(lo) || std::isinf(hi); }
};

/// Minkowski sum of the ego rectangle and the axis-aligned rectangle
/// circumscribing the OV over a heading interval.
struct CombinedBox
{
    double a = 0.0;
    double b = 0.0;
    HeadingInterval interval;
};

/// Half-extents of the axis-aligned bounding box of a transformed CombinedBox.
struct TransformedBox
{
    double a_pp = 0.0;
    double b_pp = 0.0;
};

struct Extents
{
    double ex = 0.0;
    double ey = 0.0;
};

struct Pose
{
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
};

/// Tightest axis-aligned half-extents containing `ov` at every heading in
/// the interval. Tail intervals use the rotation-invariant half-diagonal.
Extents hull_extents_over_interval(const RectShape& ov, const HeadingInterval& interval);

CombinedBox combined_box(const RectShape& ego, const RectShape& ov, const HeadingInterval& interval);

/// abs(T) * [a; b]
TransformedBox transform_box(const Transform2& t, const CombinedBox& box);

/// Separating-axis test for two oriented rectangles; touching counts as overlap.
bool oriented_rect_overlap(const Pose& pose_i, const RectShape& rect_i, const Pose& pose_j,
                           const RectShape& rect_j);

}  // namespace ccplan
