#include "geometry.hpp"

#include <algorithm>
#include <numbers>

#include "errors.hpp"

namespace ccplan {

void validate(const RectShape& shape)
{
    if (!(shape.a > 0.0) || !(shape.b > 0.0) || !std::isfinite(shape.a) || !std::isfinite(shape.b))
        throw InvalidArgument("rectangle half-length and half-width must be positive and finite");
}

Extents hull_extents_over_interval(const RectShape& ov, const HeadingInterval& interval)
{
    if (interval.is_tail() || interval.hi - interval.lo >= std::numbers::pi) {
        const double r = ov.half_diagonal();
        return {r, r};
    }
    if (interval.hi < interval.lo)
        throw InvalidArgument("heading interval has hi < lo");

    const auto ex_at = [&](double phi) {
        return ov.a * std::fabs(std::cos(phi)) + ov.b * std::fabs(std::sin(phi));
    };
    const auto ey_at = [&](double phi) {
        return ov.a * std::fabs(std::sin(phi)) + ov.b * std::fabs(std::cos(phi));
    };

    Extents e{std::max(ex_at(interval.lo), ex_at(interval.hi)),
              std::max(ey_at(interval.lo), ey_at(interval.hi))};

    // Interior maxima of |cos|/|sin| combinations sit at +-atan(b/a) + k*pi/2.
    const double base = std::atan2(ov.b, ov.a);
    const double quarter = 0.5 * std::numbers::pi;
    for (const double offset : {base, -base}) {
        const double k_lo = std::ceil((interval.lo - offset) / quarter);
        const double k_hi = std::floor((interval.hi - offset) / quarter);
        for (double k = k_lo; k <= k_hi; k += 1.0) {
            const double phi = offset + k * quarter;
            e.ex = std::max(e.ex, ex_at(phi));
            e.ey = std::max(e.ey, ey_at(phi));
        }
    }
    return e;
}

CombinedBox combined_box(const RectShape& ego, const RectShape& ov, const HeadingInterval& interval)
{
    const Extents e = hull_extents_over_interval(ov, interval);
    return {ego.a + e.ex, ego.b + e.ey, interval};
}

TransformedBox transform_box(const Transform2& t, const CombinedBox& box)
{
    const Mat2 m = t.m.abs();
    return {m.m11 * box.a + m.m12 * box.b, m.m21 * box.a + m.m22 * box.b};
}

namespace {

struct Obb
{
    Vec2 center;
    Vec2 axis[2];
    double half[2];
};

Obb to_obb(const Pose& p, const RectShape& r)
{
    const double c = std::cos(p.heading);
    const double s = std::sin(p.heading);
    return {{p.x, p.y}, {{c, s}, {-s, c}}, {r.a, r.b}};
}

double projected_radius(const Obb& box, Vec2 axis)
{
    return box.half[0] * std::fabs(dot(box.axis[0], axis)) +
           box.half[1] * std::fabs(dot(box.axis[1], axis));
}

}  // namespace

bool oriented_rect_overlap(const Pose& pose_i, const RectShape& rect_i, const Pose& pose_j,
                           const RectShape& rect_j)
{
    const Obb bi = to_obb(pose_i, rect_i);
    const Obb bj = to_obb(pose_j, rect_j);
    const Vec2 d = bj.center - bi.center;
    for (const Obb* owner : {&bi, &bj}) {
        for (const Vec2 axis : owner->axis) {
            if (std::fabs(dot(d, axis)) > projected_radius(bi, axis) + projected_radius(bj, axis))
                return false;
        }
    }
    return true;
}

}  // namespace ccplan
