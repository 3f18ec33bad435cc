#include "corridor.hpp"

#include <algorithm>

#include "errors.hpp"

namespace ccplan {

std::vector<PlanPose> shift_plan(const std::vector<PlanPose>& plan, double step, double dt)
{
    if (plan.empty() || dt == 0.0)
        return plan;
    if (!(step > 0.0) || dt < 0.0)
        throw InvalidArgument("shift_plan needs step > 0 and dt >= 0");
    const std::size_t n = plan.size();
    std::vector<PlanPose> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = k * step + dt;
        const double idx = t / step;
        const std::size_t i = static_cast<std::size_t>(idx);
        if (i + 1 < n) {
            const double w = idx - static_cast<double>(i);
            const PlanPose& a = plan[i];
            const PlanPose& b = plan[i + 1];
            out[k] = {a.s + w * (b.s - a.s), a.y + w * (b.y - a.y), a.phi + w * (b.phi - a.phi),
                      a.v + w * (b.v - a.v)};
        } else {
            const PlanPose& last = plan[n - 1];
            const double tau = t - (n - 1) * step;
            out[k] = {last.s + last.v * std::cos(last.phi) * tau,
                      last.y + last.v * std::sin(last.phi) * tau, last.phi, last.v};
        }
    }
    return out;
}

bool Corridor::collapsed() const
{
    return std::any_of(steps.begin(), steps.end(), [](const CorridorStep& c) { return c.collapsed; });
}

namespace {

struct Line
{
    double alpha = 0.0;
    double beta = 0.0;
    double at(double s) const { return alpha * s + beta; }
};

struct SideBound
{
    Line line;
    BoundCondition cond = BoundCondition::Road;
};

// One box against one side. `upper` selects the y <= line side.
SideBound bound_for_box(const PlacedBox& box, double s, double road_edge, double delta_s,
                        bool upper, double& s_lo, double& s_hi)
{
    double bmin = INFINITY, bmax = -INFINITY;
    for (const Vec2& c : box.corners) {
        bmin = std::min(bmin, c.x);
        bmax = std::max(bmax, c.x);
    }

    if (bmin <= s && s <= bmax) {
        // Edge of the convex box spanning s that is nearest the ego side.
        bool found = false;
        SideBound best{{0.0, road_edge}, BoundCondition::Edge};
        double best_y = 0.0;
        for (int p = 0; p < 4; ++p) {
            const Vec2 a = box.corners[p];
            const Vec2 b = box.corners[(p + 1) % 4];
            if (a.x == b.x || s < std::min(a.x, b.x) || s > std::max(a.x, b.x))
                continue;
            const double alpha = (b.y - a.y) / (b.x - a.x);
            const Line l{alpha, a.y - alpha * a.x};
            const double y = l.at(s);
            if (!found || (upper ? y < best_y : y > best_y)) {
                best.line = l;
                best_y = y;
                found = true;
            }
        }
        if (!found)
            throw NumericError("degenerate tightened box: no edge spans the plan point");
        return best;
    }

    const bool ahead = s < bmin;
    if (ahead ? bmin - s <= delta_s : s - bmax <= delta_s) {
        // Ramp from the road edge, anchored on the far side of the ego, tangent to the box.
        const double s_a = ahead ? s - delta_s : s + delta_s;
        const bool take_min = upper == ahead;
        double alpha = take_min ? INFINITY : -INFINITY;
        for (const Vec2& c : box.corners) {
            const double m = (c.y - road_edge) / (c.x - s_a);
            alpha = take_min ? std::min(alpha, m) : std::max(alpha, m);
        }
        return {{alpha, road_edge - alpha * s_a}, BoundCondition::Ramp};
    }

    if (ahead)
        s_hi = std::min(s_hi, bmin);
    else
        s_lo = std::max(s_lo, bmax);
    return {{0.0, road_edge}, BoundCondition::Beyond};
}

}  // namespace

Corridor build_corridor(const std::vector<Vec2>& plan_points,
                        const std::vector<std::vector<PlacedBox>>& boxes, const RoadBounds& road,
                        double delta_s)
{
    if (boxes.size() != plan_points.size())
        throw InvalidArgument("corridor needs one box list per plan point");
    if (!(road.y_lo < road.y_hi))
        throw InvalidArgument("road bounds must satisfy y_lo < y_hi");
    if (!(delta_s > 0.0))
        throw InvalidArgument("look-ahead distance must be positive");

    Corridor cor;
    cor.steps.reserve(plan_points.size());
    for (std::size_t k = 0; k < plan_points.size(); ++k) {
        const double s = plan_points[k].x;
        CorridorStep st;
        SideBound hi{{0.0, road.y_hi}, BoundCondition::Road};
        SideBound lo{{0.0, road.y_lo}, BoundCondition::Road};
        for (const PlacedBox& box : boxes[k]) {
            const bool upper = box.center.y > 0.0;
            const SideBound b = bound_for_box(box, s, upper ? road.y_hi : road.y_lo, delta_s,
                                              upper, st.s_lo, st.s_hi);
            // Keep the most restrictive line at the plan point.
            if (upper && (b.line.at(s) < hi.line.at(s) ||
                          (b.line.at(s) == hi.line.at(s) && hi.cond == BoundCondition::Road)))
                hi = b;
            else if (!upper && (b.line.at(s) > lo.line.at(s) ||
                                (b.line.at(s) == lo.line.at(s) && lo.cond == BoundCondition::Road)))
                lo = b;
        }
        st.alpha_hi = hi.line.alpha;
        st.beta_hi = hi.line.beta;
        st.cond_hi = hi.cond;
        st.alpha_lo = lo.line.alpha;
        st.beta_lo = lo.line.beta;
        st.cond_lo = lo.cond;
        st.collapsed = st.lower(s) > st.upper(s) || st.s_lo > st.s_hi;
        cor.steps.push_back(st);
    }
    return cor;
}

}  // namespace ccplan
