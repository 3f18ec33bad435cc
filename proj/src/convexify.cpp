#include "convexify.hpp"

#include <algorithm>
#include <sstream>

#include "errors.hpp"
#include "normal.hpp"

namespace ccplan {

double PtsObjective::value(double mu) const
{
    double p = 0.0;
    for (const Term& t : terms)
        p += t.weight * std_normal_interval((-t.half - mu) / sigma, (t.half - mu) / sigma);
    return p;
}

double PtsObjective::derivative(double mu) const
{
    double d = 0.0;
    for (const Term& t : terms)
        d += t.weight *
             (std_normal_pdf((-t.half - mu) / sigma) - std_normal_pdf((t.half - mu) / sigma));
    return d / sigma;
}

PtsObjective pts_objective(const BoundContext& ctx, int axis)
{
    if (axis != 0 && axis != 1)
        throw InvalidArgument("axis must be 0 or 1");
    const Decoupling& dec = ctx.decoupling();
    const double s_fixed = axis == 0 ? dec.sigma2 : dec.sigma1;
    PtsObjective obj;
    obj.sigma = axis == 0 ? dec.sigma1 : dec.sigma2;
    obj.default_mu0 = 0.0;
    for (const IntervalTerm& t : ctx.terms()) {
        const double h_fixed = axis == 0 ? t.tbox.b_pp : t.tbox.a_pp;
        const double h_search = axis == 0 ? t.tbox.a_pp : t.tbox.b_pp;
        obj.default_mu0 = std::max(obj.default_mu0, std::hypot(t.tbox.a_pp, t.tbox.b_pp));
        if (t.interval.prob == 0.0)
            continue;
        const double f = std_normal_interval(-h_fixed / s_fixed, h_fixed / s_fixed);
        obj.terms.push_back({t.interval.prob * f, h_search});
    }
    return obj;
}

PtsResult pts_search(const PtsObjective& obj, double delta, const PtsOptions& opts)
{
    if (!(delta > 0.0))
        throw InvalidArgument("probability threshold must be positive");
    const double p0 = obj.value(0.0);
    if (!(delta < p0)) {
        std::ostringstream os;
        os << "threshold unreachable: delta=" << delta << " is not below the bound at zero offset ("
           << p0 << ")";
        throw InvalidArgument(os.str());
    }
    if (opts.max_iter < 1 || !(opts.eps > 0.0) || !(opts.upper > 0.0))
        throw InvalidArgument("PTS options must have max_iter >= 1, eps > 0, upper > 0");

    double lo = 0.0;
    double hi = opts.upper;
    PtsResult r;
    r.mu_star = std::clamp(opts.mu0 >= 0.0 ? opts.mu0 : obj.default_mu0, lo, hi);
    for (int i = 1; i <= opts.max_iter; ++i) {
        r.iterations = i;
        r.prob_at_star = obj.value(r.mu_star);
        const double dp = r.prob_at_star - delta;
        const double deriv = obj.derivative(r.mu_star);
        const double next = r.mu_star - dp / deriv;
        if (std::fabs(dp) <= opts.eps) {
            r.converged = true;
            // On a flat objective the probability tolerance still leaves slack in mu;
            // polish with Newton while it keeps the probability within eps.
            if (i < opts.max_iter && deriv < 0.0 && std::isfinite(next) &&
                std::fabs(next - r.mu_star) > opts.mu_tol && next >= lo && next <= hi &&
                std::fabs(obj.value(next) - delta) <= std::fabs(dp)) {
                r.mu_star = next;
                continue;
            }
            return r;
        }
        if (dp < 0.0 && r.mu_star < hi)
            hi = r.mu_star;
        if (dp > 0.0 && r.mu_star > lo)
            lo = r.mu_star;
        if (deriv == 0.0 || !std::isfinite(next) || next > hi || next < lo)
            r.mu_star = 0.5 * (hi + lo);
        else
            r.mu_star = next;
    }
    r.prob_at_star = obj.value(r.mu_star);
    r.converged = std::fabs(r.prob_at_star - delta) <= opts.eps;
    return r;
}

namespace {

PtsResult search_axis(const BoundContext& ctx, int axis, double target, const PtsOptions& opts)
{
    try {
        return pts_search(pts_objective(ctx, axis), target, opts);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument("axis " + std::to_string(axis + 1) + ": " + e.what());
    }
}

}  // namespace

TightenedBox tightened_bbox(const Cov2& dev_cov, const HeadingStats& rel_heading,
                            const RectShape& ego, const RectShape& ov, double delta, int n_phi,
                            Method axis1, Method axis2, const PtsOptions& opts)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidArgument("delta must lie in (0, 1)");
    const bool mixed = axis1 == Method::US2 && axis2 == Method::US1;
    if (axis1 != axis2 && !mixed)
        throw InvalidArgument("axis methods must match or be (US2, US1)");
    const double target = delta - opts.eps;

    TightenedBox box;
    box.axis1 = axis1;
    box.axis2 = axis2;
    box.delta = delta;

    const BoundContext c1(dev_cov, rel_heading, ego, ov, axis1, n_phi);
    box.pts1 = search_axis(c1, 0, target, opts);
    box.mu1_star = box.pts1.mu_star;
    if (mixed) {
        const BoundContext c2(dev_cov, rel_heading, ego, ov, axis2, n_phi);
        box.pts2 = search_axis(c2, 1, target, opts);
    } else {
        box.pts2 = search_axis(c1, 1, target, opts);
    }
    box.mu2_star = box.pts2.mu_star;

    const std::array<Vec2, 4> local{Vec2{box.mu1_star, box.mu2_star},
                                    Vec2{-box.mu1_star, box.mu2_star},
                                    Vec2{-box.mu1_star, -box.mu2_star},
                                    Vec2{box.mu1_star, -box.mu2_star}};
    if (mixed) {
        // x1' = s1 x1 under US2 and x2' = s2 x2 under US1.
        const double s1 = decouple(dev_cov, Method::US2).t.m.m11;
        const double s2 = decouple(dev_cov, Method::US1).t.m.m22;
        const double hx = box.mu1_star / s1;
        const double hy = box.mu2_star / s2;
        box.corners = {Vec2{hx, hy}, Vec2{-hx, hy}, Vec2{-hx, -hy}, Vec2{hx, -hy}};
    } else if (axis1 == Method::PA) {
        const Mat2& inv = c1.decoupling().t_inv;
        for (int p = 0; p < 4; ++p)
            box.corners[p] = inv * local[p];
    } else {
        const Mat2& inv = c1.decoupling().t_inv;
        double hx = 0.0, hy = 0.0;
        for (const Vec2& c : local) {
            const Vec2 q = inv * c;
            hx = std::max(hx, std::fabs(q.x));
            hy = std::max(hy, std::fabs(q.y));
        }
        box.corners = {Vec2{hx, hy}, Vec2{-hx, hy}, Vec2{-hx, -hy}, Vec2{hx, -hy}};
    }
    return box;
}

std::array<Vec2, 4> place_box(const TightenedBox& box, Vec2 ov_mean, double frame_angle)
{
    const Mat2 r = Mat2::rotation(frame_angle);
    std::array<Vec2, 4> out;
    for (int p = 0; p < 4; ++p)
        out[p] = ov_mean + r * box.corners[p];
    return out;
}

}  // namespace ccplan
