#include "collision_prob.hpp"

#include <numbers>

#include "errors.hpp"
#include "normal.hpp"

namespace ccplan {

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::PA:
        return "PA";
    case Method::US1:
        return "US1";
    case Method::US2:
        return "US2";
    }
    return "?";
}

Deviation make_deviation(const VehicleBelief& ego, const VehicleBelief& ov)
{
    const double frame = ego.heading.mu;
    const Mat2 r = Mat2::rotation(-frame);
    Deviation d;
    d.frame_angle = frame;
    d.pos.mean = r * (ego.pos.mean - ov.pos.mean);
    d.pos.cov = (ego.pos.cov + ov.pos.cov).congruence(r);
    d.heading.mu = wrap_angle(ov.heading.mu - ego.heading.mu);
    d.heading.var = ego.heading.var + ov.heading.var;
    return d;
}

std::vector<HeadingInterval> partition_heading(const HeadingStats& stats, int n_phi)
{
    if (n_phi < 1)
        throw InvalidArgument("n_phi must be at least 1");
    if (!(stats.var >= 0.0) || !std::isfinite(stats.var) || !std::isfinite(stats.mu))
        throw InvalidArgument("heading variance must be finite and non-negative");

    const double half = 0.5 * std::numbers::pi;
    const double width = 2.0 * half / n_phi;
    std::vector<double> edges;
    edges.reserve(n_phi + 3);
    edges.push_back(-INFINITY);
    for (int l = 0; l <= n_phi; ++l)
        edges.push_back(l == n_phi ? stats.mu + half : stats.mu - half + l * width);
    edges.push_back(INFINITY);

    std::vector<HeadingInterval> out;
    out.reserve(n_phi + 2);
    const double sigma = std::sqrt(stats.var);
    bool placed = false;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        HeadingInterval iv{edges[i], edges[i + 1], 0.0};
        if (sigma > 0.0) {
            iv.prob = std_normal_interval((iv.lo - stats.mu) / sigma, (iv.hi - stats.mu) / sigma);
        } else if (!placed && iv.lo <= stats.mu && stats.mu <= iv.hi) {
            // Point mass: all weight on the first interval holding the mean.
            iv.prob = 1.0;
            placed = true;
        }
        out.push_back(iv);
    }
    return out;
}

namespace {

double axis_prob(double mu, double sigma, double half)
{
    return std_normal_interval((-half - mu) / sigma, (half - mu) / sigma);
}

double axis_dprob(double mu, double sigma, double half)
{
    return (std_normal_pdf((-half - mu) / sigma) - std_normal_pdf((half - mu) / sigma)) / sigma;
}

}  // namespace

double conditional_box_prob(Vec2 dev_mean_t, const Cov2& dev_cov_t, const TransformedBox& box)
{
    if (!dev_cov_t.is_diagonal())
        throw InvalidArgument("conditional_box_prob expects a decoupled (diagonal) covariance");
    validate(dev_cov_t);
    return axis_prob(dev_mean_t.x, std::sqrt(dev_cov_t.sxx), box.a_pp) *
           axis_prob(dev_mean_t.y, std::sqrt(dev_cov_t.syy), box.b_pp);
}

Decoupling decouple(const Cov2& sigma, Method method)
{
    Decoupling d;
    d.method = method;
    if (method == Method::PA) {
        const PrincipalRotation pr = principal_rotation(sigma);
        d.t = pr.t;
        d.t_inv = pr.t_inv.m;
        d.sigma1 = std::sqrt(pr.d.sxx);
        d.sigma2 = std::sqrt(pr.d.syy);
        return d;
    }
    const RshFactors f = rsh_decompose(sigma, method == Method::US1 ? UsCase::Case1 : UsCase::Case2);
    d.t = f.decoupling();
    d.t_inv = d.t.m.inverse();
    const Cov2 ct = sigma.congruence(d.t.m);
    d.sigma1 = std::sqrt(ct.sxx);
    d.sigma2 = std::sqrt(ct.syy);
    return d;
}

BoundContext::BoundContext(const Cov2& dev_cov, const HeadingStats& rel_heading,
                           const RectShape& ego, const RectShape& ov, Method method, int n_phi)
    : dec_(decouple(dev_cov, method))
{
    validate(ego);
    validate(ov);
    for (const HeadingInterval& iv : partition_heading(rel_heading, n_phi)) {
        const CombinedBox box = combined_box(ego, ov, iv);
        terms_.push_back({iv, box, transform_box(dec_.t, box)});
    }
}

double BoundContext::value(Vec2 dev_mean) const
{
    const Vec2 m = dec_.t.m * dev_mean;
    double total = 0.0;
    for (const IntervalTerm& t : terms_) {
        if (t.interval.prob == 0.0)
            continue;
        total += t.interval.prob * axis_prob(m.x, dec_.sigma1, t.tbox.a_pp) *
                 axis_prob(m.y, dec_.sigma2, t.tbox.b_pp);
    }
    return std::min(1.0, total);
}

double BoundContext::value_and_gradient(Vec2 dev_mean, Vec2& grad) const
{
    const Vec2 m = dec_.t.m * dev_mean;
    double total = 0.0;
    Vec2 gt{0.0, 0.0};
    for (const IntervalTerm& t : terms_) {
        if (t.interval.prob == 0.0)
            continue;
        const double p1 = axis_prob(m.x, dec_.sigma1, t.tbox.a_pp);
        const double p2 = axis_prob(m.y, dec_.sigma2, t.tbox.b_pp);
        total += t.interval.prob * p1 * p2;
        gt.x += t.interval.prob * axis_dprob(m.x, dec_.sigma1, t.tbox.a_pp) * p2;
        gt.y += t.interval.prob * p1 * axis_dprob(m.y, dec_.sigma2, t.tbox.b_pp);
    }
    grad = dec_.t.m.transpose() * gt;
    return total;
}

ProbBound BoundContext::evaluate(Vec2 dev_mean) const
{
    const Vec2 m = dec_.t.m * dev_mean;
    ProbBound pb;
    pb.method = dec_.method;
    double total = 0.0;
    for (const IntervalTerm& t : terms_) {
        const double cond = axis_prob(m.x, dec_.sigma1, t.tbox.a_pp) *
                            axis_prob(m.y, dec_.sigma2, t.tbox.b_pp);
        pb.per_interval.emplace_back(t.interval, cond);
        total += t.interval.prob * cond;
    }
    pb.value = std::min(1.0, total);
    return pb;
}

ProbBound prob_upper_bound(const Deviation& dev, const RectShape& ego, const RectShape& ov,
                           Method method, int n_phi)
{
    return BoundContext(dev.pos.cov, dev.heading, ego, ov, method, n_phi).evaluate(dev.pos.mean);
}

ProbBound prob_upper_bound(const VehicleBelief& ego, const VehicleBelief& ov, Method method,
                           int n_phi)
{
    return prob_upper_bound(make_deviation(ego, ov), ego.shape, ov.shape, method, n_phi);
}

}  // namespace ccplan
