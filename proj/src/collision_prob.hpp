#pragma once

// Heading-conditioned analytic upper bound on the collision probability of
// two rectangular vehicles with independent Gaussian position and heading.

#include <string_view>
#include <vector>

#include "geometry.hpp"
#include "linalg2.hpp"

namespace ccplan {

struct Gaussian2
{
    Vec2 mean;
    Cov2 cov;
};

struct HeadingStats
{
    double mu = 0.0;
    double var = 0.0;
};

enum class Method { PA, US1, US2 };

std::string_view to_string(Method m);

/// One vehicle's position/heading belief plus its footprint.
struct VehicleBelief
{
    Gaussian2 pos;
    HeadingStats heading;
    RectShape shape;
};

/// Relative quantities expressed in the frame aligned with the ego's mean
/// heading: x_ij = x_i - x_j and phi_ji = phi_j - phi_i.
struct Deviation
{
    Gaussian2 pos;
    HeadingStats heading;
    double frame_angle = 0.0;  ///< ego mean heading used for the alignment
};

Deviation make_deviation(const VehicleBelief& ego, const VehicleBelief& ov);

/// n_phi uniform intervals over [mu - pi/2, mu + pi/2] preceded and followed
/// by the two infinite tails; n_phi + 2 entries in total.
std::vector<HeadingInterval> partition_heading(const HeadingStats& stats, int n_phi);

/// Product over both decoupled axes of Psi((bound - mu)/sigma) differences.
double conditional_box_prob(Vec2 dev_mean_t, const Cov2& dev_cov_t, const TransformedBox& box);

/// The decoupling transform for one method, with the decoupled standard
/// deviations along each transformed axis.
struct Decoupling
{
    Method method = Method::PA;
    Transform2 t;
    Mat2 t_inv;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
};

Decoupling decouple(const Cov2& sigma, Method method);

struct IntervalTerm
{
    HeadingInterval interval;
    CombinedBox box;
    TransformedBox tbox;
};

struct ProbBound
{
    double value = 0.0;
    /// (interval, conditional probability) pairs whose weighted sum is value.
    std::vector<std::pair<HeadingInterval, double>> per_interval;
    Method method = Method::PA;
};

/// Everything in the bound that does not depend on the deviation mean. Frozen
/// copies of this drive the planner's direct constraint and the PTS search.
class BoundContext
{
  public:
    BoundContext(const Cov2& dev_cov, const HeadingStats& rel_heading, const RectShape& ego,
                 const RectShape& ov, Method method, int n_phi);

    double value(Vec2 dev_mean) const;
    /// Bound value and its gradient with respect to the (untransformed) mean.
    double value_and_gradient(Vec2 dev_mean, Vec2& grad) const;
    ProbBound evaluate(Vec2 dev_mean) const;

    const Decoupling& decoupling() const { return dec_; }
    const std::vector<IntervalTerm>& terms() const { return terms_; }

  private:
    Decoupling dec_;
    std::vector<IntervalTerm> terms_;
};

ProbBound prob_upper_bound(const Deviation& dev, const RectShape& ego, const RectShape& ov,
                           Method method, int n_phi);
ProbBound prob_upper_bound(const VehicleBelief& ego, const VehicleBelief& ov, Method method,
                           int n_phi);

}  // namespace ccplan
