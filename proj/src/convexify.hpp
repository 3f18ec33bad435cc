#pragma once

// Probability threshold search and the delta-level tightened bounding box.

#include <array>
#include <vector>

#include "collision_prob.hpp"

namespace ccplan {

/// Pr(mu) = sum_l w_l [Psi((h_l - mu)/sigma) - Psi((-h_l - mu)/sigma)], decreasing for mu >= 0.
struct PtsObjective
{
    struct Term
    {
        double weight = 0.0;
        double half = 0.0;
    };
    double sigma = 1.0;
    std::vector<Term> terms;

    double value(double mu) const;
    double derivative(double mu) const;
    /// sqrt(a''^2 + b''^2) of the widest box; the default initial guess.
    double default_mu0 = 1.0;
};

/// Axis 1 = 0, axis 2 = 1. The other axis is fixed at a zero mean offset.
PtsObjective pts_objective(const BoundContext& ctx, int axis);

struct PtsOptions
{
    double mu0 = -1.0;  ///< negative selects the objective's default
    int max_iter = 60;
    double eps = 1e-9;
    double upper = 1e5;
    /// Once |Pr - delta| <= eps, Newton steps continue until they shrink below this.
    double mu_tol = 1e-9;
};

struct PtsResult
{
    double mu_star = 0.0;
    double prob_at_star = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Newton search with the bracketing fallback. Throws InvalidArgument when
/// delta is outside (0, objective(0)).
PtsResult pts_search(const PtsObjective& obj, double delta, const PtsOptions& opts = {});

struct TightenedBox
{
    Method axis1 = Method::PA;
    Method axis2 = Method::PA;
    double mu1_star = 0.0;  ///< half-extent along transformed axis 1
    double mu2_star = 0.0;  ///< half-extent along transformed axis 2
    /// Counterclockwise, in the ego-aligned deviation frame.
    std::array<Vec2, 4> corners{};
    double delta = 0.0;
    PtsResult pts1;
    PtsResult pts2;
};

/// axis1 == axis2 uses one decoupling; (US2, US1) is the mixed mode whose
/// box is axis-aligned in the ego frame. The search targets delta - eps so
/// the box boundary satisfies the bound <= delta.
TightenedBox tightened_bbox(const Cov2& dev_cov, const HeadingStats& rel_heading,
                            const RectShape& ego, const RectShape& ov, double delta, int n_phi,
                            Method axis1, Method axis2, const PtsOptions& opts = {});

/// Corners in road coordinates: ov_mean + R(frame_angle) * corner.
std::array<Vec2, 4> place_box(const TightenedBox& box, Vec2 ov_mean, double frame_angle);

}  // namespace ccplan
