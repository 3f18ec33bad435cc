#pragma once

// Receding-horizon tracking problem solved by single-shooting SQP with
// Gauss-Newton Hessians, an elastic l-infinity penalty and a merit line search.

#include <string_view>
#include <vector>

#include "collision_prob.hpp"
#include "corridor.hpp"
#include "planner/dynamics.hpp"

namespace ccplan {

struct Limits
{
    double v_max = 30.0;
    double a_max = 4.0;      ///< bound on |a_d|
    double gamma_max = 0.5;  ///< bound on |gamma_d|
    double mu_f = 0.7;       ///< friction coefficient for |v*gamma| <= mu_f*g
    double g = 9.81;
};

struct Weights
{
    double q_ye = 1.0;
    double q_v = 0.5;
    double r_a = 0.1;
    double r_gamma = 1.0;
};

struct SqpOptions
{
    int max_iter = 50;
    double tol = 1e-7;       ///< relative predicted merit decrease at convergence
    double feas_tol = 1e-6;  ///< max constraint violation accepted as feasible
    double rho = 1e4;        ///< exact-penalty weight
    double row_margin = 1.0; ///< rows within this of activity enter the QP up front
};

struct OcpSetup
{
    int horizon = 40;
    double dt = 0.15;
    EgoParams ego;
    Limits limits;
    Weights weights;
    RoadBounds road;
    SqpOptions sqp;
};

/// Chance constraint log Pr <= log delta on the ego position at one step,
/// with everything except the mean frozen.
struct DirectConstraint
{
    int step = 1;  ///< 1..horizon
    const BoundContext* ctx = nullptr;
    Vec2 ov_mean;
    double frame = 0.0;
};

struct OcpConstraints
{
    const Corridor* corridor = nullptr;       ///< steps[k-1] applies at step k
    std::vector<DirectConstraint> direct;
    double delta = 1e-3;
};

enum class SolverStatus { Feasible, Infeasible, IterationLimit, NumericalFailure };

std::string_view to_string(SolverStatus s);

struct PlanResult
{
    std::vector<State> x;  ///< horizon + 1 states, x[0] is the initial state
    std::vector<Input> u;  ///< horizon inputs
    SolverStatus status = SolverStatus::NumericalFailure;
    double cost = 0.0;
    double max_violation = 0.0;
    int iterations = 0;
    int qp_iterations = 0;
};

struct References
{
    double y_e = 0.0;
    double v = 0.0;
};

std::vector<State> rollout(const State& x0, const std::vector<Input>& u, double dt,
                           const EgoParams& p);

/// Quadratic tracking cost of a state and input trajectory.
double tracking_cost(const std::vector<State>& xs, const std::vector<Input>& u,
                     const References& refs, const Weights& w);

PlanResult solve_ocp(const State& x0, const std::vector<Input>& warm_u, const References& refs,
                     const OcpConstraints& cons, const OcpSetup& setup);

}  // namespace ccplan
