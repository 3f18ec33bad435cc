#pragma once

// Closed-loop receding-horizon simulation and seeded batches.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "planner/ocp.hpp"
#include "planner/ov_model.hpp"

namespace ccplan {

/// Variances of the Gaussian perturbation applied to an initial pose.
struct PerturbVar
{
    double s = 0.1;
    double y = 0.1;
    double phi = 0.01;
};

struct EgoSpec
{
    PlanPose init{0.0, 0.0, 0.0, 0.0};
    PerturbVar perturb;
    References refs;
    std::vector<double> alt_lanes;  ///< other lateral targets tried when replanning
    RectShape shape{2.5, 1.0};
    CovSchedule cov;
};

struct OvSpec
{
    OvState init;
    PerturbVar perturb;
    RectShape shape{2.5, 1.0};
    CovSchedule cov;
    OvBehavior behavior = OvBehavior::Stationary;
    IdmParams idm;
};

struct Scenario
{
    std::string name = "scenario";
    double road_length = 280.0;
    double road_width = 10.0;
    RoadBounds road;  ///< bounds on the ego center
    EgoSpec ego;
    std::vector<OvSpec> ovs;
    double delta = 1e-3;
    int n_phi = 20;
    double dt = 0.15;
    int horizon = 40;
    double delta_s = 10.0;
    double duration = 20.0;  ///< simulated seconds at most
    EgoParams ego_params;
    Limits limits;
    Weights weights;
    SqpOptions sqp;
    int mc_samples = 1000;  ///< post-hoc Monte Carlo samples per step and OV
};

enum class PlannerMode { DirectPA, DirectUS1, ConvexPA, ConvexUS };

std::string_view to_string(PlannerMode m);
/// Accepts direct-pa, direct-us1, convex-pa, convex-us.
PlannerMode parse_mode(std::string_view s);
bool is_convex(PlannerMode m);

struct StepRecord
{
    double t = 0.0;  ///< time after the step
    State x;         ///< ego state after the step
    std::vector<OvState> ovs;
    SolverStatus status = SolverStatus::Feasible;
    bool fallback = false;
    bool solved = false;  ///< false when a collapsed corridor skipped the solve
    double solve_ms = 0.0;
    double bbox_ms = 0.0;
    std::vector<double> pbound;  ///< post-hoc bound per OV at the executed pose
    std::vector<double> pmc;     ///< post-hoc MC estimate per OV, NaN when skipped
};

struct RunRecord
{
    std::uint64_t seed = 0;
    State x0;
    std::vector<OvState> ov0;
    std::vector<StepRecord> steps;
    bool success = true;
    int failure_step = -1;  ///< first step whose solve was not Feasible
    std::vector<double> max_prob;  ///< per OV, over the run
};

struct RunOptions
{
    bool timing = false;  ///< record wall-clock durations (otherwise 0)
};

RunRecord simulate_closed_loop(const Scenario& sc, PlannerMode mode, std::uint64_t seed,
                               const RunOptions& opts = {});

struct Quantiles
{
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Linear-interpolation quantiles; all zeros for an empty sample.
Quantiles quantiles(std::vector<double> v);

struct BatchStats
{
    int runs = 0;
    int successes = 0;
    double success_rate = 0.0;
    std::vector<Quantiles> max_prob;  ///< per OV over runs
    Quantiles solve_ms;               ///< over every step of every run
};

struct BatchResult
{
    std::vector<RunRecord> runs;
    BatchStats stats;
};

BatchStats batch_stats(const std::vector<RunRecord>& runs);

/// Run i uses seed base_seed + i; runs execute on `workers` threads.
BatchResult batch_run(const Scenario& sc, PlannerMode mode, int n_runs, std::uint64_t base_seed,
                      int workers, const RunOptions& opts = {});

/// Runs `mode` and `other` back to back on each seed so that both see the same machine load.
std::pair<BatchResult, BatchResult> batch_run_paired(const Scenario& sc, PlannerMode mode,
                                                     PlannerMode other, int n_runs,
                                                     std::uint64_t base_seed, int workers,
                                                     const RunOptions& opts = {});

enum class Response { PassThenYield, YieldThenPass, Other };

std::string_view to_string(Response r);

/// Order of "ego passes ovs[pass_ov]" and "ovs[yield_ov] passes ego".
Response classify_response(const RunRecord& run, std::size_t pass_ov = 0, std::size_t yield_ov = 1);

}  // namespace ccplan
