#include "planner/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "convexify.hpp"
#include "errors.hpp"
#include "monte_carlo.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace ccplan {

std::string_view to_string(PlannerMode m)
{
    switch (m) {
    case PlannerMode::DirectPA:
        return "direct-pa";
    case PlannerMode::DirectUS1:
        return "direct-us1";
    case PlannerMode::ConvexPA:
        return "convex-pa";
    case PlannerMode::ConvexUS:
        return "convex-us";
    }
    return "?";
}

PlannerMode parse_mode(std::string_view s)
{
    for (PlannerMode m : {PlannerMode::DirectPA, PlannerMode::DirectUS1, PlannerMode::ConvexPA,
                          PlannerMode::ConvexUS})
        if (s == to_string(m))
            return m;
    throw InvalidArgument("unknown mode '" + std::string(s) +
                          "' (expected direct-pa, direct-us1, convex-pa or convex-us)");
}

bool is_convex(PlannerMode m) { return m == PlannerMode::ConvexPA || m == PlannerMode::ConvexUS; }

std::string_view to_string(Response r)
{
    switch (r) {
    case Response::PassThenYield:
        return "pass_then_yield";
    case Response::YieldThenPass:
        return "yield_then_pass";
    case Response::Other:
        return "other";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct PairStats
{
    Cov2 dev_cov;
    HeadingStats rel_heading;
    double frame = 0.0;
    Vec2 ov_mean;
};

// Deviation statistics for horizon step k against one OV, frozen along the guess.
PairStats pair_stats(const Scenario& sc, const State& guess_k, const OvState& ov_k,
                     const Cov2& ov_cov, double ov_hvar, int k)
{
    PairStats p;
    p.frame = guess_k(kPhi);
    const Cov2 ego_cov = sc.ego.cov.position(k, p.frame);
    p.dev_cov = (ego_cov + ov_cov).congruence(Mat2::rotation(-p.frame));
    p.rel_heading = {wrap_angle(ov_k.phi - p.frame), sc.ego.cov.heading_var(k) + ov_hvar};
    p.ov_mean = {ov_k.s, ov_k.y};
    return p;
}

std::vector<Input> shifted(const std::vector<Input>& u)
{
    std::vector<Input> out(u.begin() + 1, u.end());
    out.push_back(Input::Zero());
    return out;
}

}  // namespace

namespace {

struct Attempt
{
    std::vector<std::vector<PairStats>> stats;  ///< [k][j], k = 1..n
    PlanResult plan;
    bool collapsed = false;
    bool solved = false;
    double solve_ms = 0.0;
    double bbox_ms = 0.0;
};

// Builds the constraints around `warm` and solves once.
Attempt plan_from(const Scenario& sc, PlannerMode mode, const OcpSetup& setup, const State& x,
                  const std::vector<Input>& warm, const References& refs,
                  const std::vector<OvPrediction>& preds)
{
    const int n = sc.horizon;
    const std::size_t n_ov = sc.ovs.size();
    Attempt at;
    const std::vector<State> guess = rollout(x, warm, sc.dt, setup.ego);

    at.stats.resize(n + 1);
    for (int k = 1; k <= n; ++k)
        for (std::size_t j = 0; j < n_ov; ++j)
            at.stats[k].push_back(pair_stats(sc, guess[k], preds[j].mean[k], preds[j].pos_cov[k],
                                             preds[j].heading_var[k], k));

    OcpConstraints cons;
    cons.delta = sc.delta;
    Corridor corridor;
    std::vector<std::unique_ptr<BoundContext>> contexts;

    if (is_convex(mode)) {
        const auto t0 = Clock::now();
        const Method m1 = mode == PlannerMode::ConvexPA ? Method::PA : Method::US2;
        const Method m2 = mode == PlannerMode::ConvexPA ? Method::PA : Method::US1;
        std::vector<Vec2> points;
        std::vector<std::vector<PlacedBox>> boxes(n);
        for (int k = 1; k <= n; ++k) {
            points.push_back({guess[k](kS), guess[k](kY)});
            for (std::size_t j = 0; j < n_ov; ++j) {
                const PairStats& p = at.stats[k][j];
                TightenedBox box;
                try {
                    box = tightened_bbox(p.dev_cov, p.rel_heading, sc.ego.shape, sc.ovs[j].shape,
                                         sc.delta, sc.n_phi, m1, m2);
                } catch (const InvalidArgument&) {
                    // The bound never reaches delta: this OV imposes nothing.
                    continue;
                }
                boxes[k - 1].push_back({place_box(box, p.ov_mean, p.frame), p.ov_mean});
            }
        }
        corridor = build_corridor(points, boxes, sc.road, sc.delta_s);
        at.collapsed = corridor.collapsed();
        cons.corridor = &corridor;
        at.bbox_ms = ms_since(t0);
    } else {
        const Method m = mode == PlannerMode::DirectPA ? Method::PA : Method::US1;
        contexts.reserve(static_cast<std::size_t>(n) * n_ov);
        for (int k = 1; k <= n; ++k)
            for (std::size_t j = 0; j < n_ov; ++j) {
                const PairStats& p = at.stats[k][j];
                contexts.push_back(std::make_unique<BoundContext>(
                    p.dev_cov, p.rel_heading, sc.ego.shape, sc.ovs[j].shape, m, sc.n_phi));
                cons.direct.push_back({k, contexts.back().get(), p.ov_mean, p.frame});
            }
    }

    if (at.collapsed) {
        at.plan.status = SolverStatus::Infeasible;
        return at;
    }
    const auto t0 = Clock::now();
    at.plan = solve_ocp(x, warm, refs, cons, setup);
    at.solve_ms = ms_since(t0);
    at.solved = true;
    return at;
}

}  // namespace

RunRecord simulate_closed_loop(const Scenario& sc, PlannerMode mode, std::uint64_t seed,
                               const RunOptions& opts)
{
    if (sc.horizon < 1 || !(sc.dt > 0.0))
        throw InvalidArgument("horizon and dt must be positive");
    const int n = sc.horizon;
    const std::size_t n_ov = sc.ovs.size();

    RunRecord rec;
    rec.seed = seed;
    Rng rng(derive_seed(seed, 0x5349, 0));
    std::normal_distribution<double> gauss;
    auto perturb = [&](double mean, double var) { return mean + std::sqrt(var) * gauss(rng); };

    State x = State::Zero();
    x(kS) = perturb(sc.ego.init.s, sc.ego.perturb.s);
    x(kY) = perturb(sc.ego.init.y, sc.ego.perturb.y);
    x(kPhi) = perturb(sc.ego.init.phi, sc.ego.perturb.phi);
    x(kV) = sc.ego.init.v;
    rec.x0 = x;

    std::vector<OvTrack> tracks;
    for (const OvSpec& o : sc.ovs) {
        OvTrack t;
        t.state = o.init;
        t.state.s = perturb(o.init.s, o.perturb.s);
        t.state.y = perturb(o.init.y, o.perturb.y);
        t.state.phi = perturb(o.init.phi, o.perturb.phi);
        t.shape = o.shape;
        t.cov = o.cov;
        t.behavior = o.behavior;
        t.idm = o.idm;
        tracks.push_back(t);
        rec.ov0.push_back(t.state);
    }

    OcpSetup setup;
    setup.horizon = n;
    setup.dt = sc.dt;
    setup.ego = sc.ego_params;
    setup.limits = sc.limits;
    setup.weights = sc.weights;
    setup.road = sc.road;
    setup.sqp = sc.sqp;

    // Reference tracking with only the road and input limits.
    const auto free_plan = [&](const std::vector<Input>& warm, const References& refs) {
        const PlanResult r = solve_ocp(x, warm, refs, OcpConstraints{}, setup);
        return r.status == SolverStatus::Feasible ? r.u : warm;
    };

    std::vector<Input> plan_u = free_plan(std::vector<Input>(n, Input::Zero()), sc.ego.refs);
    References last_refs = sc.ego.refs;
    rec.max_prob.assign(n_ov, 0.0);
    const int max_steps = static_cast<int>(std::floor(sc.duration / sc.dt + 1e-9));

    for (int step = 0; step < max_steps && x(kS) < sc.road_length; ++step) {
        StepRecord sr;
        std::vector<OvPrediction> preds;
        for (const OvTrack& t : tracks)
            preds.push_back(ov_predict(t, n, sc.dt));

        // Linearization points with matching references. The previous plan is
        // kept while it stays feasible; otherwise every candidate is solved and
        // the cheapest feasible plan under the nominal references wins.
        struct Candidate
        {
            References refs;
            bool reuse;
        };
        std::vector<Candidate> cands{{sc.ego.refs, true}, {sc.ego.refs, false}};
        if (last_refs.v != sc.ego.refs.v || last_refs.y_e != sc.ego.refs.y_e)
            cands.push_back({last_refs, true});
        std::vector<double> lanes{sc.ego.refs.y_e};
        lanes.insert(lanes.end(), sc.ego.alt_lanes.begin(), sc.ego.alt_lanes.end());
        for (double lane : lanes) {
            if (lane != sc.ego.refs.y_e)
                cands.push_back({{lane, sc.ego.refs.v}, false});
            cands.push_back({{lane, std::min(sc.limits.v_max, 1.25 * sc.ego.refs.v)}, false});
            for (double f : {0.8, 0.5, 0.0})
                cands.push_back({{lane, f * x(kV)}, false});
        }

        Attempt used;
        References used_refs = sc.ego.refs;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cands.size(); ++c) {
            const References& refs = cands[c].refs;
            const std::vector<Input> warm = cands[c].reuse ? plan_u : free_plan(plan_u, refs);
            Attempt at = plan_from(sc, mode, setup, x, warm, refs, preds);
            sr.solve_ms += at.solve_ms;
            sr.bbox_ms += at.bbox_ms;
            sr.solved = sr.solved || at.solved;
            const bool ok = at.plan.status == SolverStatus::Feasible;
            const double cost =
                ok ? tracking_cost(at.plan.x, at.plan.u, sc.ego.refs, sc.weights) : best;
            if (c == 0 || cost < best) {
                best = cost;
                used = std::move(at);
                used_refs = refs;
            }
            if (ok && c == 0)
                break;
        }
        const PlanResult& plan = used.plan;
        sr.status = plan.status;

        Input u0;
        if (plan.status == SolverStatus::Feasible) {
            last_refs = used_refs;
            u0 = plan.u[0];
            plan_u = shifted(plan.u);
        } else {
            // Hold the previous plan and brake.
            for (Input& u : plan_u)
                u(0) = -sc.limits.a_max;
            u0 = plan_u[0];
            plan_u = shifted(plan_u);
            sr.fallback = true;
            if (rec.success) {
                rec.success = false;
                rec.failure_step = step;
            }
        }
        if (!opts.timing) {
            sr.solve_ms = 0.0;
            sr.bbox_ms = 0.0;
        }

        x = rk4_step(x, u0, sc.dt, setup.ego);
        x(kV) = std::max(0.0, x(kV));
        for (OvTrack& t : tracks)
            t.state = ov_step(t, t.state, sc.dt);

        // Post-hoc check at the executed pose with the step-1 statistics.
        const Vec2 ego_pos{x(kS), x(kY)};
        for (std::size_t j = 0; j < n_ov; ++j) {
            const PairStats& p = used.stats[1][j];
            const Vec2 ov_pos{tracks[j].state.s, tracks[j].state.y};
            const Vec2 dev = Mat2::rotation(-p.frame) * (ego_pos - ov_pos);
            double bound = 1.0;
            for (Method m : {Method::PA, Method::US1, Method::US2})
                bound = std::min(bound, BoundContext(p.dev_cov, p.rel_heading, sc.ego.shape,
                                                     sc.ovs[j].shape, m, sc.n_phi)
                                            .value(dev));
            sr.pbound.push_back(bound);
            rec.max_prob[j] = std::max(rec.max_prob[j], bound);
            double mc = std::numeric_limits<double>::quiet_NaN();
            if (bound >= 1e-6 && sc.mc_samples > 0) {
                VehicleBelief ego_b{{ego_pos, sc.ego.cov.position(1, p.frame)},
                                    {p.frame, sc.ego.cov.heading_var(1)},
                                    sc.ego.shape};
                VehicleBelief ov_b{{ov_pos, preds[j].pos_cov[1]},
                                   {preds[j].mean[1].phi, preds[j].heading_var[1]},
                                   sc.ovs[j].shape};
                const std::uint64_t stream = static_cast<std::uint64_t>(step) * 64 + j;
                mc = monte_carlo_prob(ego_b, ov_b, sc.mc_samples, derive_seed(seed, 0x504d, stream), 1)
                         .estimate;
            }
            sr.pmc.push_back(mc);
        }

        sr.t = (step + 1) * sc.dt;
        sr.x = x;
        for (const OvTrack& t : tracks)
            sr.ovs.push_back(t.state);
        rec.steps.push_back(std::move(sr));
    }
    return rec;
}

Quantiles quantiles(std::vector<double> v)
{
    Quantiles q;
    if (v.empty())
        return q;
    std::sort(v.begin(), v.end());
    auto at = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const std::size_t i = static_cast<std::size_t>(std::floor(pos));
        const double f = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] + f * (v[i + 1] - v[i]) : v[i];
    };
    q.min = v.front();
    q.q1 = at(0.25);
    q.median = at(0.5);
    q.q3 = at(0.75);
    q.max = v.back();
    return q;
}

BatchStats batch_stats(const std::vector<RunRecord>& runs)
{
    BatchStats s;
    s.runs = static_cast<int>(runs.size());
    std::size_t n_ov = 0;
    std::vector<double> times;
    for (const RunRecord& r : runs) {
        s.successes += r.success ? 1 : 0;
        n_ov = std::max(n_ov, r.max_prob.size());
        for (const StepRecord& st : r.steps)
            if (st.solved)
                times.push_back(st.solve_ms);
    }
    s.success_rate = runs.empty() ? 0.0 : static_cast<double>(s.successes) / runs.size();
    for (std::size_t j = 0; j < n_ov; ++j) {
        std::vector<double> m;
        for (const RunRecord& r : runs)
            if (j < r.max_prob.size())
                m.push_back(r.max_prob[j]);
        s.max_prob.push_back(quantiles(std::move(m)));
    }
    s.solve_ms = quantiles(std::move(times));
    return s;
}

BatchResult batch_run(const Scenario& sc, PlannerMode mode, int n_runs, std::uint64_t base_seed,
                      int workers, const RunOptions& opts)
{
    if (n_runs < 0)
        throw InvalidArgument("n_runs must be non-negative");
    BatchResult out;
    out.runs.resize(static_cast<std::size_t>(n_runs));
    parallel_for(out.runs.size(), workers, [&](std::size_t i) {
        out.runs[i] = simulate_closed_loop(sc, mode, base_seed + i, opts);
    });
    out.stats = batch_stats(out.runs);
    return out;
}

std::pair<BatchResult, BatchResult> batch_run_paired(const Scenario& sc, PlannerMode mode,
                                                     PlannerMode other, int n_runs,
                                                     std::uint64_t base_seed, int workers,
                                                     const RunOptions& opts)
{
    if (n_runs < 0)
        throw InvalidArgument("n_runs must be non-negative");
    std::pair<BatchResult, BatchResult> out;
    out.first.runs.resize(static_cast<std::size_t>(n_runs));
    out.second.runs.resize(static_cast<std::size_t>(n_runs));
    parallel_for(out.first.runs.size(), workers, [&](std::size_t i) {
        out.first.runs[i] = simulate_closed_loop(sc, mode, base_seed + i, opts);
        out.second.runs[i] = simulate_closed_loop(sc, other, base_seed + i, opts);
    });
    out.first.stats = batch_stats(out.first.runs);
    out.second.stats = batch_stats(out.second.runs);
    return out;
}

Response classify_response(const RunRecord& run, std::size_t pass_ov, std::size_t yield_ov)
{
    int first_pass = -1, first_yield = -1;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const StepRecord& s = run.steps[i];
        if (pass_ov >= s.ovs.size() || yield_ov >= s.ovs.size())
            return Response::Other;
        if (first_pass < 0 && s.x(kS) > s.ovs[pass_ov].s)
            first_pass = static_cast<int>(i);
        if (first_yield < 0 && s.ovs[yield_ov].s > s.x(kS))
            first_yield = static_cast<int>(i);
    }
    if (first_pass >= 0 && (first_yield < 0 || first_pass < first_yield))
        return Response::PassThenYield;
    if (first_yield >= 0 && (first_pass < 0 || first_yield < first_pass))
        return Response::YieldThenPass;
    return Response::Other;
}

}  // namespace ccplan
