#include <doctest.h>

#include <cmath>
#include <random>

#include "planner/dynamics.hpp"
#include "planner/ocp.hpp"
#include "planner/ov_model.hpp"
#include "planner/qp.hpp"

using namespace ccplan;

namespace {

State cruise(double v)
{
    State x = State::Zero();
    x(kV) = v;
    return x;
}

State random_state(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    State x;
    x << 10 * u(rng), 3 * u(rng), 0.4 * u(rng), 15 + 5 * u(rng), 2 * u(rng), 0.3 * u(rng);
    return x;
}

}  // namespace

TEST_CASE("ego dynamics: straight cruise only advances s")
{
    const State d = ego_dynamics(cruise(17.0), Input::Zero(), {});
    CHECK(d(kS) == doctest::Approx(17.0));
    for (int i = 1; i < 6; ++i)
        CHECK(d(i) == 0.0);
}

TEST_CASE("ego dynamics: acceleration lag matches the first-order closed form")
{
    const EgoParams p;
    const double dt = 0.15;
    State x = cruise(10.0);
    const Input u{2.0, 0.0};
    // RK4 applied to a linear lag multiplies the error by the 4th-order
    // Taylor polynomial of exp(-dt/tau) every step.
    const double h = -dt / p.tau_a;
    const double amp = 1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24;
    for (int k = 1; k <= 40; ++k) {
        x = rk4_step(x, u, dt, p);
        const double t = k * dt;
        CHECK(x(kA) == doctest::Approx(2.0 * (1.0 - std::pow(amp, k))).epsilon(1e-12));
        CHECK(std::fabs(x(kA) - 2.0 * (1.0 - std::exp(-t / p.tau_a))) < 1e-3);
    }
}

TEST_CASE("ego dynamics: yaw-rate sign flip mirrors the lateral motion")
{
    const EgoParams p;
    State xp = cruise(15.0), xm = cruise(15.0);
    for (int k = 0; k < 30; ++k) {
        xp = rk4_step(xp, Input{0.5, 0.2}, 0.15, p);
        xm = rk4_step(xm, Input{0.5, -0.2}, 0.15, p);
    }
    CHECK(xp(kS) == doctest::Approx(xm(kS)).epsilon(1e-14));
    CHECK(xp(kY) == doctest::Approx(-xm(kY)).epsilon(1e-14));
    CHECK(xp(kPhi) == doctest::Approx(-xm(kPhi)).epsilon(1e-14));
    CHECK(xp(kY) > 0.0);
}

TEST_CASE("rk4 step Jacobians match central differences")
{
    std::mt19937_64 rng(11);
    const EgoParams p;
    for (int trial = 0; trial < 50; ++trial) {
        const State x = random_state(rng);
        const Input u{std::uniform_real_distribution<double>(-4, 4)(rng),
                      std::uniform_real_distribution<double>(-0.5, 0.5)(rng)};
        StateJac a;
        InputJac b;
        const State y = rk4_step(x, u, 0.15, p, a, b);
        CHECK((y - rk4_step(x, u, 0.15, p)).norm() == 0.0);
        const double h = 1e-6;
        for (int j = 0; j < 6; ++j) {
            State xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            const State fd = (rk4_step(xp, u, 0.15, p) - rk4_step(xm, u, 0.15, p)) / (2 * h);
            CHECK((fd - a.col(j)).lpNorm<Eigen::Infinity>() < 1e-6);
        }
        for (int j = 0; j < 2; ++j) {
            Input up = u, um = u;
            up(j) += h;
            um(j) -= h;
            const State fd = (rk4_step(x, up, 0.15, p) - rk4_step(x, um, 0.15, p)) / (2 * h);
            CHECK((fd - b.col(j)).lpNorm<Eigen::Infinity>() < 1e-6);
        }
    }
}

TEST_CASE("qp: projection onto a half-space inside a box")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 6;
        Eigen::VectorXd z0(n), a(n);
        for (int i = 0; i < n; ++i) {
            z0(i) = 3 * g(rng);
            a(i) = g(rng);
        }
        const double b = g(rng);
        QpProblem qp;
        qp.H = Eigen::MatrixXd::Identity(n, n);
        qp.c = -z0;
        qp.G = a.transpose();
        qp.h = Eigen::VectorXd::Constant(1, b);
        qp.lb = Eigen::VectorXd::Constant(n, -INFINITY);
        qp.ub = Eigen::VectorXd::Constant(n, INFINITY);
        const QpResult r = solve_qp(qp);
        REQUIRE(r.status == QpStatus::Solved);
        const double viol = a.dot(z0) - b;
        const Eigen::VectorXd expect = viol > 0 ? Eigen::VectorXd(z0 - viol / a.squaredNorm() * a) : z0;
        CHECK((r.z - expect).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}

TEST_CASE("qp: box-only problem clamps the unconstrained minimizer")
{
    const int n = 5;
    QpProblem qp;
    qp.H = Eigen::MatrixXd::Identity(n, n) * 2.0;
    qp.c = Eigen::VectorXd::LinSpaced(n, -10, 10);
    qp.G = Eigen::MatrixXd::Zero(0, n);
    qp.h = Eigen::VectorXd::Zero(0);
    qp.lb = Eigen::VectorXd::Constant(n, -1.0);
    qp.ub = Eigen::VectorXd::Constant(n, 2.0);
    const QpResult r = solve_qp(qp);
    REQUIRE(r.status == QpStatus::Solved);
    for (int i = 0; i < n; ++i)
        CHECK(r.z(i) == doctest::Approx(std::clamp(-qp.c(i) / 2.0, -1.0, 2.0)).epsilon(1e-6));
}

TEST_CASE("ocp: references at the initial state are already optimal")
{
    OcpSetup setup;
    OcpConstraints cons;
    const State x0 = cruise(20.0);
    const PlanResult r = solve_ocp(x0, {}, {0.0, 20.0}, cons, setup);
    CHECK(r.status == SolverStatus::Feasible);
    CHECK(r.cost < 1e-10);
    for (const State& x : r.x)
        CHECK(std::fabs(x(kY)) < 1e-9);
}

TEST_CASE("ocp: tracking converges and the plan is a rollout of its inputs")
{
    OcpSetup setup;
    OcpConstraints cons;
    State x0 = cruise(17.0);
    x0(kY) = 0.5;
    const PlanResult r = solve_ocp(x0, {}, {0.0, 20.0}, cons, setup);
    REQUIRE(r.status == SolverStatus::Feasible);
    const auto roll = rollout(x0, r.u, setup.dt, setup.ego);
    for (std::size_t k = 0; k < roll.size(); ++k)
        CHECK((roll[k] - r.x[k]).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(r.x.back()(kV) > 19.0);
    CHECK(std::fabs(r.x.back()(kY)) < 0.1);
    for (const Input& u : r.u) {
        CHECK(std::fabs(u(0)) <= setup.limits.a_max + 1e-12);
        CHECK(std::fabs(u(1)) <= setup.limits.gamma_max + 1e-12);
    }
}

TEST_CASE("ocp: road-only corridor gives the same plan as no corridor")
{
    OcpSetup setup;
    State x0 = cruise(17.0);
    x0(kY) = 0.5;
    Corridor road;
    for (int k = 0; k < setup.horizon; ++k) {
        CorridorStep c;
        c.beta_hi = setup.road.y_hi;
        c.beta_lo = setup.road.y_lo;
        road.steps.push_back(c);
    }
    OcpConstraints free_cons;
    OcpConstraints road_cons;
    road_cons.corridor = &road;
    const PlanResult a = solve_ocp(x0, {}, {0.0, 20.0}, free_cons, setup);
    const PlanResult b = solve_ocp(x0, {}, {0.0, 20.0}, road_cons, setup);
    REQUIRE(a.status == SolverStatus::Feasible);
    REQUIRE(b.status == SolverStatus::Feasible);
    for (int k = 0; k < setup.horizon; ++k)
        CHECK((a.u[k] - b.u[k]).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("ocp: convex corridor residuals hold at every step")
{
    OcpSetup setup;
    const State x0 = cruise(17.0);
    Corridor cor;
    for (int k = 1; k <= setup.horizon; ++k) {
        CorridorStep c;
        // Sloped upper bound pushing the ego down to y <= -1 by the end.
        c.alpha_hi = -0.02;
        c.beta_hi = 1.0;
        c.beta_lo = setup.road.y_lo;
        c.s_hi = 17.0 * k * setup.dt + 5.0;
        cor.steps.push_back(c);
    }
    OcpConstraints cons;
    cons.corridor = &cor;
    const PlanResult r = solve_ocp(x0, {}, {0.5, 20.0}, cons, setup);
    REQUIRE(r.status == SolverStatus::Feasible);
    for (int k = 1; k <= setup.horizon; ++k) {
        const CorridorStep& c = cor.steps[k - 1];
        const State& x = r.x[k];
        CHECK(x(kY) - c.upper(x(kS)) <= 1e-6);
        CHECK(c.lower(x(kS)) - x(kY) <= 1e-6);
        CHECK(x(kS) - c.s_hi <= 1e-6);
        CHECK(std::fabs(x(kV) * x(kGamma)) <= setup.limits.mu_f * setup.limits.g + 1e-6);
    }
    // The upper bound binds somewhere since the reference is above it at the end.
    double tightest = -INFINITY;
    for (int k = 1; k <= setup.horizon; ++k)
        tightest = std::max(tightest, r.x[k](kY) - cor.steps[k - 1].upper(r.x[k](kS)));
    CHECK(tightest > -1e-3);
}

TEST_CASE("ocp: an empty corridor is reported infeasible")
{
    OcpSetup setup;
    const State x0 = cruise(17.0);
    Corridor cor;
    for (int k = 1; k <= setup.horizon; ++k) {
        CorridorStep c;
        c.beta_hi = -1.0;
        c.beta_lo = 1.0;
        cor.steps.push_back(c);
    }
    OcpConstraints cons;
    cons.corridor = &cor;
    const PlanResult r = solve_ocp(x0, {}, {0.0, 20.0}, cons, setup);
    CHECK(r.status == SolverStatus::Infeasible);
    CHECK(r.max_violation > 0.5);
}

TEST_CASE("ocp: direct chance constraint keeps the bound below delta")
{
    OcpSetup setup;
    const State x0 = cruise(17.0);
    const Cov2 cov{0.4, 0.4, 0.0};
    const BoundContext ctx(cov, {0.0, 0.02}, {2.5, 1.0}, {2.5, 1.0}, Method::PA, 20);
    OcpConstraints cons;
    cons.delta = 1e-3;
    // Obstacle just below the reference line, ahead of the ego.
    const Vec2 ov{60.0, -1.0};
    for (int k = 1; k <= setup.horizon; ++k)
        cons.direct.push_back({k, &ctx, ov, 0.0});
    const PlanResult r = solve_ocp(x0, {}, {0.0, 17.0}, cons, setup);
    REQUIRE(r.status == SolverStatus::Feasible);
    for (int k = 1; k <= setup.horizon; ++k) {
        const Vec2 dev = Vec2{r.x[k](kS), r.x[k](kY)} - ov;
        CHECK(ctx.value(dev) <= 1e-3 * (1.0 + 1e-5));
    }
}

TEST_CASE("ov model: stationary OV stays put, IDM reaches its reference speed")
{
    OvTrack still;
    still.state = {150.0, -2.0, 0.0, 0.0};
    const OvPrediction ps = ov_predict(still, 40, 0.15);
    for (const OvState& s : ps.mean) {
        CHECK(s.s == 150.0);
        CHECK(s.y == -2.0);
    }

    OvTrack idm;
    idm.behavior = OvBehavior::Idm;
    idm.state = {0.0, 0.0, 0.0, 15.0};
    idm.idm.v_ref = 22.0;
    idm.idm.y_ref = 1.85;
    const OvPrediction pi = ov_predict(idm, 2000, 0.15);
    CHECK(pi.mean.back().v == doctest::Approx(22.0).epsilon(1e-3));
    CHECK(pi.mean.back().y == doctest::Approx(1.85).epsilon(1e-3));
    for (std::size_t k = 1; k < pi.mean.size(); ++k)
        CHECK(pi.mean[k].v >= pi.mean[k - 1].v - 1e-12);

    // Slowing from above the reference is limited by the deceleration clamp.
    OvTrack slow = idm;
    slow.idm.v_ref = 8.0;
    const OvState next = ov_step(slow, slow.state, 0.15);
    CHECK(next.v == doctest::Approx(15.0 - 3.0 * 0.15).epsilon(1e-12));
}

TEST_CASE("ov model: covariance schedule is nondecreasing")
{
    CovSchedule c;
    c.along_rate = 0.05;
    c.lat_rate = 0.01;
    c.heading_rate = 0.001;
    for (int k = 1; k <= 40; ++k) {
        const Cov2 a = c.position(k - 1, 0.3), b = c.position(k, 0.3);
        CHECK(b.sxx + b.syy >= a.sxx + a.syy);
        CHECK(c.heading_var(k) >= c.heading_var(k - 1));
        const Cov2 body = c.position(k, 0.0);
        CHECK(body.sxy == 0.0);
    }
}
