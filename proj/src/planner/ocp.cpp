#include "planner/ocp.hpp"

#include <algorithm>
#include <cmath>

#include "planner/qp.hpp"

namespace ccplan {

std::string_view to_string(SolverStatus s)
{
    switch (s) {
    case SolverStatus::Feasible:
        return "feasible";
    case SolverStatus::Infeasible:
        return "infeasible";
    case SolverStatus::IterationLimit:
        return "iteration_limit";
    case SolverStatus::NumericalFailure:
        return "numerical_failure";
    }
    return "?";
}

std::vector<State> rollout(const State& x0, const std::vector<Input>& u, double dt,
                           const EgoParams& p)
{
    std::vector<State> xs;
    xs.reserve(u.size() + 1);
    xs.push_back(x0);
    for (const Input& uk : u)
        xs.push_back(rk4_step(xs.back(), uk, dt, p));
    return xs;
}

double tracking_cost(const std::vector<State>& xs, const std::vector<Input>& u,
                     const References& refs, const Weights& w)
{
    double j = 0.0;
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double ey = xs[k](kY) - refs.y_e;
        const double ev = xs[k](kV) - refs.v;
        j += w.q_ye * ey * ey + w.q_v * ev * ev;
    }
    for (const Input& uk : u)
        j += w.r_a * uk(0) * uk(0) + w.r_gamma * uk(1) * uk(1);
    return j;
}

namespace {

using Grad6 = Eigen::Matrix<double, 6, 1>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Row
{
    int step = 0;
    double value = 0.0;
    Grad6 grad = Grad6::Zero();
};

void add_row(std::vector<Row>& rows, int k, double value, std::initializer_list<std::pair<int, double>> g)
{
    Row r;
    r.step = k;
    r.value = value;
    for (const auto& [i, v] : g)
        r.grad(i) = v;
    rows.push_back(r);
}

// Every inequality c(x_k) <= 0 of the problem, for k = 1..N.
std::vector<Row> constraint_rows(const std::vector<State>& xs, const OcpConstraints& cons,
                                 const OcpSetup& setup)
{
    std::vector<Row> rows;
    const int n = setup.horizon;
    rows.reserve(static_cast<std::size_t>(n) * 10 + cons.direct.size());
    const double f_max = setup.limits.mu_f * setup.limits.g;
    const double log_delta = std::log(cons.delta);
    for (int k = 1; k <= n; ++k) {
        const State& x = xs[k];
        add_row(rows, k, x(kV) - setup.limits.v_max, {{kV, 1.0}});
        add_row(rows, k, -x(kV), {{kV, -1.0}});
        add_row(rows, k, x(kY) - setup.road.y_hi, {{kY, 1.0}});
        add_row(rows, k, setup.road.y_lo - x(kY), {{kY, -1.0}});
        const double lat = x(kV) * x(kGamma);
        add_row(rows, k, lat - f_max, {{kV, x(kGamma)}, {kGamma, x(kV)}});
        add_row(rows, k, -lat - f_max, {{kV, -x(kGamma)}, {kGamma, -x(kV)}});
        if (cons.corridor) {
            const CorridorStep& c = cons.corridor->steps[k - 1];
            add_row(rows, k, x(kY) - c.upper(x(kS)), {{kY, 1.0}, {kS, -c.alpha_hi}});
            add_row(rows, k, c.lower(x(kS)) - x(kY), {{kY, -1.0}, {kS, c.alpha_lo}});
            if (std::isfinite(c.s_hi))
                add_row(rows, k, x(kS) - c.s_hi, {{kS, 1.0}});
            if (std::isfinite(c.s_lo))
                add_row(rows, k, c.s_lo - x(kS), {{kS, -1.0}});
        }
    }
    for (const DirectConstraint& d : cons.direct) {
        const State& x = xs[d.step];
        const Mat2 r = Mat2::rotation(-d.frame);
        const Vec2 dev = r * (Vec2{x(kS), x(kY)} - d.ov_mean);
        Vec2 g;
        const double p = d.ctx->value_and_gradient(dev, g);
        Row row;
        row.step = d.step;
        if (p > 1e-250) {
            const Vec2 gp = r.transpose() * g;
            row.value = std::log(p) - log_delta;
            row.grad(kS) = gp.x / p;
            row.grad(kY) = gp.y / p;
        } else {
            row.value = std::log(1e-250) - log_delta;
        }
        rows.push_back(row);
    }
    return rows;
}

double max_violation(const std::vector<Row>& rows)
{
    double v = 0.0;
    for (const Row& r : rows)
        v = std::max(v, r.value);
    return v;
}

struct Trial
{
    std::vector<State> xs;
    std::vector<Row> rows;
    double cost = 0.0;
    double viol = 0.0;
    double merit = 0.0;
};

Trial evaluate(const State& x0, const std::vector<Input>& u, const References& refs,
               const OcpConstraints& cons, const OcpSetup& setup)
{
    Trial t;
    t.xs = rollout(x0, u, setup.dt, setup.ego);
    t.rows = constraint_rows(t.xs, cons, setup);
    t.cost = tracking_cost(t.xs, u, refs, setup.weights);
    t.viol = max_violation(t.rows);
    t.merit = t.cost + setup.sqp.rho * t.viol;
    return t;
}

bool finite(const Trial& t)
{
    return std::isfinite(t.merit);
}

}  // namespace

PlanResult solve_ocp(const State& x0, const std::vector<Input>& warm_u, const References& refs,
                     const OcpConstraints& cons, const OcpSetup& setup)
{
    const int n = setup.horizon;
    const int nu = 2 * n;
    const int nz = nu + 1;
    const Limits& lim = setup.limits;
    const Weights& w = setup.weights;
    const SqpOptions& opt = setup.sqp;

    std::vector<Input> u(n, Input::Zero());
    for (int k = 0; k < n && k < static_cast<int>(warm_u.size()); ++k) {
        u[k](0) = std::clamp(warm_u[k](0), -lim.a_max, lim.a_max);
        u[k](1) = std::clamp(warm_u[k](1), -lim.gamma_max, lim.gamma_max);
    }

    PlanResult res;
    Trial cur = evaluate(x0, u, refs, cons, setup);
    std::vector<MatrixXd> sens(n + 1, MatrixXd::Zero(6, nu));
    StateJac a;
    InputJac b;
    bool converged = false;
    bool numerical = !finite(cur);

    for (int it = 1; it <= opt.max_iter && !converged && !numerical; ++it) {
        res.iterations = it;
        // Sensitivities d x_k / d u.
        for (int k = 1; k <= n; ++k) {
            rk4_step(cur.xs[k - 1], u[k - 1], setup.dt, setup.ego, a, b);
            sens[k].leftCols(2 * (k - 1)).noalias() = a * sens[k - 1].leftCols(2 * (k - 1));
            sens[k].middleCols(2 * (k - 1), 2) = b;
        }

        // Gauss-Newton model of the tracking cost.
        QpProblem qp;
        qp.H = MatrixXd::Zero(nz, nz);
        qp.c = VectorXd::Zero(nz);
        for (int k = 1; k <= n; ++k) {
            const auto jy = sens[k].row(kY).leftCols(2 * k);
            const auto jv = sens[k].row(kV).leftCols(2 * k);
            const double ey = cur.xs[k](kY) - refs.y_e;
            const double ev = cur.xs[k](kV) - refs.v;
            qp.H.topLeftCorner(2 * k, 2 * k).noalias() += 2.0 * w.q_ye * jy.transpose() * jy;
            qp.H.topLeftCorner(2 * k, 2 * k).noalias() += 2.0 * w.q_v * jv.transpose() * jv;
            qp.c.head(2 * k) += 2.0 * w.q_ye * ey * jy.transpose() + 2.0 * w.q_v * ev * jv.transpose();
        }
        qp.lb.resize(nz);
        qp.ub.resize(nz);
        for (int k = 0; k < n; ++k) {
            qp.H(2 * k, 2 * k) += 2.0 * w.r_a;
            qp.H(2 * k + 1, 2 * k + 1) += 2.0 * w.r_gamma;
            qp.c(2 * k) += 2.0 * w.r_a * u[k](0);
            qp.c(2 * k + 1) += 2.0 * w.r_gamma * u[k](1);
            qp.lb(2 * k) = -lim.a_max - u[k](0);
            qp.ub(2 * k) = lim.a_max - u[k](0);
            qp.lb(2 * k + 1) = -lim.gamma_max - u[k](1);
            qp.ub(2 * k + 1) = lim.gamma_max - u[k](1);
        }
        // Elastic slack: linear exact penalty plus a unit quadratic term that
        // keeps the QP strictly convex.
        qp.H(nu, nu) = 1.0;
        qp.c(nu) = opt.rho;
        qp.lb(nu) = 0.0;
        qp.ub(nu) = INFINITY;

        // Linearized rows; only near-active ones enter the QP, the rest are
        // re-checked against the QP step.
        const std::size_t n_rows = cur.rows.size();
        MatrixXd lin(n_rows, nu);
        for (std::size_t i = 0; i < n_rows; ++i) {
            const Row& r = cur.rows[i];
            lin.row(i) = r.grad.transpose() * sens[r.step];
        }
        std::vector<char> active(n_rows, 0);
        for (std::size_t i = 0; i < n_rows; ++i)
            active[i] = cur.rows[i].value > -opt.row_margin;

        QpResult sol;
        for (int pass = 0; pass < 8; ++pass) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < n_rows; ++i)
                if (active[i])
                    idx.push_back(i);
            qp.G = MatrixXd::Zero(idx.size(), nz);
            qp.h.resize(idx.size());
            for (std::size_t r = 0; r < idx.size(); ++r) {
                qp.G.row(r).head(nu) = lin.row(idx[r]);
                qp.G(r, nu) = -1.0;
                qp.h(r) = -cur.rows[idx[r]].value;
            }
            sol = solve_qp(qp);
            res.qp_iterations += sol.iterations;
            if (sol.status != QpStatus::Solved)
                break;
            bool added = false;
            const double t = sol.z(nu);
            for (std::size_t i = 0; i < n_rows; ++i) {
                if (active[i])
                    continue;
                const double pred = cur.rows[i].value + lin.row(i).dot(sol.z.head(nu));
                if (pred > t + 1e-9) {
                    active[i] = 1;
                    added = true;
                }
            }
            if (!added)
                break;
        }
        if (sol.status != QpStatus::Solved || !sol.z.allFinite()) {
            numerical = true;
            break;
        }

        const VectorXd du = sol.z.head(nu);
        const double t = std::max(0.0, sol.z(nu));
        const double dir = qp.c.head(nu).dot(du) - opt.rho * (cur.viol - std::min(t, cur.viol));
        if (-dir <= opt.tol * (1.0 + std::fabs(cur.merit)) || du.lpNorm<Eigen::Infinity>() < 1e-12) {
            converged = true;
            break;
        }

        double alpha = 1.0;
        bool accepted = false;
        std::vector<Input> trial_u(n);
        for (int ls = 0; ls < 30; ++ls) {
            for (int k = 0; k < n; ++k) {
                trial_u[k](0) = std::clamp(u[k](0) + alpha * du(2 * k), -lim.a_max, lim.a_max);
                trial_u[k](1) =
                    std::clamp(u[k](1) + alpha * du(2 * k + 1), -lim.gamma_max, lim.gamma_max);
            }
            Trial tr = evaluate(x0, trial_u, refs, cons, setup);
            if (finite(tr) && tr.merit <= cur.merit + 1e-4 * alpha * std::min(dir, 0.0)) {
                u = trial_u;
                cur = std::move(tr);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // No merit decrease along the QP direction: treat as stationary.
            converged = true;
            break;
        }
    }

    res.x = cur.xs;
    res.u = u;
    res.cost = cur.cost;
    res.max_violation = cur.viol;
    if (numerical)
        res.status = SolverStatus::NumericalFailure;
    else if (cur.viol > opt.feas_tol)
        res.status = SolverStatus::Infeasible;
    else if (!converged)
        res.status = SolverStatus::IterationLimit;
    else
        res.status = SolverStatus::Feasible;
    return res;
}

}  // namespace ccplan
