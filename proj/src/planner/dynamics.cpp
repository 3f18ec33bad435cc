#include "planner/dynamics.hpp"

#include <cmath>

namespace ccplan {

State ego_dynamics(const State& x, const Input& u, const EgoParams& p)
{
    State d;
    d(kS) = x(kV) * std::cos(x(kPhi));
    d(kY) = x(kV) * std::sin(x(kPhi));
    d(kPhi) = x(kGamma);
    d(kV) = x(kA);
    d(kA) = (u(0) - x(kA)) / p.tau_a;
    d(kGamma) = (u(1) - x(kGamma)) / p.tau_gamma;
    return d;
}

void ego_dynamics_jac(const State& x, const EgoParams& p, StateJac& fx, InputJac& fu)
{
    const double c = std::cos(x(kPhi));
    const double s = std::sin(x(kPhi));
    fx.setZero();
    fx(kS, kPhi) = -x(kV) * s;
    fx(kS, kV) = c;
    fx(kY, kPhi) = x(kV) * c;
    fx(kY, kV) = s;
    fx(kPhi, kGamma) = 1.0;
    fx(kV, kA) = 1.0;
    fx(kA, kA) = -1.0 / p.tau_a;
    fx(kGamma, kGamma) = -1.0 / p.tau_gamma;
    fu.setZero();
    fu(kA, 0) = 1.0 / p.tau_a;
    fu(kGamma, 1) = 1.0 / p.tau_gamma;
}

State rk4_step(const State& x, const Input& u, double dt, const EgoParams& p)
{
    const State k1 = ego_dynamics(x, u, p);
    const State k2 = ego_dynamics(x + 0.5 * dt * k1, u, p);
    const State k3 = ego_dynamics(x + 0.5 * dt * k2, u, p);
    const State k4 = ego_dynamics(x + dt * k3, u, p);
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

State rk4_step(const State& x, const Input& u, double dt, const EgoParams& p, StateJac& a,
               InputJac& b)
{
    StateJac fx;
    InputJac fu;
    const StateJac eye = StateJac::Identity();

    const State k1 = ego_dynamics(x, u, p);
    ego_dynamics_jac(x, p, fx, fu);
    const StateJac k1x = fx;
    const InputJac k1u = fu;

    const State x2 = x + 0.5 * dt * k1;
    const State k2 = ego_dynamics(x2, u, p);
    ego_dynamics_jac(x2, p, fx, fu);
    const StateJac k2x = fx * (eye + 0.5 * dt * k1x);
    const InputJac k2u = fx * (0.5 * dt * k1u) + fu;

    const State x3 = x + 0.5 * dt * k2;
    const State k3 = ego_dynamics(x3, u, p);
    ego_dynamics_jac(x3, p, fx, fu);
    const StateJac k3x = fx * (eye + 0.5 * dt * k2x);
    const InputJac k3u = fx * (0.5 * dt * k2u) + fu;

    const State x4 = x + dt * k3;
    const State k4 = ego_dynamics(x4, u, p);
    ego_dynamics_jac(x4, p, fx, fu);
    const StateJac k4x = fx * (eye + dt * k3x);
    const InputJac k4u = fx * (dt * k3u) + fu;

    a = eye + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    b = dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace ccplan
