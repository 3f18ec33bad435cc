#pragma once

// Six-state Frenet particle model with first-order lags on acceleration and
// yaw rate, discretized by classic RK4 with a zero-order-hold input.

#include <Eigen/Core>

namespace ccplan {

using State = Eigen::Matrix<double, 6, 1>;  // s, y_e, phi, v, a, gamma
using Input = Eigen::Matrix<double, 2, 1>;  // a_d, gamma_d
using StateJac = Eigen::Matrix<double, 6, 6>;
using InputJac = Eigen::Matrix<double, 6, 2>;

enum StateIndex { kS = 0, kY = 1, kPhi = 2, kV = 3, kA = 4, kGamma = 5 };

struct EgoParams
{
    double tau_a = 0.3;
    double tau_gamma = 0.2;
};

State ego_dynamics(const State& x, const Input& u, const EgoParams& p);

/// Continuous-time Jacobians of ego_dynamics.
void ego_dynamics_jac(const State& x, const EgoParams& p, StateJac& fx, InputJac& fu);

State rk4_step(const State& x, const Input& u, double dt, const EgoParams& p);

/// RK4 step with its exact derivatives with respect to x and u.
State rk4_step(const State& x, const Input& u, double dt, const EgoParams& p, StateJac& a,
               InputJac& b);

}  // namespace ccplan
