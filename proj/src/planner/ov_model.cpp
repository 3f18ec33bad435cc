#include "planner/ov_model.hpp"

#include <algorithm>
#include <cmath>

namespace ccplan {

Cov2 CovSchedule::position(int k, double heading) const
{
    const Cov2 body{along0 + k * along_rate, lat0 + k * lat_rate, 0.0};
    return body.congruence(Mat2::rotation(heading));
}

double CovSchedule::heading_var(int k) const { return heading0 + k * heading_rate; }

namespace {

OvState derivative(const OvTrack& t, const OvState& x)
{
    if (t.behavior == OvBehavior::Stationary)
        return {};
    const IdmParams& p = t.idm;
    double acc = p.a_max * (1.0 - std::pow(std::max(0.0, x.v) / p.v_ref, p.exponent));
    acc = std::max(acc, -p.decel_limit);
    const double phi_cmd = p.k_y * (p.y_ref - x.y);
    return {x.v * std::cos(x.phi), x.v * std::sin(x.phi), p.k_phi * (phi_cmd - x.phi), acc};
}

OvState axpy(const OvState& x, double h, const OvState& d)
{
    return {x.s + h * d.s, x.y + h * d.y, x.phi + h * d.phi, x.v + h * d.v};
}

}  // namespace

OvState ov_step(const OvTrack& track, const OvState& x, double dt)
{
    if (track.behavior == OvBehavior::Stationary)
        return x;
    const OvState k1 = derivative(track, x);
    const OvState k2 = derivative(track, axpy(x, 0.5 * dt, k1));
    const OvState k3 = derivative(track, axpy(x, 0.5 * dt, k2));
    const OvState k4 = derivative(track, axpy(x, dt, k3));
    OvState out = x;
    out.s += dt / 6.0 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
    out.y += dt / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    out.phi += dt / 6.0 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
    out.v += dt / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    return out;
}

OvPrediction ov_predict(const OvTrack& track, int n_steps, double dt)
{
    OvPrediction p;
    p.mean.reserve(n_steps + 1);
    p.mean.push_back(track.state);
    for (int k = 1; k <= n_steps; ++k)
        p.mean.push_back(ov_step(track, p.mean.back(), dt));
    for (int k = 0; k <= n_steps; ++k) {
        p.pos_cov.push_back(track.cov.position(k, p.mean[k].phi));
        p.heading_var.push_back(track.cov.heading_var(k));
    }
    return p;
}

}  // namespace ccplan
