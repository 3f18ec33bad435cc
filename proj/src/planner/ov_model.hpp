#pragma once

// Object-vehicle motion (stationary or IDM speed tracking with lateral
// feedback) and the configured uncertainty growth over the horizon.

#include <vector>

#include "geometry.hpp"
#include "linalg2.hpp"

namespace ccplan {

struct OvState
{
    double s = 0.0;
    double y = 0.0;
    double phi = 0.0;
    double v = 0.0;
};

/// Body-frame position variances and heading variance growing linearly with
/// the prediction step k: value(k) = initial + k * rate.
struct CovSchedule
{
    double along0 = 0.1;
    double lat0 = 0.1;
    double along_rate = 0.0;
    double lat_rate = 0.0;
    double heading0 = 0.01;
    double heading_rate = 0.0;

    /// Road-frame covariance at step k for a vehicle heading `heading`.
    Cov2 position(int k, double heading) const;
    double heading_var(int k) const;
};

enum class OvBehavior { Stationary, Idm };

struct IdmParams
{
    double v_ref = 0.0;        ///< desired speed
    double a_max = 1.5;        ///< maximum acceleration
    double decel_limit = 3.0;  ///< clamp on the deceleration above v_ref
    double exponent = 4.0;
    double y_ref = 0.0;
    double k_y = 0.05;   ///< heading command per metre of lateral error
    double k_phi = 2.0;  ///< heading-rate gain
};

struct OvTrack
{
    OvState state;
    RectShape shape{2.5, 1.0};
    CovSchedule cov;
    OvBehavior behavior = OvBehavior::Stationary;
    IdmParams idm;
};

OvState ov_step(const OvTrack& track, const OvState& x, double dt);

struct OvPrediction
{
    std::vector<OvState> mean;      ///< index 0 is the current state
    std::vector<Cov2> pos_cov;      ///< index k matches mean[k]
    std::vector<double> heading_var;
};

OvPrediction ov_predict(const OvTrack& track, int n_steps, double dt);

}  // namespace ccplan
