#include "linalg2.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "errors.hpp"

namespace ccplan {

Mat2 Mat2::rotation(double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c, -s, s, c};
}

Mat2 Mat2::inverse() const
{
    const double d = det();
    if (d == 0.0 || !std::isfinite(d))
        throw NumericError("singular 2x2 matrix");
    return {m22 / d, -m12 / d, -m21 / d, m11 / d};
}

double Mat2::max_abs_diff(const Mat2& o) const
{
    return std::max({std::fabs(m11 - o.m11), std::fabs(m12 - o.m12), std::fabs(m21 - o.m21),
                     std::fabs(m22 - o.m22)});
}

Mat2 RshFactors::shear() const
{
    if (which == UsCase::Case1)
        return {1.0, h, 0.0, 1.0};
    return {1.0, 0.0, h, 1.0};
}

Transform2 RshFactors::decoupling() const
{
    return {scale() * shear(), which == UsCase::Case1 ? TransformKind::US1 : TransformKind::US2};
}

void validate(const Cov2& sigma)
{
    if (!(std::isfinite(sigma.sxx) && std::isfinite(sigma.syy) && std::isfinite(sigma.sxy)))
        throw InvalidArgument("covariance has non-finite entries");
    if (!(sigma.sxx > 0.0) || !(sigma.syy > 0.0)) {
        std::ostringstream os;
        os << "covariance variances must be positive (sxx=" << sigma.sxx << ", syy=" << sigma.syy
           << ")";
        throw InvalidArgument(os.str());
    }
    if (sigma.sxy * sigma.sxy > sigma.sxx * sigma.syy)
        throw InvalidArgument("covariance is not positive semidefinite (|rho| > 1)");
}

double wrap_angle(double angle)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(angle, two_pi);
    if (r <= -std::numbers::pi)
        r += two_pi;
    else if (r > std::numbers::pi)
        r -= two_pi;
    return r;
}

namespace {

// sxx - lambda1 >= 0, evaluated without cancellation.
double gap_to_first_eigenvalue(const Cov2& s, double disc)
{
    if (s.sxx >= s.syy)
        return 0.5 * (s.sxx - s.syy + disc);
    return 2.0 * s.sxy * s.sxy / (disc + s.syy - s.sxx);
}

double condition_number(const EigenPair2& e)
{
    return e.lambda1 > 0.0 ? e.lambda2 / e.lambda1 : INFINITY;
}

EigenPair2 checked_eig(const Cov2& sigma)
{
    EigenPair2 e = eig_sym2(sigma);
    if (!(e.lambda1 > 0.0) || condition_number(e) > kMaxConditionNumber) {
        std::ostringstream os;
        os << "covariance too close to singular for an inverse square root (lambda1="
           << e.lambda1 << ", lambda2=" << e.lambda2 << ", cap=" << kMaxConditionNumber << ")";
        throw NumericError(os.str());
    }
    return e;
}

}  // namespace

EigenPair2 eig_sym2(const Cov2& sigma)
{
    validate(sigma);
    const double disc = std::hypot(sigma.sxx - sigma.syy, 2.0 * sigma.sxy);
    EigenPair2 e;
    e.lambda2 = 0.5 * (sigma.sxx + sigma.syy + disc);
    e.lambda1 = std::max(0.0, sigma.det() / e.lambda2);

    if (sigma.sxy == 0.0) {
        // Removable 0/0 in the closed form; use the canonical basis.
        if (sigma.sxx <= sigma.syy) {
            e.v1 = {1.0, 0.0};
            e.v2 = {0.0, 1.0};
        } else {
            e.v1 = {0.0, 1.0};
            e.v2 = {1.0, 0.0};
        }
        return e;
    }

    // v12 / v11 = -(sxx - lambda1) / sxy, normalized with v12 >= 0.
    const double gap = gap_to_first_eigenvalue(sigma, disc);
    const double len = std::hypot(sigma.sxy, gap);
    e.v1 = {-sigma.sxy / len, gap / len};
    e.v2 = {-e.v1.y, e.v1.x};
    return e;
}

PrincipalRotation principal_rotation(const Cov2& sigma)
{
    validate(sigma);
    PrincipalRotation pr;
    if (sigma.sxy == 0.0) {
        pr.theta = 0.0;
        pr.t = {Mat2::identity(), TransformKind::PA};
        pr.t_inv = pr.t;
        pr.d = {sigma.sxx, sigma.syy, 0.0};
        return pr;
    }
    const EigenPair2 e = eig_sym2(sigma);
    // theta = -atan((lambda1 - sxx) / sxy), the first principal axis.
    pr.theta = -std::atan(e.v1.y / e.v1.x);
    pr.t = {Mat2::rotation(pr.theta), TransformKind::PA};
    pr.t_inv = {pr.t.m.transpose(), TransformKind::PA};
    pr.d = {e.lambda1, e.lambda2, 0.0};
    return pr;
}

Transform2 inv_sqrt_cov(const Cov2& sigma)
{
    const EigenPair2 e = checked_eig(sigma);
    const double r1 = std::sqrt(e.lambda1);
    const double r2 = std::sqrt(e.lambda2);
    const double v11 = e.v1.x, v12 = e.v1.y, v21 = e.v2.x, v22 = e.v2.y;
    const double det_v = v11 * v22 - v21 * v12;
    const double k = 1.0 / (det_v * det_v * r1 * r2);
    const double off = k * (-v11 * v12 * r1 - v21 * v22 * r2);
    return {{k * (v12 * v12 * r1 + v22 * v22 * r2), off, off, k * (v11 * v11 * r1 + v21 * v21 * r2)},
            TransformKind::Identity};
}

RshFactors rsh_decompose(const Cov2& sigma, UsCase which)
{
    const EigenPair2 e = checked_eig(sigma);
    const double l1 = e.lambda1, l2 = e.lambda2;
    const double v11 = e.v1.x, v12 = e.v1.y;
    const Mat2 t0 = inv_sqrt_cov(sigma).m;

    RshFactors f;
    f.which = which;
    if (which == UsCase::Case1) {
        const double w = v12 * v12 * l1 + v11 * v11 * l2;
        f.s1 = std::sqrt(w / (l1 * l2));
        f.s2 = 1.0 / std::sqrt(w);
        f.h = v11 * v12 * (l2 - l1) / w;
        f.alpha = std::atan2(t0.m21, t0.m11);
    } else {
        const double w = v11 * v11 * l1 + v12 * v12 * l2;
        f.s1 = 1.0 / std::sqrt(w);
        f.s2 = std::sqrt(w / (l1 * l2));
        f.h = v11 * v12 * (l2 - l1) / w;
        f.alpha = std::atan2(-t0.m12, t0.m22);
    }
    return f;
}

}  // namespace ccplan
