#pragma once

// Closed-form 2x2 numerics for covariance decoupling: symmetric eigenpairs,
// the principal-axes rotation, the inverse matrix square root and its
// rotation/scale/shear factorization.

#include <array>
#include <cmath>

namespace ccplan {

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Row-major 2x2 matrix.
struct Mat2
{
    double m11 = 1.0, m12 = 0.0;
    double m21 = 0.0, m22 = 1.0;

    static Mat2 identity() { return {}; }
    static Mat2 rotation(double angle);
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    Mat2 transpose() const { return {m11, m21, m12, m22}; }
    Mat2 abs() const { return {std::fabs(m11), std::fabs(m12), std::fabs(m21), std::fabs(m22)}; }
    double det() const { return m11 * m22 - m12 * m21; }
    Mat2 inverse() const;

    Vec2 operator*(Vec2 v) const { return {m11 * v.x + m12 * v.y, m21 * v.x + m22 * v.y}; }
    Mat2 operator*(const Mat2& o) const
    {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }
    double max_abs_diff(const Mat2& o) const;
};

/// Symmetric positive (semi)definite 2x2 covariance [sxx sxy; sxy syy].
struct Cov2
{
    double sxx = 1.0;
    double syy = 1.0;
    double sxy = 0.0;

    static Cov2 from_sigma_rho(double sigma_x, double sigma_y, double rho)
    {
        return {sigma_x * sigma_x, sigma_y * sigma_y, rho * sigma_x * sigma_y};
    }
    static Cov2 from_mat(const Mat2& m) { return {m.m11, m.m22, 0.5 * (m.m12 + m.m21)}; }

    Mat2 mat() const { return {sxx, sxy, sxy, syy}; }
    double det() const { return sxx * syy - sxy * sxy; }
    double rho() const { return sxy / std::sqrt(sxx * syy); }
    bool is_diagonal() const { return sxy == 0.0; }

    /// T * this * T^T
    Cov2 congruence(const Mat2& t) const { return from_mat(t * mat() * t.transpose()); }
    Cov2 operator+(const Cov2& o) const { return {sxx + o.sxx, syy + o.syy, sxy + o.sxy}; }
    friend bool operator==(const Cov2&, const Cov2&) = default;
};

/// Throws InvalidArgument unless sxx > 0, syy > 0 and the matrix is PSD.
void validate(const Cov2& sigma);

/// lambda1 <= lambda2; v1, v2 unit and orthogonal.
struct EigenPair2
{
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Vec2 v1;
    Vec2 v2;
};

enum class TransformKind { Identity, PA, US1, US2 };

struct Transform2
{
    Mat2 m;
    TransformKind kind = TransformKind::Identity;
};

enum class UsCase { Case1 = 1, Case2 = 2 };

/// T0 = R(alpha) * S(s1, s2) * H(h); H shears along axis 1 (case 1) or axis 2 (case 2).
struct RshFactors
{
    double alpha = 0.0;
    double s1 = 1.0;
    double s2 = 1.0;
    double h = 0.0;
    UsCase which = UsCase::Case1;

    Mat2 rotation() const { return Mat2::rotation(alpha); }
    Mat2 scale() const { return Mat2::diag(s1, s2); }
    Mat2 shear() const;
    /// S * H, the decoupling transform once the rotation is undone.
    Transform2 decoupling() const;
};

struct PrincipalRotation
{
    double theta = 0.0;  ///< |theta| <= pi/2
    Transform2 t;        ///< rows are the principal axes
    Transform2 t_inv;    ///< transpose of t
    Cov2 d;              ///< t * sigma * t^T, diagonal
};

/// Condition number above which inverse square roots are refused.
inline constexpr double kMaxConditionNumber = 1e12;

EigenPair2 eig_sym2(const Cov2& sigma);
PrincipalRotation principal_rotation(const Cov2& sigma);
Transform2 inv_sqrt_cov(const Cov2& sigma);
RshFactors rsh_decompose(const Cov2& sigma, UsCase which);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace ccplan
