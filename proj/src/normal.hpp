#pragma once

#include <cmath>
#include <numbers>

namespace ccplan {

// Standard normal CDF/PDF on the extended reals. erfc is the libm
// rational approximation (sub-ulp relative error on the whole line).

inline double std_normal_cdf(double z)
{
    return 0.5 * std::erfc(-z * std::numbers::sqrt2 * 0.5);
}

inline double std_normal_pdf(double z)
{
    if (std::isinf(z))
        return 0.0;
    constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599343818684758586311649;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

/// Upper tail 1 - Psi(z).
inline double std_normal_sf(double z) { return std_normal_cdf(-z); }

/// Psi(hi) - Psi(lo), evaluated on whichever tail avoids cancellation.
inline double std_normal_interval(double lo, double hi)
{
    if (!(hi > lo))
        return 0.0;
    if (lo >= 0.0)
        return std_normal_sf(lo) - std_normal_sf(hi);
    if (hi <= 0.0)
        return std_normal_cdf(hi) - std_normal_cdf(lo);
    return 1.0 - std_normal_cdf(lo) - std_normal_sf(hi);
}

}  // namespace ccplan
