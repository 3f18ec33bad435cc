#include "monte_carlo.hpp"

#include <algorithm>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace ccplan {

namespace {

constexpr std::uint64_t kChunk = 1024;
constexpr std::uint64_t kMcStream = 0x4d43;
constexpr std::uint64_t kGridStream = 0x4752;

struct Chol2
{
    double l11 = 0.0, l21 = 0.0, l22 = 0.0;
};

Chol2 cholesky_psd(const Cov2& c)
{
    if (!(c.sxx >= 0.0) || !(c.syy >= 0.0) || c.sxy * c.sxy > c.sxx * c.syy * (1.0 + 1e-12))
        throw InvalidArgument("sampling covariance must be positive semidefinite");
    Chol2 l;
    l.l11 = std::sqrt(c.sxx);
    l.l21 = l.l11 > 0.0 ? c.sxy / l.l11 : 0.0;
    l.l22 = std::sqrt(std::max(0.0, c.syy - l.l21 * l.l21));
    return l;
}

struct Sampler
{
    Vec2 mean;
    Chol2 l;
    double h_mu = 0.0;
    double h_sd = 0.0;

    explicit Sampler(const VehicleBelief& b)
        : mean(b.pos.mean), l(cholesky_psd(b.pos.cov)), h_mu(b.heading.mu),
          h_sd(std::sqrt(std::max(0.0, b.heading.var)))
    {
    }

    Pose draw(Rng& rng, std::normal_distribution<double>& n) const
    {
        const double z1 = n(rng);
        const double z2 = n(rng);
        const double zh = n(rng);
        return {mean.x + l.l11 * z1, mean.y + l.l21 * z1 + l.l22 * z2, h_mu + h_sd * zh};
    }
};

}  // namespace

McEstimate monte_carlo_prob(const VehicleBelief& ego, const VehicleBelief& ov,
                            std::uint64_t n_samples, std::uint64_t seed, int workers)
{
    if (n_samples < 1)
        throw InvalidArgument("Monte Carlo needs at least one sample");
    validate(ego.shape);
    validate(ov.shape);
    const Sampler se(ego);
    const Sampler so(ov);

    const std::uint64_t n_chunks = (n_samples + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> hits(n_chunks, 0);
    parallel_for(n_chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, kMcStream, c));
        std::normal_distribution<double> normal;
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(n_samples, begin + kChunk);
        std::uint64_t h = 0;
        for (std::uint64_t k = begin; k < end; ++k) {
            const Pose pe = se.draw(rng, normal);
            const Pose po = so.draw(rng, normal);
            if (oriented_rect_overlap(pe, ego.shape, po, ov.shape))
                ++h;
        }
        hits[c] = h;
    });

    McEstimate est;
    est.samples = n_samples;
    for (const std::uint64_t h : hits)
        est.hits += h;
    const double n = static_cast<double>(n_samples);
    est.estimate = static_cast<double>(est.hits) / n;
    est.std_err = std::sqrt(est.estimate * (1.0 - est.estimate) / n);
    return est;
}

double comparison_std_err(const McEstimate& mc)
{
    const double n = static_cast<double>(mc.samples);
    const double p = (static_cast<double>(mc.hits) + 2.0) / (n + 4.0);
    return std::max(mc.std_err, std::sqrt(p * (1.0 - p) / (n + 4.0)));
}

bool bound_dominates(double bound, const McEstimate& mc, double k)
{
    return bound >= mc.estimate - k * comparison_std_err(mc);
}

std::pair<VehicleBelief, VehicleBelief> beliefs_at(const ContourConfig& cfg, Vec2 rel)
{
    VehicleBelief ego{{Mat2::rotation(cfg.ego_heading.mu) * rel, cfg.ego_cov}, cfg.ego_heading,
                      cfg.ego_shape};
    VehicleBelief ov{{{0.0, 0.0}, cfg.ov_cov}, cfg.ov_heading, cfg.ov_shape};
    return {ego, ov};
}

std::vector<ContourCell> contour_grid(const ContourConfig& cfg, std::uint64_t seed, int workers)
{
    if (cfg.grid.nx < 1 || cfg.grid.ny < 1)
        throw InvalidArgument("contour grid must have at least one cell per axis");
    if (cfg.grid.x_max < cfg.grid.x_min || cfg.grid.y_max < cfg.grid.y_min)
        throw InvalidArgument("contour grid bounds are reversed");

    // Everything except the mean is shared by all cells.
    const auto [ego0, ov0] = beliefs_at(cfg, {0.0, 0.0});
    const Deviation dev0 = make_deviation(ego0, ov0);
    const BoundContext us1(dev0.pos.cov, dev0.heading, cfg.ego_shape, cfg.ov_shape, Method::US1,
                           cfg.n_phi);
    const BoundContext pa(dev0.pos.cov, dev0.heading, cfg.ego_shape, cfg.ov_shape, Method::PA,
                          cfg.n_phi);

    const std::size_t n = static_cast<std::size_t>(cfg.grid.nx) * cfg.grid.ny;
    std::vector<ContourCell> cells(n);
    parallel_for(n, workers, [&](std::size_t idx) {
        const int i = static_cast<int>(idx / cfg.grid.ny);
        const int j = static_cast<int>(idx % cfg.grid.ny);
        ContourCell& c = cells[idx];
        c.mu_x = cfg.grid.x_at(i);
        c.mu_y = cfg.grid.y_at(j);
        c.p_us1 = us1.value({c.mu_x, c.mu_y});
        c.p_pa = pa.value({c.mu_x, c.mu_y});
        if (cfg.mc_samples > 0) {
            const auto [ego, ov] = beliefs_at(cfg, {c.mu_x, c.mu_y});
            const McEstimate mc =
                monte_carlo_prob(ego, ov, cfg.mc_samples, derive_seed(seed, kGridStream, idx));
            c.p_mc = mc.estimate;
            c.mc_stderr = mc.std_err;
            c.mc_hits = mc.hits;
            c.mc_samples = mc.samples;
        }
    });
    return cells;
}

}  // namespace ccplan
