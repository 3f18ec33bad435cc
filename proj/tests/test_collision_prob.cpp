#include <random>

#include "collision_prob.hpp"
#include "doctest.h"
#include "monte_carlo.hpp"
#include "normal.hpp"
#include "oracles.hpp"

using namespace ccplan;

namespace {

VehicleBelief belief(Vec2 mean, Cov2 cov, HeadingStats h, RectShape shape = {2.5, 1.0})
{
    return {{mean, cov}, h, shape};
}

}  // namespace

TEST_CASE("partition_heading")
{
    const auto p1 = partition_heading({0.0, 0.01}, 1);
    REQUIRE(p1.size() == 3);
    const double half = std::numbers::pi / 2;
    CHECK(p1[1].prob == doctest::Approx(std_normal_cdf(half / 0.1) - std_normal_cdf(-half / 0.1)));
    CHECK(p1[1].prob > 1.0 - 1e-12);
    CHECK(std::isinf(p1[0].lo));
    CHECK(std::isinf(p1[2].hi));

    const auto p20 = partition_heading({0.0, 0.04}, 20);
    REQUIRE(p20.size() == 22);
    double sum = 0.0;
    for (const auto& iv : p20) {
        sum += iv.prob;
        if (!iv.is_tail()) {
            const double quad = oracle::normal_mass_quad(iv.lo / 0.2, iv.hi / 0.2);
            CHECK(std::fabs(iv.prob - quad) < 1e-10);
        }
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mu(-3.0, 3.0), sd(0.01, 2.0);
    std::uniform_int_distribution<int> n(1, 40);
    for (int k = 0; k < 500; ++k) {
        double s = 0.0;
        const double sigma = sd(rng);
        for (const auto& iv : partition_heading({mu(rng), sigma * sigma}, n(rng)))
            s += iv.prob;
        REQUIRE(std::fabs(s - 1.0) < 1e-12);
    }

    // Zero variance puts all mass on one central interval.
    double s0 = 0.0;
    for (const auto& iv : partition_heading({0.3, 0.0}, 4))
        s0 += iv.prob;
    CHECK(s0 == 1.0);
}

TEST_CASE("conditional_box_prob")
{
    CHECK(conditional_box_prob({0, 0}, {1e12, 1e12, 0}, {1.0, 1.0}) < 1e-10);
    CHECK(conditional_box_prob({0, 0}, {1e-12, 1e-12, 0}, {1.0, 1.0}) == doctest::Approx(1.0));
    const double expect = (oracle::normal_cdf_quad(0.0) - oracle::normal_cdf_quad(-2.0)) *
                          (oracle::normal_cdf_quad(1.0) - oracle::normal_cdf_quad(-1.0));
    CHECK(std::fabs(conditional_box_prob({1.0, 0.0}, {1.0, 1.0, 0.0}, {1.0, 1.0}) - expect) < 1e-12);
}

TEST_CASE("decouple yields diagonal covariances")
{
    const Cov2 s = Cov2::from_sigma_rho(1.3, 0.6, -0.7);
    for (const Method m : {Method::PA, Method::US1, Method::US2}) {
        const Decoupling d = decouple(s, m);
        const Cov2 c = s.congruence(d.t.m);
        CHECK(std::fabs(c.sxy) < 1e-12);
        CHECK(std::fabs(std::sqrt(c.sxx) - d.sigma1) < 1e-12);
        CHECK(std::fabs(std::sqrt(c.syy) - d.sigma2) < 1e-12);
        CHECK((d.t.m * d.t_inv).max_abs_diff(Mat2::identity()) < 1e-12);
    }
}

TEST_CASE("prob_upper_bound limits")
{
    const HeadingStats h{0.0, 1e-6};
    const auto near = prob_upper_bound(belief({0, 0}, {1e-6, 1e-6, 0}, h),
                                       belief({0, 0}, {1e-6, 1e-6, 0}, {0.0, 0.0}), Method::PA, 20);
    CHECK(near.value == doctest::Approx(1.0).epsilon(1e-9));
    const auto far = prob_upper_bound(belief({1000, 0}, {0.09, 0.09, 0}, {0.0, 0.0}),
                                      belief({0, 0}, {0.0001, 0.0001, 0}, {0.0, 0.01}),
                                      Method::US1, 20);
    CHECK(far.value < 1e-12);

    double sum = 0.0;
    for (const auto& [iv, cond] : near.per_interval)
        sum += iv.prob * cond;
    CHECK(sum == doctest::Approx(near.value));
}

TEST_CASE("methods agree on decoupled input")
{
    const Deviation dev{{{3.0, 1.5}, {0.8, 0.3, 0.0}}, {0.0, 1e-10}, 0.0};
    const double pa = prob_upper_bound(dev, {2.5, 1.0}, {2.0, 0.9}, Method::PA, 20).value;
    const double u1 = prob_upper_bound(dev, {2.5, 1.0}, {2.0, 0.9}, Method::US1, 20).value;
    const double u2 = prob_upper_bound(dev, {2.5, 1.0}, {2.0, 0.9}, Method::US2, 20).value;
    CHECK(std::fabs(pa - u1) < 1e-6);
    CHECK(std::fabs(pa - u2) < 1e-6);
}

TEST_CASE("make_deviation aligns with the ego heading")
{
    const double q = std::numbers::pi / 2;
    const auto ego = belief({10.0, 5.0}, {0.5, 0.1, 0.0}, {q, 0.01});
    const auto ov = belief({10.0, 2.0}, {0.2, 0.1, 0.0}, {q + 0.2, 0.02});
    const Deviation d = make_deviation(ego, ov);
    // Ego faces +y, so the OV sitting 3 m behind it is 3 m along -x' in the aligned frame.
    CHECK(d.pos.mean.x == doctest::Approx(3.0));
    CHECK(std::fabs(d.pos.mean.y) < 1e-12);
    CHECK(d.pos.cov.sxx == doctest::Approx(0.2));
    CHECK(d.pos.cov.syy == doctest::Approx(0.7));
    CHECK(d.heading.mu == doctest::Approx(0.2));
    CHECK(d.heading.var == doctest::Approx(0.03));
}

TEST_CASE("gradient matches finite differences")
{
    const BoundContext ctx(Cov2::from_sigma_rho(1.0, 0.5, 0.6), {0.1, 0.01}, {2.5, 1.0},
                           {2.5, 1.0}, Method::US1, 20);
    for (const Vec2 m : {Vec2{4.0, 1.0}, Vec2{-6.0, 2.5}, Vec2{1.0, -3.0}}) {
        Vec2 g;
        const double v = ctx.value_and_gradient(m, g);
        CHECK(v == doctest::Approx(ctx.value(m)).epsilon(1e-14));
        const double hstep = 1e-6;
        const double gx = (ctx.value({m.x + hstep, m.y}) - ctx.value({m.x - hstep, m.y})) / (2 * hstep);
        const double gy = (ctx.value({m.x, m.y + hstep}) - ctx.value({m.x, m.y - hstep})) / (2 * hstep);
        CHECK(std::fabs(g.x - gx) < 1e-7);
        CHECK(std::fabs(g.y - gy) < 1e-7);
    }
}

TEST_CASE("n_phi refinement")
{
    const Cov2 c = Cov2::from_sigma_rho(0.9, 0.5, 0.3);
    const HeadingStats h{0.2, 0.04};
    for (const Vec2 m : {Vec2{5.0, 0.5}, Vec2{2.0, 3.0}, Vec2{0.0, 0.0}}) {
        double prev = -1.0;
        for (const int n : {1, 2, 5, 10, 20, 40}) {
            const BoundContext ctx(c, h, {2.5, 1.0}, {2.5, 1.0}, Method::PA, n);
            const double tail = ctx.terms().front().interval.prob + ctx.terms().back().interval.prob;
            const double v = ctx.value(m);
            if (prev >= 0.0)
                CHECK(v <= prev + tail + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("monte carlo estimator")
{
    const auto a = belief({0, 0}, {0, 0, 0}, {0, 0});
    const auto b = belief({50, 0}, {0, 0, 0}, {0, 0});
    CHECK(monte_carlo_prob(a, b, 1000, 1).estimate == 0.0);
    CHECK(monte_carlo_prob(a, a, 1000, 1).estimate == 1.0);

    const auto ego = belief({5.0, 1.5}, Cov2::from_sigma_rho(0.7, 0.35, 0.3), {0.0, 0.0});
    const auto ov = belief({0, 0}, Cov2::from_sigma_rho(0.7, 0.35, 0.3), {0.1, 0.01});
    const McEstimate small = monte_carlo_prob(ego, ov, 10000, 42);
    const McEstimate again = monte_carlo_prob(ego, ov, 10000, 42, 3);
    CHECK(small.hits == again.hits);
    CHECK(small.estimate == again.estimate);
    const McEstimate big = monte_carlo_prob(ego, ov, 1000000, 43, 2);
    CHECK(std::fabs(small.estimate - big.estimate) <= 3.0 * std::hypot(small.std_err, big.std_err));
    CHECK(small.std_err == doctest::Approx(std::sqrt(small.estimate * (1 - small.estimate) / 1e4)));
}

TEST_CASE("bound is conservative against monte carlo")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> sd(0.1, 1.0), rho(-0.9, 0.9), hsd(0.05, 0.3);
    std::uniform_real_distribution<double> off(-9.0, 9.0), offy(-4.0, 4.0), mu(-0.5, 0.5);
    int violations = 0;
    for (int n = 0; n < 200; ++n) {
        const double s = hsd(rng);
        const auto ego = belief({off(rng), offy(rng)}, Cov2::from_sigma_rho(sd(rng), sd(rng), rho(rng)),
                                {0.0, 0.0});
        const auto ov = belief({0, 0}, Cov2::from_sigma_rho(sd(rng), sd(rng), rho(rng)),
                               {mu(rng), s * s}, {2.2, 0.9});
        const McEstimate mc = monte_carlo_prob(ego, ov, 10000, 1000 + n);
        for (const Method m : {Method::PA, Method::US1, Method::US2}) {
            const double b = prob_upper_bound(ego, ov, m, 20).value;
            if (!bound_dominates(b, mc)) {
                ++violations;
                MESSAGE("n=" << n << " m=" << to_string(m) << " b=" << b << " mc=" << mc.estimate
                             << " se=" << mc.std_err << " ego=(" << ego.pos.mean.x << ","
                             << ego.pos.mean.y << ") rho=" << ego.pos.cov.rho() << " ovrho="
                             << ov.pos.cov.rho() << " hs=" << s);
            }
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("contour grid")
{
    ContourConfig cfg;
    cfg.ego_cov = Cov2::from_sigma_rho(0.7, 0.35, 0.6);
    cfg.ov_cov = cfg.ego_cov;
    cfg.ov_heading = {0.1, 0.01};
    cfg.grid = {0.0, 0.0, 1, 0.0, 0.0, 1};
    cfg.mc_samples = 2000;
    const auto one = contour_grid(cfg, 1, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].p_pa > 0.99);
    CHECK(one[0].p_us1 > 0.99);

    cfg.grid = {-40.0, 40.0, 5, -30.0, 30.0, 3};
    const auto g = contour_grid(cfg, 9, 2);
    REQUIRE(g.size() == 15);
    CHECK(g.front().p_pa < 1e-9);
    CHECK(g.front().p_us1 < 1e-9);
    const auto g1 = contour_grid(cfg, 9, 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g[i].p_mc == g1[i].p_mc);
        const McEstimate mc = g[i].mc();
        CHECK(bound_dominates(g[i].p_pa, mc));
        CHECK(bound_dominates(g[i].p_us1, mc));
    }

    cfg.grid = {0.0, 0.0, 0, 0.0, 0.0, 1};
    CHECK_THROWS(contour_grid(cfg, 1, 1));
}
