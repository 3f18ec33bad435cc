// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fails.
// Usage: acceptance CONFIG_DIR OUT_DIR [--workers N] [--only K]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "collision_prob.hpp"
#include "convexify.hpp"
#include "io/commands.hpp"
#include "linalg2.hpp"
#include "oracles.hpp"

using namespace ccplan;
using namespace ccplan::io;
namespace fs = std::filesystem;

namespace {

struct Context
{
    std::string configs;
    std::string out;
    int workers = 4;
};

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fresh(const Context& c, const std::string& name)
{
    const fs::path p = fs::path(c.out) / name;
    fs::remove_all(p);
    return p.string();
}

Json run(const Context& c, const std::string& cmd, const std::string& cfg, const std::string& out,
         CommandOptions opts)
{
    return run_command(cmd, (fs::path(c.configs) / cfg).string(), out, opts);
}

CommandOptions with_workers(const Context& c)
{
    CommandOptions o;
    o.workers = c.workers;
    return o;
}

// 1. Decomposition exactness over random SPD covariances.
Outcome decomposition(const Context&)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> sd(0.05, 5.0), rho(-0.99, 0.99);
    double e_t0 = 0.0, e_rsh = 0.0, e_pa = 0.0;
    for (int n = 0; n < 10000; ++n) {
        const Cov2 s = Cov2::from_sigma_rho(sd(rng), sd(rng), rho(rng));
        const Mat2 t0 = inv_sqrt_cov(s).m;
        e_t0 = std::max(e_t0, s.congruence(t0).mat().max_abs_diff(Mat2::identity()));
        for (UsCase c : {UsCase::Case1, UsCase::Case2}) {
            const RshFactors f = rsh_decompose(s, c);
            e_rsh = std::max(e_rsh, (f.rotation() * f.scale() * f.shear()).max_abs_diff(t0));
        }
        // Eigenvalues from the independent Jacobi oracle.
        const oracle::Eig ref = oracle::jacobi2(s.sxx, s.sxy, s.syy);
        const Cov2 d = s.congruence(principal_rotation(s).t.m);
        e_pa = std::max({e_pa, std::fabs(d.sxy), std::fabs(d.sxx - ref.l1), std::fabs(d.syy - ref.l2)});
    }
    const bool ok = e_t0 < 1e-9 && e_rsh < 1e-9 && e_pa < 1e-9;
    return {ok, "T0 " + fmt("%.2e", e_t0) + ", RSH " + fmt("%.2e", e_rsh) + ", PA " + fmt("%.2e", e_pa)};
}

// 2. Conservatism limits of the transformed boxes.
Outcome conservatism(const Context& c)
{
    const Json s = run(c, "conservatism", "conservatism.json", fresh(c, "c2_conservatism"), {});
    const double a = s["a"], b = s["b"];
    const bool paper_dims = a == 4.0 && b == 2.0;
    const double lo = s["pa_min"], hi = s["pa_max"];
    const bool pa_ok = lo >= 2.0 - 1e-9 && hi <= std::sqrt(20.0) + 1e-9;
    const double e1 = s["us1_b_scaled_max_error"], e2 = s["us2_a_scaled_max_error"];
    const bool mono = s["us1_a_scaled_monotone_in_abs_rho"];
    const bool ok = paper_dims && pa_ok && e1 <= 1e-12 && e2 <= 1e-12 && mono;
    return {ok, "PA in [" + fmt("%.12g", lo) + ", " + fmt("%.12g", hi) + "], US1 b'' err " +
                    fmt("%.1e", e1) + ", US2 a'' err " + fmt("%.1e", e2) +
                    (mono ? ", US1 a'' monotone" : ", US1 a'' NOT monotone")};
}

// 3. Upper-bound validity against Monte Carlo on the contour grid.
Outcome contours(const Context& c)
{
    const Json s = run(c, "contours", "contours.json", fresh(c, "c3_contours"), with_workers(c));
    const bool grid = s["cells"] == 41 * 41 && s["mc_samples"] == 10000;
    const bool ok = grid && s["us1_dominates_mc"] == true && s["pa_dominates_mc"] == true &&
                    s["us1_contains_mc_contour"] == true && s["pa_contains_mc_contour"] == true;
    return {ok, std::to_string(s["cells"].get<int>()) + " cells, dominance failures US1 " +
                    std::to_string(s["us1_dominance_failures"].get<int>()) + " PA " +
                    std::to_string(s["pa_dominance_failures"].get<int>()) +
                    ", delta-contour cells MC/US1/PA " +
                    std::to_string(s["mc_cells_at_or_above_delta"].get<int>()) + "/" +
                    std::to_string(s["us1_cells_at_or_above_delta"].get<int>()) + "/" +
                    std::to_string(s["pa_cells_at_or_above_delta"].get<int>())};
}

// 4. Threshold search against a bisection oracle.
Outcome pts(const Context&)
{
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> sd(0.1, 2.0), rho(-0.95, 0.95), hsd(0.01, 0.5);
    std::uniform_real_distribution<double> logd(-6.0, -1.0), len(0.5, 3.0), mu(-0.5, 0.5);
    std::uniform_int_distribution<int> axis(0, 1), meth(0, 2), nphi(1, 40);
    int contexts = 0, within = 0;
    double worst_p = 0.0, worst_mu = 0.0;
    while (contexts < 500) {
        const double h = hsd(rng);
        const BoundContext ctx(Cov2::from_sigma_rho(sd(rng), sd(rng), rho(rng)), {mu(rng), h * h},
                               {len(rng), len(rng) / 2}, {len(rng), len(rng) / 2},
                               static_cast<Method>(meth(rng)), nphi(rng));
        const PtsObjective o = pts_objective(ctx, axis(rng));
        const double delta = std::pow(10.0, logd(rng));
        if (!(delta < o.value(0.0)))
            continue;
        ++contexts;
        const PtsResult r = pts_search(o, delta);
        const double ref = oracle::bisect_decreasing([&](double m) { return o.value(m); }, delta,
                                                     0.0, 1e4, 1e-13);
        worst_p = std::max(worst_p, std::fabs(r.prob_at_star - delta));
        worst_mu = std::max(worst_mu, std::fabs(r.mu_star - ref));
        if (r.converged && r.iterations <= 60)
            ++within;
    }
    const bool ok = worst_p <= 1e-9 && worst_mu <= 1e-6 && within >= 495;
    return {ok, "|Pr-delta| " + fmt("%.2e", worst_p) + ", |mu-oracle| " + fmt("%.2e", worst_mu) +
                    ", converged within 60: " + std::to_string(within) + "/500"};
}

// 5. Tightened box boundary guarantee.
Outcome bbox(const Context& c)
{
    const Json s = run(c, "bbox", "bbox.json", fresh(c, "c5_bbox"), with_workers(c));
    const bool ok = s["boundary_ok"] == true && s["corner_mc_ok"] == true &&
                    s["mc_samples"].get<long long>() >= 100000;
    return {ok, std::to_string(s["boxes"].get<int>()) + " boxes, max boundary bound - delta " +
                    fmt("%.2e", s["max_boundary_excess"].get<double>()) +
                    (s["corner_mc_ok"] == true ? ", corner MC below delta + 3 se"
                                               : ", corner MC ABOVE delta + 3 se")};
}

Json simulate(const Context& c, const std::string& cfg, const std::string& dir, PlannerMode mode,
              int runs, std::optional<PlannerMode> baseline = {})
{
    CommandOptions o = with_workers(c);
    o.mode = mode;
    o.runs = runs;
    o.baseline = baseline;
    return run(c, "simulate", cfg, dir, o);
}

// 6. Scenario 1 Convex batches.
Outcome scenario1(const Context& c)
{
    const Json pa = simulate(c, "scenarios/scenario1.json", fresh(c, "c6_pa"), PlannerMode::ConvexPA, 100);
    const Json us = simulate(c, "scenarios/scenario1.json", fresh(c, "c6_us"), PlannerMode::ConvexUS, 100);
    bool ordering = true;
    std::string med;
    for (std::size_t j = 0; j < pa["max_prob"].size(); ++j) {
        const double mp = pa["max_prob"][j]["median"], mu = us["max_prob"][j]["median"];
        ordering = ordering && mu >= mp;
        med += ", OV" + std::to_string(j + 1) + " median US " + fmt("%.3g", mu) + " / PA " + fmt("%.3g", mp);
    }
    const bool ok = pa["successes"] == 100 && us["successes"] == 100 &&
                    pa["runs_with_violation"] == 0 && us["runs_with_violation"] == 0 && ordering;
    return {ok, "success PA " + std::to_string(pa["successes"].get<int>()) + "/100, US " +
                    std::to_string(us["successes"].get<int>()) + "/100, violations " +
                    std::to_string(pa["runs_with_violation"].get<int>() + us["runs_with_violation"].get<int>()) +
                    med};
}

// 7. Direct versus Convex on matched seeds.
Outcome direct_vs_convex(const Context& c)
{
    // One worker so that wall-clock solve times are not inflated by time slicing.
    Context serial = c;
    serial.workers = 1;
    bool ok = true;
    std::string detail;
    const std::pair<PlannerMode, PlannerMode> pairs[] = {{PlannerMode::ConvexPA, PlannerMode::DirectPA},
                                                         {PlannerMode::ConvexUS, PlannerMode::DirectUS1}};
    for (const auto& [convex, direct] : pairs) {
        const std::string name = "c7_" + std::string(to_string(convex));
        const Json s = simulate(serial, "scenarios/scenario1.json", fresh(c, name), convex, 50, direct);
        const Json& k = s["comparison"];
        ok = ok && k["success_count_ge_baseline"] == true && k["median_solve_ratio_below_one"] == true;
        if (!detail.empty())
            detail += "; ";
        detail += std::string(to_string(convex)) + " vs " + std::string(to_string(direct)) +
                  ": success " + std::to_string(k["successes"].get<int>()) + "/" +
                  std::to_string(k["baseline_successes"].get<int>()) + ", median ms " +
                  fmt("%.3f", k["median_solve_ms"].get<double>()) + "/" +
                  fmt("%.3f", k["baseline_median_solve_ms"].get<double>());
    }
    return {ok, detail};
}

// 8. Scenario 2 responses.
Outcome scenario2(const Context& c)
{
    const Json s = simulate(c, "scenarios/scenario2.json", fresh(c, "c8_pa"), PlannerMode::ConvexPA, 50);
    const int pty = s["responses"]["pass_then_yield"], ytp = s["responses"]["yield_then_pass"];
    const bool ok = s["runs"] == 50 && s["runs_with_violation"] == 0 && pty > 0 && ytp > 0;
    return {ok, "violations " + std::to_string(s["runs_with_violation"].get<int>()) +
                    ", pass-then-yield " + std::to_string(pty) + ", yield-then-pass " +
                    std::to_string(ytp) + ", success " + std::to_string(s["successes"].get<int>()) + "/50"};
}

// 9. Byte-identical outputs on re-run.
Outcome determinism(const Context& c)
{
    struct Rerun
    {
        std::string first;
        std::function<void(const std::string&)> again;
    };
    const std::vector<Rerun> reruns = {
        {"c2_conservatism", [&](const std::string& d) { run(c, "conservatism", "conservatism.json", d, {}); }},
        {"c3_contours",
         [&](const std::string& d) {
             CommandOptions o;
             o.workers = 1;  // a different worker count must not matter
             run(c, "contours", "contours.json", d, o);
         }},
        {"c5_bbox", [&](const std::string& d) { run(c, "bbox", "bbox.json", d, with_workers(c)); }},
        {"c6_pa", [&](const std::string& d) { simulate(c, "scenarios/scenario1.json", d, PlannerMode::ConvexPA, 100); }},
        {"c6_us", [&](const std::string& d) { simulate(c, "scenarios/scenario1.json", d, PlannerMode::ConvexUS, 100); }},
        {"c8_pa", [&](const std::string& d) { simulate(c, "scenarios/scenario2.json", d, PlannerMode::ConvexPA, 50); }},
    };
    int files = 0;
    std::string diffs;
    for (const Rerun& r : reruns) {
        const fs::path a = fs::path(c.out) / r.first;
        if (!fs::exists(a)) {
            diffs += " " + r.first + "(missing first run)";
            continue;
        }
        const std::string b = fresh(c, r.first + "_rerun");
        r.again(b);
        for (const auto& e : fs::directory_iterator(a)) {
            if (!e.is_regular_file())
                continue;
            ++files;
            if (slurp(e.path()) != slurp(fs::path(b) / e.path().filename()))
                diffs += " " + r.first + "/" + e.path().filename().string();
        }
    }
    return {diffs.empty() && files > 0,
            std::to_string(files) + " files compared" + (diffs.empty() ? "" : ", differing:" + diffs)};
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance CONFIG_DIR OUT_DIR [--workers N] [--only K]\n");
        return 2;
    }
    Context ctx{argv[1], argv[2]};
    int only = 0;
    for (int i = 3; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--workers")
            ctx.workers = std::max(1, std::atoi(argv[i + 1]));
        else if (flag == "--only")
            only = std::atoi(argv[i + 1]);
    }
    fs::create_directories(ctx.out);

    struct Criterion
    {
        int id;
        const char* name;
        Outcome (*fn)(const Context&);
        double budget_s;  ///< runtime limit; 0 means none
    };
    const Criterion criteria[] = {
        {1, "decomposition exactness", decomposition, 5.0},
        {2, "conservatism bounds", conservatism, 10.0},
        {3, "upper-bound validity vs Monte Carlo", contours, 300.0},
        {4, "threshold search correctness", pts, 30.0},
        {5, "tightened-box guarantee", bbox, 60.0},
        {6, "scenario 1 Convex closed loop", scenario1, 900.0},
        {7, "Direct vs Convex on matched seeds", direct_vs_convex, 0.0},
        {8, "scenario 2 Convex responses", scenario2, 0.0},
        {9, "determinism", determinism, 0.0},
    };

    int failed = 0;
    for (const Criterion& k : criteria) {
        if (only && k.id != only)
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = k.fn(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (k.budget_s > 0.0 && secs > k.budget_s) {
            o.pass = false;
            o.detail += ", over the " + fmt("%.0f", k.budget_s) + " s budget";
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k.id, k.name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
