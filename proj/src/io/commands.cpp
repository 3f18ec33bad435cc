#include "io/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "collision_prob.hpp"
#include "io/csv.hpp"
#include "rng.hpp"

namespace ccplan::io {

namespace fs = std::filesystem;

namespace {

std::string prepare_dir(const std::string& out_dir)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory " + out_dir);
    return out_dir;
}

std::string join(const std::string& dir, const std::string& name)
{
    return (fs::path(dir) / name).string();
}

Json quantiles_json(const Quantiles& q)
{
    return {{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

std::pair<Method, Method> box_methods(BoxMode m)
{
    switch (m) {
    case BoxMode::PA:
        return {Method::PA, Method::PA};
    case BoxMode::US1:
        return {Method::US1, Method::US1};
    case BoxMode::US2:
        return {Method::US2, Method::US2};
    case BoxMode::Mixed:
        break;
    }
    return {Method::US2, Method::US1};
}

}  // namespace

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json run_contours(const ContourSpec& spec_in, const std::string& out_dir,
                  const CommandOptions& opts)
{
    ContourSpec spec = spec_in;
    if (opts.seed)
        spec.seed = *opts.seed;
    prepare_dir(out_dir);
    write_text_file(join(out_dir, "config.json"), dump_json(emit_contours(spec)));

    const std::vector<ContourCell> cells = contour_grid(spec.contour, spec.seed, opts.workers);
    const bool with_mc = spec.contour.mc_samples > 0;
    const double delta = spec.delta;

    CsvWriter csv(join(out_dir, "contours.csv"),
                  {"mu_x", "mu_y", "p_us1", "p_pa", "p_mc", "mc_stderr", "us1_ok", "pa_ok"});
    int us1_fail = 0, pa_fail = 0, us1_contour_miss = 0, pa_contour_miss = 0;
    int mc_above = 0, us1_above = 0, pa_above = 0;
    double min_us1_margin = INFINITY, min_pa_margin = INFINITY;
    for (const ContourCell& c : cells) {
        const bool us1_ok = !with_mc || bound_dominates(c.p_us1, c.mc(), 3.0);
        const bool pa_ok = !with_mc || bound_dominates(c.p_pa, c.mc(), 3.0);
        us1_fail += us1_ok ? 0 : 1;
        pa_fail += pa_ok ? 0 : 1;
        us1_above += c.p_us1 >= delta ? 1 : 0;
        pa_above += c.p_pa >= delta ? 1 : 0;
        if (with_mc) {
            min_us1_margin = std::min(min_us1_margin, c.p_us1 - c.p_mc);
            min_pa_margin = std::min(min_pa_margin, c.p_pa - c.p_mc);
            if (c.p_mc >= delta) {
                ++mc_above;
                us1_contour_miss += c.p_us1 >= delta ? 0 : 1;
                pa_contour_miss += c.p_pa >= delta ? 0 : 1;
            }
        }
        csv.add(c.mu_x).add(c.mu_y).add(c.p_us1).add(c.p_pa).add(c.p_mc).add(c.mc_stderr);
        csv.add(us1_ok ? 1 : 0).add(pa_ok ? 1 : 0).end_row();
    }
    csv.close();

    Json s = {{"command", "contours"},
              {"cells", cells.size()},
              {"mc_samples", spec.contour.mc_samples},
              {"seed", spec.seed},
              {"delta", delta},
              {"us1_dominates_mc", us1_fail == 0},
              {"pa_dominates_mc", pa_fail == 0},
              {"us1_dominance_failures", us1_fail},
              {"pa_dominance_failures", pa_fail},
              {"mc_cells_at_or_above_delta", mc_above},
              {"us1_cells_at_or_above_delta", us1_above},
              {"pa_cells_at_or_above_delta", pa_above},
              {"us1_contains_mc_contour", us1_contour_miss == 0},
              {"pa_contains_mc_contour", pa_contour_miss == 0}};
    if (with_mc) {
        s["min_us1_minus_mc"] = min_us1_margin;
        s["min_pa_minus_mc"] = min_pa_margin;
    }
    write_text_file(join(out_dir, "summary.json"), dump_json(s));
    return s;
}

Json run_conservatism(const ConservatismSpec& spec, const std::string& out_dir,
                      const CommandOptions&)
{
    prepare_dir(out_dir);
    write_text_file(join(out_dir, "config.json"), dump_json(emit_conservatism(spec)));

    const CombinedBox box{spec.a, spec.b, {}};
    const double lo = std::min(spec.a, spec.b), hi = std::hypot(spec.a, spec.b);
    CsvWriter csv(join(out_dir, "conservatism.csv"),
                  {"rho", "sigma_ratio", "method", "a_pp", "b_pp", "a_pp_scaled", "b_pp_scaled", "h"});

    double pa_min = INFINITY, pa_max = -INFINITY;
    double us1_b_err = 0.0, us2_a_err = 0.0, max_h_at_zero_rho = 0.0;
    bool us1_monotone = true;
    for (int i = 0; i < spec.sigma_ratio.n; ++i) {
        const double ratio = spec.sigma_ratio.at(i);
        std::vector<std::pair<double, double>> us1_a;  // (|rho|, a''/|s1|)
        for (int k = 0; k < spec.rho.n; ++k) {
            const double rho = spec.rho.at(k);
            const Cov2 cov = Cov2::from_sigma_rho(ratio, 1.0, rho);

            const Decoupling pa = decouple(cov, Method::PA);
            const TransformedBox tp = transform_box(pa.t, box);
            pa_min = std::min({pa_min, tp.a_pp, tp.b_pp});
            pa_max = std::max({pa_max, tp.a_pp, tp.b_pp});
            csv.add(rho).add(ratio).add(std::string("PA")).add(tp.a_pp).add(tp.b_pp);
            csv.add(tp.a_pp).add(tp.b_pp).add(0.0).end_row();

            for (UsCase which : {UsCase::Case1, UsCase::Case2}) {
                const RshFactors f = rsh_decompose(cov, which);
                const TransformedBox tu = transform_box(f.decoupling(), box);
                const double as = tu.a_pp / std::fabs(f.s1);
                const double bs = tu.b_pp / std::fabs(f.s2);
                if (which == UsCase::Case1) {
                    us1_b_err = std::max(us1_b_err, std::fabs(bs - spec.b));
                    us1_a.emplace_back(std::fabs(rho), as);
                } else {
                    us2_a_err = std::max(us2_a_err, std::fabs(as - spec.a));
                }
                if (rho == 0.0)
                    max_h_at_zero_rho = std::max(max_h_at_zero_rho, std::fabs(f.h));
                csv.add(rho).add(ratio).add(std::string(which == UsCase::Case1 ? "US1" : "US2"));
                csv.add(tu.a_pp).add(tu.b_pp).add(as).add(bs).add(f.h).end_row();
            }
        }
        std::sort(us1_a.begin(), us1_a.end());
        for (std::size_t k = 1; k < us1_a.size(); ++k) {
            const double dr = us1_a[k].first - us1_a[k - 1].first;
            const double dv = us1_a[k].second - us1_a[k - 1].second;
            if (dr > 1e-12 ? !(dv > 0.0) : std::fabs(dv) > 1e-12)
                us1_monotone = false;
        }
    }
    csv.close();

    Json s = {{"command", "conservatism"},
              {"a", spec.a},
              {"b", spec.b},
              {"pa_min", pa_min},
              {"pa_max", pa_max},
              {"pa_lower_limit", lo},
              {"pa_upper_limit", hi},
              {"pa_within_limits", pa_min >= lo - 1e-9 && pa_max <= hi + 1e-9},
              {"us1_b_scaled_max_error", us1_b_err},
              {"us2_a_scaled_max_error", us2_a_err},
              {"us1_a_scaled_monotone_in_abs_rho", us1_monotone},
              {"max_abs_h_at_zero_rho", max_h_at_zero_rho}};
    write_text_file(join(out_dir, "summary.json"), dump_json(s));
    return s;
}

Json run_bbox(const BboxSpec& spec_in, const std::string& out_dir, const CommandOptions& opts)
{
    BboxSpec spec = spec_in;
    if (opts.seed)
        spec.seed = *opts.seed;
    prepare_dir(out_dir);
    write_text_file(join(out_dir, "config.json"), dump_json(emit_bbox(spec)));

    std::vector<std::string> header = {"label", "mode", "delta", "mu1_star", "mu2_star"};
    for (int c = 1; c <= 4; ++c) {
        header.push_back("c" + std::to_string(c) + "_x");
        header.push_back("c" + std::to_string(c) + "_y");
    }
    for (const char* h : {"pts1_iterations", "pts2_iterations", "pts1_prob", "pts2_prob",
                          "boundary_max_bound", "boundary_ok", "corner_mc_max", "corner_mc_stderr",
                          "corner_mc_ok"})
        header.emplace_back(h);
    CsvWriter csv(join(out_dir, "bbox.csv"), header);

    bool all_boundary = true, all_mc = true;
    double worst_excess = -INFINITY;
    std::uint64_t row = 0;
    for (const BboxEntry& e : spec.entries) {
        for (BoxMode mode : spec.modes) {
            const auto [m1, m2] = box_methods(mode);
            const TightenedBox tb = tightened_bbox(e.cov, e.heading, spec.ego_shape, spec.ov_shape,
                                                   e.delta, spec.n_phi, m1, m2);
            const BoundContext c1(e.cov, e.heading, spec.ego_shape, spec.ov_shape, m1, spec.n_phi);
            const BoundContext c2(e.cov, e.heading, spec.ego_shape, spec.ov_shape, m2, spec.n_phi);
            // Each edge holds delta for at least one of the two axis methods.
            auto bound = [&](Vec2 p) { return std::min(c1.value(p), c2.value(p)); };

            double worst = 0.0;
            for (int c = 0; c < 4; ++c) {
                const Vec2 a = tb.corners[c];
                const Vec2 b = tb.corners[(c + 1) % 4];
                for (int k = 0; k < spec.boundary_samples; ++k) {
                    const double t = static_cast<double>(k) / spec.boundary_samples;
                    worst = std::max(worst, bound({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}));
                }
            }
            const bool boundary_ok = worst <= e.delta + 1e-9;
            all_boundary = all_boundary && boundary_ok;
            worst_excess = std::max(worst_excess, worst - e.delta);

            double mc_max = 0.0, mc_err = 0.0;
            bool mc_ok = true;
            if (spec.mc_samples > 0) {
                for (int c = 0; c < 4; ++c) {
                    const VehicleBelief ego{{tb.corners[c], e.cov}, {0.0, 0.0}, spec.ego_shape};
                    const VehicleBelief ov{{{0.0, 0.0}, Cov2{0.0, 0.0, 0.0}}, e.heading,
                                           spec.ov_shape};
                    const McEstimate mc = monte_carlo_prob(ego, ov, spec.mc_samples,
                                                           derive_seed(spec.seed, row, c),
                                                           opts.workers);
                    if (mc.estimate >= mc_max) {
                        mc_max = mc.estimate;
                        mc_err = mc.std_err;
                    }
                    mc_ok = mc_ok && mc.estimate <= e.delta + 3.0 * mc.std_err;
                }
            }
            all_mc = all_mc && mc_ok;

            csv.add(e.label).add(std::string(to_string(mode))).add(e.delta);
            csv.add(tb.mu1_star).add(tb.mu2_star);
            for (const Vec2& c : tb.corners)
                csv.add(c.x).add(c.y);
            csv.add(tb.pts1.iterations).add(tb.pts2.iterations);
            csv.add(tb.pts1.prob_at_star).add(tb.pts2.prob_at_star);
            csv.add(worst).add(boundary_ok ? 1 : 0).add(mc_max).add(mc_err).add(mc_ok ? 1 : 0);
            csv.end_row();
            ++row;
        }
    }
    csv.close();

    Json s = {{"command", "bbox"},
              {"boxes", row},
              {"boundary_ok", all_boundary},
              {"max_boundary_excess", worst_excess},
              {"mc_samples", spec.mc_samples},
              {"corner_mc_ok", all_mc}};
    write_text_file(join(out_dir, "summary.json"), dump_json(s));
    return s;
}

namespace {

Json write_batch(const Scenario& sc, PlannerMode mode, const BatchResult& br, std::uint64_t base,
                 bool timing, const std::string& dir)
{
    const std::size_t n_ov = sc.ovs.size();
    std::vector<std::string> header = {"run", "t", "s", "y_e", "phi", "v", "a", "gamma",
                                       "solver_status", "fallback", "solve_ms", "bbox_ms"};
    for (std::size_t j = 1; j <= n_ov; ++j)
        header.push_back("pbound_ov" + std::to_string(j));
    for (std::size_t j = 1; j <= n_ov; ++j)
        header.push_back("pmc_ov" + std::to_string(j));
    for (std::size_t j = 1; j <= n_ov; ++j) {
        header.push_back("ov" + std::to_string(j) + "_s");
        header.push_back("ov" + std::to_string(j) + "_y");
        header.push_back("ov" + std::to_string(j) + "_phi");
    }
    CsvWriter steps(join(dir, "steps.csv"), header);

    std::vector<std::string> run_header = {"run", "seed", "success", "failure_step", "steps",
                                           "response"};
    for (std::size_t j = 1; j <= n_ov; ++j)
        run_header.push_back("max_prob_ov" + std::to_string(j));
    CsvWriter runs(join(dir, "runs.csv"), run_header);

    std::map<std::string, int> responses = {{"pass_then_yield", 0}, {"yield_then_pass", 0},
                                            {"other", 0}};
    int violations = 0;
    for (std::size_t r = 0; r < br.runs.size(); ++r) {
        const RunRecord& run = br.runs[r];
        for (const StepRecord& st : run.steps) {
            steps.add(r).add(st.t);
            for (int i = 0; i < 6; ++i)
                steps.add(st.x(i));
            steps.add(std::string(to_string(st.status))).add(st.fallback ? 1 : 0);
            steps.add(st.solve_ms).add(st.bbox_ms);
            for (std::size_t j = 0; j < n_ov; ++j)
                steps.add(j < st.pbound.size() ? st.pbound[j] : 0.0);
            for (std::size_t j = 0; j < n_ov; ++j) {
                const double p = j < st.pmc.size() ? st.pmc[j] : NAN;
                steps.add(std::isnan(p) ? -1.0 : p);
            }
            for (std::size_t j = 0; j < n_ov; ++j) {
                const OvState o = j < st.ovs.size() ? st.ovs[j] : OvState{};
                steps.add(o.s).add(o.y).add(o.phi);
            }
            steps.end_row();
        }
        const Response resp = n_ov >= 2 ? classify_response(run, 0, 1) : Response::Other;
        const std::string rname(to_string(resp));
        ++responses[rname];
        bool violated = false;
        runs.add(r).add(std::to_string(run.seed)).add(run.success ? 1 : 0).add(run.failure_step);
        runs.add(run.steps.size()).add(rname);
        for (std::size_t j = 0; j < n_ov; ++j) {
            const double p = j < run.max_prob.size() ? run.max_prob[j] : 0.0;
            violated = violated || p > sc.delta;
            runs.add(p);
        }
        runs.end_row();
        violations += violated ? 1 : 0;
    }
    steps.close();
    runs.close();

    Json mp = Json::array();
    for (std::size_t j = 0; j < br.stats.max_prob.size(); ++j) {
        Json q = quantiles_json(br.stats.max_prob[j]);
        q["ov"] = j + 1;
        mp.push_back(q);
    }
    Json s = {{"command", "simulate"},
              {"scenario", sc.name},
              {"mode", std::string(to_string(mode))},
              {"base_seed", base},
              {"runs", br.stats.runs},
              {"successes", br.stats.successes},
              {"success_rate", br.stats.success_rate},
              {"delta", sc.delta},
              {"runs_with_violation", violations},
              {"max_prob", mp},
              {"timing", timing},
              {"solve_ms", quantiles_json(br.stats.solve_ms)},
              {"responses", responses}};
    write_text_file(join(dir, "summary.json"), dump_json(s));
    return s;
}

}  // namespace

Json run_simulate(const ScenarioSpec& spec_in, const std::string& out_dir,
                  const CommandOptions& opts)
{
    ScenarioSpec spec = spec_in;
    if (opts.seed)
        spec.seeds.base = *opts.seed;
    if (opts.runs) {
        if (*opts.runs < 1)
            throw ConfigError("--runs", "must be at least 1");
        spec.seeds.runs = *opts.runs;
    }
    prepare_dir(out_dir);
    write_text_file(join(out_dir, "config.json"), dump_json(emit_scenario(spec)));

    RunOptions ro;
    ro.timing = opts.timing || opts.baseline.has_value();
    const Scenario& sc = spec.scenario;
    if (!opts.baseline) {
        const BatchResult br =
            batch_run(sc, opts.mode, spec.seeds.runs, spec.seeds.base, opts.workers, ro);
        return write_batch(sc, opts.mode, br, spec.seeds.base, ro.timing, out_dir);
    }

    const auto [br, bb] = batch_run_paired(sc, opts.mode, *opts.baseline, spec.seeds.runs,
                                           spec.seeds.base, opts.workers, ro);
    Json s = write_batch(sc, opts.mode, br, spec.seeds.base, ro.timing, out_dir);
    const std::string bdir = prepare_dir(join(out_dir, "baseline"));
    const Json bs = write_batch(sc, *opts.baseline, bb, spec.seeds.base, ro.timing, bdir);
    const double med = br.stats.solve_ms.median, bmed = bb.stats.solve_ms.median;
    const double ratio = bmed > 0.0 ? med / bmed : INFINITY;
    Json cmp = {{"command", "compare"},
                {"mode", std::string(to_string(opts.mode))},
                {"baseline", std::string(to_string(*opts.baseline))},
                {"runs", br.stats.runs},
                {"successes", br.stats.successes},
                {"baseline_successes", bb.stats.successes},
                {"success_count_ge_baseline", br.stats.successes >= bb.stats.successes},
                {"median_solve_ms", med},
                {"baseline_median_solve_ms", bmed},
                {"median_solve_ratio", std::isfinite(ratio) ? Json(ratio) : Json(nullptr)},
                {"median_solve_ratio_below_one", ratio < 1.0}};
    write_text_file(join(out_dir, "comparison.json"), dump_json(cmp));
    s["comparison"] = cmp;
    return s;
}

Json run_command(const std::string& command, const std::string& config_path,
                 const std::string& out_dir, const CommandOptions& opts)
{
    const Json doc = read_json_file(config_path);
    if (command == "contours")
        return run_contours(parse_contours(doc), out_dir, opts);
    if (command == "conservatism")
        return run_conservatism(parse_conservatism(doc), out_dir, opts);
    if (command == "bbox")
        return run_bbox(parse_bbox(doc), out_dir, opts);
    if (command == "simulate")
        return run_simulate(parse_scenario(doc), out_dir, opts);
    throw ConfigError("command", "unknown command " + command);
}

}  // namespace ccplan::io
