#include "io/config.hpp"

#include <limits>

namespace ccplan::io {

namespace {

constexpr double kHuge = 1e12;

RectShape read_shape(ObjectReader r)
{
    RectShape s{r.positive("a"), r.positive("b")};
    r.finish();
    return s;
}

Json emit_shape(const RectShape& s) { return {{"a", s.a}, {"b", s.b}}; }

Cov2 read_cov(ObjectReader r)
{
    Cov2 c{r.positive("sxx"), r.positive("syy"), r.number("sxy")};
    if (c.sxy * c.sxy >= c.sxx * c.syy)
        r.fail("sxy", "covariance must be positive definite");
    r.finish();
    return c;
}

Json emit_cov(const Cov2& c) { return {{"sxx", c.sxx}, {"syy", c.syy}, {"sxy", c.sxy}}; }

HeadingStats read_heading(ObjectReader r)
{
    HeadingStats h{r.number_in("mu", -10.0, 10.0), r.nonnegative("var")};
    r.finish();
    return h;
}

Json emit_heading(const HeadingStats& h) { return {{"mu", h.mu}, {"var", h.var}}; }

PerturbVar read_perturb(ObjectReader r)
{
    PerturbVar p{r.nonnegative("s"), r.nonnegative("y"), r.nonnegative("phi")};
    r.finish();
    return p;
}

Json emit_perturb(const PerturbVar& p) { return {{"s", p.s}, {"y", p.y}, {"phi", p.phi}}; }

CovSchedule read_schedule(ObjectReader r)
{
    CovSchedule c;
    c.along0 = r.positive("along0");
    c.lat0 = r.positive("lat0");
    c.along_rate = r.nonnegative("along_rate");
    c.lat_rate = r.nonnegative("lat_rate");
    c.heading0 = r.nonnegative("heading0");
    c.heading_rate = r.nonnegative("heading_rate");
    r.finish();
    return c;
}

Json emit_schedule(const CovSchedule& c)
{
    return {{"along0", c.along0},     {"lat0", c.lat0},         {"along_rate", c.along_rate},
            {"lat_rate", c.lat_rate}, {"heading0", c.heading0}, {"heading_rate", c.heading_rate}};
}

IdmParams read_idm(ObjectReader r)
{
    IdmParams p;
    p.v_ref = r.number_in("v_ref", 0.0, 100.0);
    p.a_max = r.positive("a_max");
    p.decel_limit = r.positive("decel_limit");
    p.exponent = r.positive("exponent");
    p.y_ref = r.number("y_ref");
    p.k_y = r.nonnegative("k_y");
    p.k_phi = r.nonnegative("k_phi");
    r.finish();
    return p;
}

Json emit_idm(const IdmParams& p)
{
    return {{"v_ref", p.v_ref},     {"a_max", p.a_max}, {"decel_limit", p.decel_limit},
            {"exponent", p.exponent}, {"y_ref", p.y_ref}, {"k_y", p.k_y},
            {"k_phi", p.k_phi}};
}

Range read_range(ObjectReader r, double lo, double hi)
{
    Range g;
    g.min = r.number_in("min", lo, hi);
    g.max = r.number_in("max", lo, hi);
    g.n = static_cast<int>(r.integer("n", 1, 100000));
    if (g.max < g.min)
        r.fail("max", "must not be below min");
    r.finish();
    return g;
}

Json emit_range(const Range& g) { return {{"min", g.min}, {"max", g.max}, {"n", g.n}}; }

OvBehavior read_behavior(ObjectReader& r)
{
    const std::string b = r.string("behavior");
    if (b == "stationary")
        return OvBehavior::Stationary;
    if (b == "idm")
        return OvBehavior::Idm;
    r.fail("behavior", "expected \"stationary\" or \"idm\"");
}

}  // namespace

ScenarioSpec parse_scenario(const Json& j)
{
    ObjectReader r(j, "");
    ScenarioSpec spec;
    Scenario& sc = spec.scenario;
    sc.name = r.string("name");

    {
        ObjectReader road = r.object("road");
        sc.road_length = road.positive("length");
        sc.road_width = road.positive("width");
        sc.road.y_lo = road.number_in("y_lo", -0.5 * sc.road_width, 0.5 * sc.road_width);
        sc.road.y_hi = road.number_in("y_hi", -0.5 * sc.road_width, 0.5 * sc.road_width);
        if (sc.road.y_hi <= sc.road.y_lo)
            road.fail("y_hi", "must exceed y_lo");
        road.finish();
    }

    {
        ObjectReader ego = r.object("ego");
        ObjectReader init = ego.object("init");
        sc.ego.init = {init.number("s"), init.number_in("y", sc.road.y_lo, sc.road.y_hi),
                       init.number_in("phi", -1.0, 1.0), init.number_in("v", 0.0, 100.0)};
        init.finish();
        sc.ego.perturb = read_perturb(ego.object("perturb"));
        ObjectReader refs = ego.object("refs");
        sc.ego.refs = {refs.number_in("y_e", sc.road.y_lo, sc.road.y_hi),
                       refs.number_in("v", 0.0, 100.0)};
        refs.finish();
        if (ego.has("alt_lanes")) {
            const Json& lanes = ego.raw("alt_lanes");
            if (!lanes.is_array())
                ego.fail("alt_lanes", "expected an array of numbers");
            for (std::size_t i = 0; i < lanes.size(); ++i) {
                const std::string where = ego.field("alt_lanes") + "[" + std::to_string(i) + "]";
                if (!lanes[i].is_number())
                    throw ConfigError(where, "expected a number");
                const double y = lanes[i].get<double>();
                if (!(y >= sc.road.y_lo && y <= sc.road.y_hi))
                    throw ConfigError(where, "lane outside the road bounds");
                sc.ego.alt_lanes.push_back(y);
            }
        }
        sc.ego.shape = read_shape(ego.object("shape"));
        sc.ego.cov = read_schedule(ego.object("cov"));
        ego.finish();
    }

    {
        const Json& ovs = r.raw("ovs");
        if (!ovs.is_array())
            r.fail("ovs", "expected an array");
        for (std::size_t i = 0; i < ovs.size(); ++i) {
            ObjectReader o(ovs[i], "ovs[" + std::to_string(i) + "]");
            OvSpec ov;
            ObjectReader init = o.object("init");
            ov.init = {init.number("s"), init.number("y"), init.number_in("phi", -3.5, 3.5),
                       init.number_in("v", 0.0, 100.0)};
            init.finish();
            ov.perturb = read_perturb(o.object("perturb"));
            ov.shape = read_shape(o.object("shape"));
            ov.cov = read_schedule(o.object("cov"));
            ov.behavior = read_behavior(o);
            if (o.has("idm"))
                ov.idm = read_idm(o.object("idm"));
            else if (ov.behavior == OvBehavior::Idm)
                o.fail("idm", "required when behavior is \"idm\"");
            if (ov.behavior == OvBehavior::Idm && !(ov.idm.v_ref > 0.0))
                o.fail("idm.v_ref", "must be positive for an IDM vehicle");
            o.finish();
            sc.ovs.push_back(ov);
        }
    }

    sc.delta = r.number_in("delta", 1e-12, 0.5);
    sc.n_phi = static_cast<int>(r.integer("n_phi", 1, 1000));
    sc.dt = r.number_in("dt", 1e-4, 10.0);
    sc.horizon = static_cast<int>(r.integer("horizon", 1, 1000));
    sc.delta_s = r.nonnegative("delta_s");
    sc.duration = r.number_in("duration", 1e-4, 1e5);

    {
        ObjectReader p = r.object("ego_params");
        sc.ego_params.tau_a = p.positive("tau_a");
        sc.ego_params.tau_gamma = p.positive("tau_gamma");
        p.finish();
    }
    {
        ObjectReader l = r.object("limits");
        sc.limits.v_max = l.positive("v_max");
        sc.limits.a_max = l.positive("a_max");
        sc.limits.gamma_max = l.positive("gamma_max");
        sc.limits.mu_f = l.positive("mu_f");
        sc.limits.g = l.positive("g");
        l.finish();
    }
    {
        ObjectReader w = r.object("weights");
        sc.weights.q_ye = w.nonnegative("q_ye");
        sc.weights.q_v = w.nonnegative("q_v");
        sc.weights.r_a = w.positive("r_a");
        sc.weights.r_gamma = w.positive("r_gamma");
        w.finish();
    }
    {
        ObjectReader s = r.object("sqp");
        sc.sqp.max_iter = static_cast<int>(s.integer("max_iter", 1, 100000));
        sc.sqp.tol = s.positive("tol");
        sc.sqp.feas_tol = s.positive("feas_tol");
        sc.sqp.rho = s.positive("rho");
        sc.sqp.row_margin = s.nonnegative("row_margin");
        s.finish();
    }
    sc.mc_samples = static_cast<int>(r.integer("mc_samples", 0, 100000000));
    {
        ObjectReader s = r.object("seeds");
        spec.seeds.base = static_cast<std::uint64_t>(
            s.integer("base", 0, std::numeric_limits<long long>::max()));
        spec.seeds.runs = static_cast<int>(s.integer("runs", 1, 1000000));
        s.finish();
    }
    if (sc.ego.refs.v > sc.limits.v_max)
        throw ConfigError("ego.refs.v", "exceeds limits.v_max");
    r.finish();
    return spec;
}

Json emit_scenario(const ScenarioSpec& spec)
{
    const Scenario& sc = spec.scenario;
    Json j;
    j["name"] = sc.name;
    j["road"] = {{"length", sc.road_length},
                 {"width", sc.road_width},
                 {"y_lo", sc.road.y_lo},
                 {"y_hi", sc.road.y_hi}};
    j["ego"] = {
        {"init",
         {{"s", sc.ego.init.s}, {"y", sc.ego.init.y}, {"phi", sc.ego.init.phi}, {"v", sc.ego.init.v}}},
        {"perturb", emit_perturb(sc.ego.perturb)},
        {"refs", {{"y_e", sc.ego.refs.y_e}, {"v", sc.ego.refs.v}}},
        {"alt_lanes", sc.ego.alt_lanes},
        {"shape", emit_shape(sc.ego.shape)},
        {"cov", emit_schedule(sc.ego.cov)}};
    j["ovs"] = Json::array();
    for (const OvSpec& ov : sc.ovs) {
        j["ovs"].push_back(
            {{"init", {{"s", ov.init.s}, {"y", ov.init.y}, {"phi", ov.init.phi}, {"v", ov.init.v}}},
             {"perturb", emit_perturb(ov.perturb)},
             {"shape", emit_shape(ov.shape)},
             {"cov", emit_schedule(ov.cov)},
             {"behavior", ov.behavior == OvBehavior::Idm ? "idm" : "stationary"},
             {"idm", emit_idm(ov.idm)}});
    }
    j["delta"] = sc.delta;
    j["n_phi"] = sc.n_phi;
    j["dt"] = sc.dt;
    j["horizon"] = sc.horizon;
    j["delta_s"] = sc.delta_s;
    j["duration"] = sc.duration;
    j["ego_params"] = {{"tau_a", sc.ego_params.tau_a}, {"tau_gamma", sc.ego_params.tau_gamma}};
    j["limits"] = {{"v_max", sc.limits.v_max},
                   {"a_max", sc.limits.a_max},
                   {"gamma_max", sc.limits.gamma_max},
                   {"mu_f", sc.limits.mu_f},
                   {"g", sc.limits.g}};
    j["weights"] = {{"q_ye", sc.weights.q_ye},
                    {"q_v", sc.weights.q_v},
                    {"r_a", sc.weights.r_a},
                    {"r_gamma", sc.weights.r_gamma}};
    j["sqp"] = {{"max_iter", sc.sqp.max_iter},
                {"tol", sc.sqp.tol},
                {"feas_tol", sc.sqp.feas_tol},
                {"rho", sc.sqp.rho},
                {"row_margin", sc.sqp.row_margin}};
    j["mc_samples"] = sc.mc_samples;
    j["seeds"] = {{"base", spec.seeds.base}, {"runs", spec.seeds.runs}};
    return j;
}

ContourSpec parse_contours(const Json& j)
{
    ObjectReader r(j, "");
    ContourSpec s;
    ContourConfig& c = s.contour;
    c.ego_shape = read_shape(r.object("ego_shape"));
    c.ov_shape = read_shape(r.object("ov_shape"));
    c.ego_cov = read_cov(r.object("ego_cov"));
    c.ov_cov = read_cov(r.object("ov_cov"));
    c.ego_heading = read_heading(r.object("ego_heading"));
    c.ov_heading = read_heading(r.object("ov_heading"));
    c.n_phi = static_cast<int>(r.integer("n_phi", 1, 1000));
    {
        ObjectReader g = r.object("grid");
        c.grid.x_min = g.number_in("x_min", -kHuge, kHuge);
        c.grid.x_max = g.number_in("x_max", -kHuge, kHuge);
        c.grid.nx = static_cast<int>(g.integer("nx", 1, 100000));
        c.grid.y_min = g.number_in("y_min", -kHuge, kHuge);
        c.grid.y_max = g.number_in("y_max", -kHuge, kHuge);
        c.grid.ny = static_cast<int>(g.integer("ny", 1, 100000));
        if (c.grid.x_max < c.grid.x_min)
            g.fail("x_max", "must not be below x_min");
        if (c.grid.y_max < c.grid.y_min)
            g.fail("y_max", "must not be below y_min");
        g.finish();
    }
    c.mc_samples =
        static_cast<std::uint64_t>(r.integer("mc_samples", 0, 10000000000LL));
    s.delta = r.number_in("delta", 1e-12, 0.5);
    s.seed = static_cast<std::uint64_t>(r.integer("seed", 0, std::numeric_limits<long long>::max()));
    r.finish();
    return s;
}

Json emit_contours(const ContourSpec& s)
{
    const ContourConfig& c = s.contour;
    return {{"ego_shape", emit_shape(c.ego_shape)},
            {"ov_shape", emit_shape(c.ov_shape)},
            {"ego_cov", emit_cov(c.ego_cov)},
            {"ov_cov", emit_cov(c.ov_cov)},
            {"ego_heading", emit_heading(c.ego_heading)},
            {"ov_heading", emit_heading(c.ov_heading)},
            {"n_phi", c.n_phi},
            {"grid",
             {{"x_min", c.grid.x_min},
              {"x_max", c.grid.x_max},
              {"nx", c.grid.nx},
              {"y_min", c.grid.y_min},
              {"y_max", c.grid.y_max},
              {"ny", c.grid.ny}}},
            {"mc_samples", c.mc_samples},
            {"delta", s.delta},
            {"seed", s.seed}};
}

ConservatismSpec parse_conservatism(const Json& j)
{
    ObjectReader r(j, "");
    ConservatismSpec s;
    s.a = r.positive("a");
    s.b = r.positive("b");
    s.rho = read_range(r.object("rho"), -0.999, 0.999);
    s.sigma_ratio = read_range(r.object("sigma_ratio"), 1e-3, 1e3);
    r.finish();
    return s;
}

Json emit_conservatism(const ConservatismSpec& s)
{
    return {{"a", s.a},
            {"b", s.b},
            {"rho", emit_range(s.rho)},
            {"sigma_ratio", emit_range(s.sigma_ratio)}};
}

std::string_view to_string(BoxMode m)
{
    switch (m) {
    case BoxMode::PA:
        return "pa";
    case BoxMode::US1:
        return "us1";
    case BoxMode::US2:
        return "us2";
    case BoxMode::Mixed:
        return "mixed";
    }
    return "?";
}

BboxSpec parse_bbox(const Json& j)
{
    ObjectReader r(j, "");
    BboxSpec s;
    s.ego_shape = read_shape(r.object("ego_shape"));
    s.ov_shape = read_shape(r.object("ov_shape"));
    s.n_phi = static_cast<int>(r.integer("n_phi", 1, 1000));
    s.boundary_samples = static_cast<int>(r.integer("boundary_samples", 1, 100000));
    const Json& modes = r.raw("modes");
    if (!modes.is_array() || modes.empty())
        r.fail("modes", "expected a non-empty array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string where = "modes[" + std::to_string(i) + "]";
        if (!modes[i].is_string())
            throw ConfigError(where, "expected a string");
        const std::string m = modes[i].get<std::string>();
        bool found = false;
        for (BoxMode b : {BoxMode::PA, BoxMode::US1, BoxMode::US2, BoxMode::Mixed}) {
            if (m == to_string(b)) {
                s.modes.push_back(b);
                found = true;
            }
        }
        if (!found)
            throw ConfigError(where, "expected one of pa, us1, us2, mixed");
    }
    const Json& entries = r.raw("entries");
    if (!entries.is_array() || entries.empty())
        r.fail("entries", "expected a non-empty array");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        ObjectReader e(entries[i], "entries[" + std::to_string(i) + "]");
        BboxEntry b;
        b.label = e.string("label");
        b.cov = read_cov(e.object("cov"));
        b.heading = read_heading(e.object("heading"));
        b.delta = e.number_in("delta", 1e-12, 0.5);
        e.finish();
        s.entries.push_back(b);
    }
    s.mc_samples = static_cast<std::uint64_t>(r.integer("mc_samples", 0, 10000000000LL));
    s.seed = static_cast<std::uint64_t>(r.integer("seed", 0, std::numeric_limits<long long>::max()));
    r.finish();
    return s;
}

Json emit_bbox(const BboxSpec& s)
{
    Json modes = Json::array();
    for (BoxMode m : s.modes)
        modes.push_back(std::string(to_string(m)));
    Json entries = Json::array();
    for (const BboxEntry& e : s.entries)
        entries.push_back({{"label", e.label},
                           {"cov", emit_cov(e.cov)},
                           {"heading", emit_heading(e.heading)},
                           {"delta", e.delta}});
    return {{"ego_shape", emit_shape(s.ego_shape)},
            {"ov_shape", emit_shape(s.ov_shape)},
            {"n_phi", s.n_phi},
            {"boundary_samples", s.boundary_samples},
            {"modes", modes},
            {"entries", entries},
            {"mc_samples", s.mc_samples},
            {"seed", s.seed}};
}

}  // namespace ccplan::io
