#include "ccplan/ccplan.h"

#include <exception>
#include <new>
#include <string>

#include "collision_prob.hpp"
#include "errors.hpp"
#include "io/commands.hpp"
#include "monte_carlo.hpp"

struct ccplan_session
{
    ccplan::io::CommandOptions opts;
    std::string error;
    std::string summary;
};

namespace {

template <class Fn>
int guarded(ccplan_session* s, Fn&& fn)
{
    if (!s)
        return CCPLAN_ERR_RUNTIME;
    try {
        fn();
        s->error.clear();
        return CCPLAN_OK;
    } catch (const ccplan::ConfigError& e) {
        s->error = e.what();
        return CCPLAN_ERR_CONFIG;
    } catch (const ccplan::InvalidArgument& e) {
        s->error = e.what();
        return CCPLAN_ERR_CONFIG;
    } catch (const std::exception& e) {
        s->error = e.what();
        return CCPLAN_ERR_RUNTIME;
    } catch (...) {
        s->error = "unknown error";
        return CCPLAN_ERR_RUNTIME;
    }
}

ccplan::VehicleBelief to_belief(const ccplan_belief* b)
{
    if (!b)
        throw ccplan::InvalidArgument("belief pointer is null");
    return {{{b->x, b->y}, {b->sxx, b->syy, b->sxy}}, {b->heading, b->heading_var}, {b->a, b->b}};
}

ccplan::Method to_method(int m)
{
    switch (m) {
    case CCPLAN_METHOD_PA:
        return ccplan::Method::PA;
    case CCPLAN_METHOD_US1:
        return ccplan::Method::US1;
    case CCPLAN_METHOD_US2:
        return ccplan::Method::US2;
    default:
        throw ccplan::InvalidArgument("unknown method code " + std::to_string(m));
    }
}

}  // namespace

extern "C" {

const char* ccplan_version(void) { return "1.0.0"; }

ccplan_session* ccplan_session_new(void) { return new (std::nothrow) ccplan_session(); }

void ccplan_session_free(ccplan_session* s) { delete s; }

const char* ccplan_last_error(const ccplan_session* s)
{
    return s ? s->error.c_str() : "null session";
}

const char* ccplan_last_summary(const ccplan_session* s) { return s ? s->summary.c_str() : ""; }

int ccplan_set_seed(ccplan_session* s, uint64_t seed)
{
    return guarded(s, [&] { s->opts.seed = seed; });
}

int ccplan_clear_seed(ccplan_session* s)
{
    return guarded(s, [&] { s->opts.seed.reset(); });
}

int ccplan_set_workers(ccplan_session* s, int workers)
{
    return guarded(s, [&] {
        if (workers < 1)
            throw ccplan::ConfigError("workers", "must be at least 1");
        s->opts.workers = workers;
    });
}

int ccplan_set_runs(ccplan_session* s, int runs)
{
    return guarded(s, [&] {
        if (runs < 1)
            throw ccplan::ConfigError("runs", "must be at least 1");
        s->opts.runs = runs;
    });
}

int ccplan_set_mode(ccplan_session* s, const char* mode)
{
    return guarded(s, [&] { s->opts.mode = ccplan::parse_mode(mode ? mode : ""); });
}

int ccplan_set_baseline(ccplan_session* s, const char* mode)
{
    return guarded(s, [&] {
        if (!mode || !*mode)
            s->opts.baseline.reset();
        else
            s->opts.baseline = ccplan::parse_mode(mode);
    });
}

int ccplan_set_timing(ccplan_session* s, int enabled)
{
    return guarded(s, [&] { s->opts.timing = enabled != 0; });
}

int ccplan_run(ccplan_session* s, const char* command, const char* config_path,
               const char* out_dir)
{
    return guarded(s, [&] {
        if (!command || !config_path || !out_dir)
            throw ccplan::ConfigError("arguments", "command, config and output paths are required");
        s->summary.clear();
        const ccplan::io::Json summary =
            ccplan::io::run_command(command, config_path, out_dir, s->opts);
        s->summary = ccplan::io::dump_json(summary);
    });
}

int ccplan_prob_upper_bound(ccplan_session* s, const ccplan_belief* ego, const ccplan_belief* ov,
                            int method, int n_phi, double* out)
{
    return guarded(s, [&] {
        if (!out)
            throw ccplan::InvalidArgument("output pointer is null");
        *out = ccplan::prob_upper_bound(to_belief(ego), to_belief(ov), to_method(method), n_phi)
                   .value;
    });
}

int ccplan_monte_carlo_prob(ccplan_session* s, const ccplan_belief* ego, const ccplan_belief* ov,
                            uint64_t samples, uint64_t seed, double* estimate, double* std_err)
{
    return guarded(s, [&] {
        if (!estimate || !std_err)
            throw ccplan::InvalidArgument("output pointer is null");
        const ccplan::McEstimate mc =
            ccplan::monte_carlo_prob(to_belief(ego), to_belief(ov), samples, seed, 1);
        *estimate = mc.estimate;
        *std_err = mc.std_err;
    });
}

}  // extern "C"
