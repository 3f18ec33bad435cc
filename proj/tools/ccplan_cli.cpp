#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ccplan/ccplan.h"

namespace {

struct Args
{
    std::string config;
    std::string out = "out";
    std::int64_t seed = -1;
    int workers = 1;
    std::string mode = "convex-pa";
    std::string baseline;
    int runs = 0;
    bool timing = false;
    bool quiet = false;
};

CLI::App* add_command(CLI::App& app, const char* name, const char* help, Args& a)
{
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", a.config, "JSON config file")->required();
    sub->add_option("--out", a.out, "output directory")->capture_default_str();
    sub->add_option("--seed", a.seed, "override the config seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--workers", a.workers, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_flag("-q,--quiet", a.quiet, "do not print the summary");
    return sub;
}

int check(ccplan_session* s, int code)
{
    if (code != CCPLAN_OK)
        std::fprintf(stderr, "error: %s\n", ccplan_last_error(s));
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Collision probability bounds and chance-constrained planning"};
    app.set_version_flag("--version", ccplan_version());
    app.require_subcommand(1);
    Args a;
    add_command(app, "contours", "probability grids for US1, PA and Monte Carlo", a);
    add_command(app, "conservatism", "transformed box sizes over correlation and scale", a);
    add_command(app, "bbox", "tightened bounding boxes with boundary checks", a);
    CLI::App* sim = add_command(app, "simulate", "closed-loop batches of a scenario", a);
    sim->add_option("--mode", a.mode, "direct-pa | direct-us1 | convex-pa | convex-us")
        ->capture_default_str();
    sim->add_option("--runs", a.runs, "override the number of runs")->check(CLI::PositiveNumber);
    sim->add_option("--baseline", a.baseline, "also run this mode on the same seeds and compare");
    sim->add_flag("--timing", a.timing, "record wall-clock solve times");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return CCPLAN_ERR_CONFIG;
    }

    ccplan_session* s = ccplan_session_new();
    if (!s) {
        std::fprintf(stderr, "error: out of memory\n");
        return CCPLAN_ERR_RUNTIME;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    int code = check(s, ccplan_set_workers(s, a.workers));
    if (code == CCPLAN_OK && a.seed >= 0)
        code = check(s, ccplan_set_seed(s, static_cast<std::uint64_t>(a.seed)));
    if (code == CCPLAN_OK && command == "simulate") {
        code = check(s, ccplan_set_mode(s, a.mode.c_str()));
        if (code == CCPLAN_OK && a.runs > 0)
            code = check(s, ccplan_set_runs(s, a.runs));
        if (code == CCPLAN_OK && !a.baseline.empty())
            code = check(s, ccplan_set_baseline(s, a.baseline.c_str()));
        if (code == CCPLAN_OK)
            code = check(s, ccplan_set_timing(s, a.timing ? 1 : 0));
    }
    if (code == CCPLAN_OK)
        code = check(s, ccplan_run(s, command.c_str(), a.config.c_str(), a.out.c_str()));
    if (code == CCPLAN_OK && !a.quiet)
        std::fputs(ccplan_last_summary(s), stdout);
    ccplan_session_free(s);
    return code;
}
