// Command-line front end; talks to the simulator strictly through the C API.
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "gridecon.h"

namespace {

// reserved for bad invocations, distinct from every ge_status
constexpr int kUsageError = 64;

int report(ge_status st) {
    std::fprintf(stderr, "error: %s\n", ge_last_error());
    return static_cast<int>(st);
}

struct ScenarioGuard {
    ge_scenario* sc = nullptr;
    ~ScenarioGuard() { ge_scenario_free(sc); }
};

struct RunGuard {
    ge_run* run = nullptr;
    ~RunGuard() { ge_run_free(run); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"economy-driven grid scheduling simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string mode;
    std::string trace_dir;
    std::string format = "table";
    std::uint64_t seed = 0;

    auto* run_cmd = app.add_subcommand("run", "execute a scenario and report the outcome");
    run_cmd->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the scenario's RNG seed");
    run_cmd->add_option("--mode", mode, "override every broker's optimization mode")
        ->check(CLI::IsMember({"cost_opt", "time_opt"}));
    run_cmd->add_option("--trace", trace_dir,
                        "directory for trace.csv, trace.jsonl, summary.txt, summary.json")
        ->envname("GRIDECON_TRACE_DIR");
    run_cmd->add_option("--format", format, "stdout format")
        ->check(CLI::IsMember({"table", "json", "csv"}));

    auto* validate_cmd = app.add_subcommand("validate", "check a scenario file and exit");
    validate_cmd->add_option("scenario", scenario_path, "scenario file (JSON)")->required();

    auto* dump_cmd =
        app.add_subcommand("dump-directory", "print the market directory at simulation start");
    dump_cmd->add_option("scenario", scenario_path, "scenario file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints help or the usage error
        return code == 0 ? 0 : kUsageError;
    }

    ScenarioGuard sc;
    if (auto st = ge_scenario_load(scenario_path.c_str(), &sc.sc); st != GE_OK)
        return report(st);

    if (validate_cmd->parsed()) {
        if (auto st = ge_scenario_check(sc.sc); st != GE_OK) return report(st);
        std::printf("ok: %lld providers, %lld brokers, %lld jobs\n",
                    static_cast<long long>(ge_scenario_provider_count(sc.sc)),
                    static_cast<long long>(ge_scenario_broker_count(sc.sc)),
                    static_cast<long long>(ge_scenario_job_count(sc.sc)));
        return 0;
    }

    if (dump_cmd->parsed()) {
        char* text = nullptr;
        if (auto st = ge_directory_dump_json(sc.sc, &text); st != GE_OK) return report(st);
        std::fputs(text, stdout);
        ge_string_free(text);
        return 0;
    }

    ge_run_options opts{};
    opts.has_seed = seed_opt->count() > 0 ? 1 : 0;
    opts.seed = seed;
    opts.mode = mode.empty() ? nullptr : mode.c_str();

    RunGuard run;
    if (auto st = ge_run_scenario(sc.sc, &opts, &run.run); st != GE_OK) return report(st);
    if (!trace_dir.empty())
        if (auto st = ge_run_write_outputs(run.run, trace_dir.c_str()); st != GE_OK)
            return report(st);

    char* text = nullptr;
    if (auto st = ge_run_render(run.run, format.c_str(), &text); st != GE_OK) return report(st);
    std::fputs(text, stdout);
    ge_string_free(text);

    if (!ge_run_feasible(run.run)) {
        std::fprintf(stderr, "infeasible: a broker missed its deadline or budget\n");
        return GE_ERR_INFEASIBLE;
    }
    return 0;
}
