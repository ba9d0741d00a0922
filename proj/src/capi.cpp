#include "gridecon.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "gridecon/run.hpp"

struct ge_scenario {
    gridecon::scenario::Scenario sc;
};

struct ge_run {
    gridecon::run::RunResult result;
};

namespace {

using gridecon::scenario::ScenarioError;

thread_local std::string t_last_error;

ge_status fail(ge_status st, const std::string& msg) {
    t_last_error = msg;
    return st;
}

ge_status status_of(const ScenarioError& e) {
    switch (e.kind) {
        case ScenarioError::Kind::parse: return GE_ERR_PARSE;
        case ScenarioError::Kind::dangling_reference: return GE_ERR_DANGLING_REF;
        case ScenarioError::Kind::invariant: return GE_ERR_INVARIANT;
    }
    return GE_ERR_RUNTIME;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
ge_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ScenarioError& e) {
        return fail(status_of(e), e.what());
    } catch (const std::invalid_argument& e) {
        return fail(GE_ERR_INVARIANT, e.what());
    } catch (const std::exception& e) {
        return fail(GE_ERR_RUNTIME, e.what());
    }
}

}  // namespace

extern "C" {

const char* ge_version(void) { return "1.0.0"; }

const char* ge_last_error(void) { return t_last_error.c_str(); }

ge_status ge_scenario_load(const char* path, ge_scenario** out) {
    if (!path || !out) return fail(GE_ERR_BAD_ARGUMENT, "ge_scenario_load: null argument");
    *out = nullptr;
    return guarded([&] {
        auto handle = new ge_scenario{gridecon::scenario::load_scenario(path)};
        *out = handle;
        return GE_OK;
    });
}

ge_status ge_scenario_parse(const char* json_text, ge_scenario** out) {
    if (!json_text || !out) return fail(GE_ERR_BAD_ARGUMENT, "ge_scenario_parse: null argument");
    *out = nullptr;
    return guarded([&] {
        auto sc = gridecon::scenario::parse_scenario(json_text);
        sc.validate();
        *out = new ge_scenario{std::move(sc)};
        return GE_OK;
    });
}

void ge_scenario_free(ge_scenario* sc) { delete sc; }

ge_status ge_scenario_check(const ge_scenario* sc) {
    if (!sc) return fail(GE_ERR_BAD_ARGUMENT, "ge_scenario_check: null scenario");
    return guarded([&] {
        sc->sc.validate();
        gridecon::run::build_world(sc->sc);  // constructor/publish-time invariants
        return GE_OK;
    });
}

int64_t ge_scenario_provider_count(const ge_scenario* sc) {
    return sc ? static_cast<int64_t>(sc->sc.providers.size()) : -1;
}

int64_t ge_scenario_broker_count(const ge_scenario* sc) {
    return sc ? static_cast<int64_t>(sc->sc.brokers.size()) : -1;
}

int64_t ge_scenario_job_count(const ge_scenario* sc) {
    if (!sc) return -1;
    int64_t n = 0;
    for (const auto& b : sc->sc.brokers) n += static_cast<int64_t>(b.jobs.size());
    return n;
}

ge_status ge_scenario_to_json(const ge_scenario* sc, char** out) {
    if (!sc || !out) return fail(GE_ERR_BAD_ARGUMENT, "ge_scenario_to_json: null argument");
    return guarded([&] {
        *out = dup_string(gridecon::scenario::scenario_to_json(sc->sc));
        return *out ? GE_OK : fail(GE_ERR_RUNTIME, "out of memory");
    });
}

ge_status ge_directory_dump_json(const ge_scenario* sc, char** out) {
    if (!sc || !out) return fail(GE_ERR_BAD_ARGUMENT, "ge_directory_dump_json: null argument");
    return guarded([&] {
        auto world = gridecon::run::build_world(sc->sc);
        *out = dup_string(world->directory.dump_json(0));
        return *out ? GE_OK : fail(GE_ERR_RUNTIME, "out of memory");
    });
}

ge_status ge_run_scenario(const ge_scenario* sc, const ge_run_options* opts, ge_run** out) {
    if (!sc || !out) return fail(GE_ERR_BAD_ARGUMENT, "ge_run_scenario: null argument");
    *out = nullptr;
    gridecon::run::RunOptions ro;
    if (opts) {
        if (opts->has_seed) ro.seed = opts->seed;
        if (opts->mode) {
            auto mode = gridecon::broker::parse_mode(opts->mode);
            if (!mode)
                return fail(GE_ERR_BAD_ARGUMENT,
                            std::string("unknown mode: ") + opts->mode +
                                " (expected cost_opt or time_opt)");
            ro.mode = *mode;
        }
    }
    return guarded([&] {
        *out = new ge_run{gridecon::run::run(sc->sc, ro)};
        return GE_OK;
    });
}

void ge_run_free(ge_run* run) { delete run; }

int ge_run_feasible(const ge_run* run) {
    return run && run->result.summary.feasible ? 1 : 0;
}

ge_status ge_run_render(const ge_run* run, const char* format, char** out) {
    if (!run || !format || !out)
        return fail(GE_ERR_BAD_ARGUMENT, "ge_run_render: null argument");
    try {
        *out = dup_string(gridecon::run::render(run->result.summary, format));
        return *out ? GE_OK : fail(GE_ERR_RUNTIME, "out of memory");
    } catch (const std::invalid_argument& e) {
        return fail(GE_ERR_BAD_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(GE_ERR_RUNTIME, e.what());
    }
}

ge_status ge_run_write_outputs(ge_run* run, const char* dir) {
    if (!run || !dir) return fail(GE_ERR_BAD_ARGUMENT, "ge_run_write_outputs: null argument");
    return guarded([&] {
        gridecon::run::write_outputs(run->result, dir);
        return GE_OK;
    });
}

void ge_string_free(char* text) { std::free(text); }

}  // extern "C"
