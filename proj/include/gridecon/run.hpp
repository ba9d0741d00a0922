#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridecon/scenario.hpp"

namespace gridecon::run {

struct ResourceUsage {
    std::string resource_id;
    std::string provider;
    std::int64_t price = 0;  // advertised band rate at scenario start
    std::int64_t jobs_completed = 0;
    std::int64_t jobs_failed = 0;
    econ::Money revenue{};
    double utilization = 0.0;            // busy share of the community slice
    econ::SimTime last_completion = 0;   // 0 when the resource stayed idle
};

struct DataSiteUsage {
    std::string site_id;
    econ::Money provisioned{};
    std::int64_t requests_granted = 0;
    std::int64_t requests_denied = 0;
    econ::Money tokens_charged{};
};

struct RunSummary {
    std::uint64_t seed = 0;
    econ::SimTime finished_at = 0;
    bool all_brokers_done = true;
    bool feasible = true;  // every broker finished inside deadline and budget
    econ::Money total_spend{};
    econ::Money total_revenue{};
    bool ledger_balanced = false;
    std::vector<broker::ScheduleReport> brokers;
    std::vector<ResourceUsage> resources;
    std::vector<DataSiteUsage> data_sites;
    std::string trace_csv_path;  // filled in once outputs are written
    std::string trace_jsonl_path;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;   // overrides the scenario's seed
    std::optional<broker::Mode> mode;    // overrides every broker's mode
};

// Everything one simulation owns. Building it doubles as the deep validation
// pass: every constructor- and publish-time invariant fires here with the
// offending scenario field attached.
struct World {
    sim::SimEngine engine;
    econ::Ledger ledger;
    market::MarketDirectory directory;
    std::vector<std::unique_ptr<fabric::Provider>> providers;
    std::vector<std::unique_ptr<broker::Broker>> brokers;
    std::vector<std::unique_ptr<data::DataSite>> sites;

    explicit World(std::uint64_t seed) : engine(seed) {}
};

std::unique_ptr<World> build_world(const scenario::Scenario& sc, const RunOptions& opts = {});

struct RunResult {
    RunSummary summary;
    sim::Trace trace;
};

RunResult run(const scenario::Scenario& sc, const RunOptions& opts = {});

std::string summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const std::string& text);  // throws std::invalid_argument

// columns: resource, price, jobs, cost, makespan; one row per resource plus a
// totals row, then the per-broker outcomes
std::string render_table(const RunSummary& s);
// header exactly "resource,price,jobs,cost,makespan"
std::string render_csv(const RunSummary& s);
// format is one of table | json | csv
std::string render(const RunSummary& s, const std::string& format);

// Writes trace.csv, trace.jsonl, summary.txt and summary.json into dir
// (created if missing) and records the trace paths in result.summary.
void write_outputs(RunResult& result, const std::string& dir);

}  // namespace gridecon::run
