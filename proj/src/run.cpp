#include "gridecon/run.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace gridecon::run {

using json = nlohmann::json;
using scenario::Scenario;
using scenario::ScenarioError;

namespace {

[[noreturn]] void invariant(const std::string& field, const std::string& why) {
    throw ScenarioError(ScenarioError::Kind::invariant, field, why);
}

std::string elem(const char* key, std::size_t i) {
    return std::string(key) + "[" + std::to_string(i) + "]";
}

}  // namespace

std::unique_ptr<World> build_world(const Scenario& sc, const RunOptions& opts) {
    auto world = std::make_unique<World>(opts.seed.value_or(sc.seed));
    auto& w = *world;

    std::map<std::string, fabric::Provider*> by_gsp;
    for (std::size_t i = 0; i < sc.providers.size(); ++i) {
        const auto& def = sc.providers[i];
        try {
            w.providers.push_back(std::make_unique<fabric::Provider>(
                w.engine, w.ledger, def.resource, def.id, &w.directory));
        } catch (const std::invalid_argument& e) {
            invariant(elem("providers", i) + ".resource", e.what());
        }
        by_gsp[def.id] = w.providers.back().get();
        for (std::size_t k = 0; k < def.offers.size(); ++k) {
            try {
                w.directory.publish(def.offers[k], 0);
            } catch (const std::invalid_argument& e) {
                invariant(elem("providers", i) + "." + elem("offers", k), e.what());
            }
        }
    }
    // specials go up once every base offer exists
    for (std::size_t i = 0; i < sc.providers.size(); ++i) {
        for (std::size_t k = 0; k < sc.providers[i].specials.size(); ++k) {
            try {
                w.directory.post_special(sc.providers[i].specials[k], 0);
            } catch (const std::invalid_argument& e) {
                invariant(elem("providers", i) + "." + elem("specials", k), e.what());
            }
        }
    }

    for (std::size_t i = 0; i < sc.brokers.size(); ++i) {
        const auto& def = sc.brokers[i];
        auto requirements = def.requirements;
        if (opts.mode) requirements.mode = *opts.mode;
        w.ledger.mint(def.id, requirements.budget, 0, "budget");
        try {
            w.brokers.push_back(std::make_unique<broker::Broker>(
                w.engine, w.ledger, w.directory, by_gsp, def.id, requirements, def.jobs,
                def.config));
        } catch (const std::invalid_argument& e) {
            invariant(elem("brokers", i), e.what());
        }
        auto* b = w.brokers.back().get();
        w.engine.schedule(def.start_at, "start:" + def.id,
                          [b](sim::SimEngine&) { b->start(); });
    }

    for (std::size_t i = 0; i < sc.data_sites.size(); ++i) {
        const auto& def = sc.data_sites[i];
        try {
            w.sites.push_back(
                std::make_unique<data::DataSite>(w.engine, def.id, def.capacity, def.tariff));
            w.sites.back()->provision(def.users);
        } catch (const std::invalid_argument& e) {
            invariant(elem("data_sites", i), e.what());
        }
        auto* site = w.sites.back().get();
        auto users = def.users;
        for (econ::SimTime day = econ::kSecondsPerDay; day <= sc.stop_time;
             day += econ::kSecondsPerDay)
            w.engine.schedule(day, "renew:" + def.id,
                              [site, users](sim::SimEngine&) { site->renew_day(users); });
        for (const auto& r : def.requests)
            w.engine.schedule(r.at, "xfer:" + def.id, [site, r](sim::SimEngine&) {
                site->request(r.user, r.mb);
            });
    }
    return world;
}

RunResult run(const Scenario& sc, const RunOptions& opts) {
    auto world = build_world(sc, opts);
    auto& w = *world;

    w.engine.run_until(sc.stop_time);
    // Let brokers that are still mid-flight drain: they always settle once
    // the deadline passes and running work completes.
    auto unsettled = [&] {
        return std::any_of(w.brokers.begin(), w.brokers.end(),
                           [](const auto& b) { return !b->finished(); });
    };
    for (int guard = 0; unsettled() && w.engine.pending() > 0 && guard < 100000; ++guard)
        w.engine.run_until(w.engine.now() + 3600);

    RunResult result;
    auto& s = result.summary;
    s.seed = w.engine.seed();
    s.finished_at = w.engine.now();

    for (std::size_t i = 0; i < sc.brokers.size(); ++i) {
        auto& b = *w.brokers[i];
        if (b.finished()) {
            s.brokers.push_back(b.report());
        } else {
            broker::ScheduleReport stub;
            stub.broker = b.id();
            stub.mode = b.requirements().mode;
            stub.jobs_total = static_cast<std::int64_t>(sc.brokers[i].jobs.size());
            s.brokers.push_back(std::move(stub));
            s.all_brokers_done = false;
        }
    }
    for (const auto& rep : s.brokers) {
        s.total_spend += rep.total_cost;
        s.feasible = s.feasible && rep.deadline_met && rep.budget_respected;
    }
    s.feasible = s.feasible && s.all_brokers_done;

    econ::Money ledger_revenue{};
    for (std::size_t i = 0; i < sc.providers.size(); ++i) {
        const auto& prov = *w.providers[i];
        ResourceUsage u;
        u.resource_id = prov.spec().resource_id;
        u.provider = prov.id();
        u.price = prov.spec().schedule.band_rate(0).per_cpu_second;
        u.jobs_completed = prov.completed_count();
        u.jobs_failed = prov.failed_count();
        u.revenue = prov.earned();
        u.utilization = prov.utilization(0, w.engine.now());
        for (const auto& [id, job] : prov.jobs())
            if (job.state == fabric::JobExecution::State::done)
                u.last_completion = std::max(u.last_completion, job.finish);
        s.resources.push_back(std::move(u));
        s.total_revenue += prov.earned();
        ledger_revenue += w.ledger.balance(prov.id());
    }
    s.ledger_balanced = s.total_spend == s.total_revenue && ledger_revenue == s.total_revenue;

    for (const auto& site : w.sites) {
        DataSiteUsage u;
        u.site_id = site->id();
        u.provisioned = site->provisioned();
        for (const auto& rec : w.engine.trace().records()) {
            if (rec.kind != "data_access" || rec.resource != site->id()) continue;
            if (rec.amount) {
                ++u.requests_granted;
                u.tokens_charged += econ::Money{*rec.amount};
            } else {
                ++u.requests_denied;
            }
        }
        s.data_sites.push_back(std::move(u));
    }

    result.trace = w.engine.trace();
    return result;
}

// ---- serialization ---------------------------------------------------------

namespace {

json report_json(const broker::ScheduleReport& r) {
    json jobs = json::object(), cost = json::object(), rate = json::object();
    for (const auto& [k, v] : r.jobs_per_resource) jobs[k] = v;
    for (const auto& [k, v] : r.cost_per_resource) cost[k] = v.units;
    for (const auto& [k, v] : r.rate_per_resource) rate[k] = v.per_cpu_second;
    return {{"broker", r.broker},
            {"mode", broker::mode_name(r.mode)},
            {"jobs_total", r.jobs_total},
            {"jobs_completed", r.jobs_completed},
            {"total_cost", r.total_cost.units},
            {"makespan", r.makespan},
            {"deadline_met", r.deadline_met},
            {"budget_respected", r.budget_respected},
            {"jobs_per_resource", jobs},
            {"cost_per_resource", cost},
            {"rate_per_resource", rate}};
}

broker::ScheduleReport report_from(const json& j) {
    broker::ScheduleReport r;
    r.broker = j.at("broker").get<std::string>();
    r.mode = broker::parse_mode(j.at("mode").get<std::string>()).value();
    r.jobs_total = j.at("jobs_total").get<std::int64_t>();
    r.jobs_completed = j.at("jobs_completed").get<std::int64_t>();
    r.total_cost = econ::Money{j.at("total_cost").get<std::int64_t>()};
    r.makespan = j.at("makespan").get<std::int64_t>();
    r.deadline_met = j.at("deadline_met").get<bool>();
    r.budget_respected = j.at("budget_respected").get<bool>();
    for (const auto& [k, v] : j.at("jobs_per_resource").items())
        r.jobs_per_resource[k] = v.get<std::int64_t>();
    for (const auto& [k, v] : j.at("cost_per_resource").items())
        r.cost_per_resource[k] = econ::Money{v.get<std::int64_t>()};
    for (const auto& [k, v] : j.at("rate_per_resource").items())
        r.rate_per_resource[k] = econ::Rate{v.get<std::int64_t>()};
    return r;
}

}  // namespace

std::string summary_to_json(const RunSummary& s) {
    json doc;
    doc["seed"] = s.seed;
    doc["finished_at"] = s.finished_at;
    doc["all_brokers_done"] = s.all_brokers_done;
    doc["feasible"] = s.feasible;
    doc["total_spend"] = s.total_spend.units;
    doc["total_revenue"] = s.total_revenue.units;
    doc["ledger_balanced"] = s.ledger_balanced;
    doc["brokers"] = json::array();
    for (const auto& r : s.brokers) doc["brokers"].push_back(report_json(r));
    doc["resources"] = json::array();
    for (const auto& u : s.resources)
        doc["resources"].push_back({{"resource", u.resource_id},
                                    {"provider", u.provider},
                                    {"price", u.price},
                                    {"jobs", u.jobs_completed},
                                    {"failed", u.jobs_failed},
                                    {"revenue", u.revenue.units},
                                    {"utilization", u.utilization},
                                    {"last_completion", u.last_completion}});
    doc["data_sites"] = json::array();
    for (const auto& u : s.data_sites)
        doc["data_sites"].push_back({{"site", u.site_id},
                                     {"provisioned", u.provisioned.units},
                                     {"granted", u.requests_granted},
                                     {"denied", u.requests_denied},
                                     {"tokens_charged", u.tokens_charged.units}});
    if (!s.trace_csv_path.empty())
        doc["trace_files"] = {{"csv", s.trace_csv_path}, {"jsonl", s.trace_jsonl_path}};
    return doc.dump(2) + "\n";
}

RunSummary summary_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("summary: ") + e.what());
    }
    try {
        RunSummary s;
        s.seed = doc.at("seed").get<std::uint64_t>();
        s.finished_at = doc.at("finished_at").get<std::int64_t>();
        s.all_brokers_done = doc.at("all_brokers_done").get<bool>();
        s.feasible = doc.at("feasible").get<bool>();
        s.total_spend = econ::Money{doc.at("total_spend").get<std::int64_t>()};
        s.total_revenue = econ::Money{doc.at("total_revenue").get<std::int64_t>()};
        s.ledger_balanced = doc.at("ledger_balanced").get<bool>();
        for (const auto& r : doc.at("brokers")) s.brokers.push_back(report_from(r));
        for (const auto& u : doc.at("resources"))
            s.resources.push_back({u.at("resource").get<std::string>(),
                                   u.at("provider").get<std::string>(),
                                   u.at("price").get<std::int64_t>(),
                                   u.at("jobs").get<std::int64_t>(),
                                   u.at("failed").get<std::int64_t>(),
                                   econ::Money{u.at("revenue").get<std::int64_t>()},
                                   u.at("utilization").get<double>(),
                                   u.at("last_completion").get<std::int64_t>()});
        for (const auto& u : doc.at("data_sites"))
            s.data_sites.push_back({u.at("site").get<std::string>(),
                                    econ::Money{u.at("provisioned").get<std::int64_t>()},
                                    u.at("granted").get<std::int64_t>(),
                                    u.at("denied").get<std::int64_t>(),
                                    econ::Money{u.at("tokens_charged").get<std::int64_t>()}});
        if (doc.contains("trace_files")) {
            s.trace_csv_path = doc["trace_files"].at("csv").get<std::string>();
            s.trace_jsonl_path = doc["trace_files"].at("jsonl").get<std::string>();
        }
        return s;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("summary: ") + e.what());
    }
}

// ---- rendering -------------------------------------------------------------

namespace {

struct Totals {
    std::int64_t jobs = 0;
    std::int64_t cost = 0;
    econ::SimTime makespan = 0;
};

Totals totals_of(const RunSummary& s) {
    Totals t;
    for (const auto& u : s.resources) {
        t.jobs += u.jobs_completed;
        t.cost += u.revenue.units;
        t.makespan = std::max(t.makespan, u.last_completion);
    }
    return t;
}

}  // namespace

std::string render_csv(const RunSummary& s) {
    std::ostringstream out;
    out << "resource,price,jobs,cost,makespan\n";
    for (const auto& u : s.resources)
        out << u.resource_id << "," << u.price << "," << u.jobs_completed << ","
            << u.revenue.units << "," << u.last_completion << "\n";
    auto t = totals_of(s);
    out << "total,," << t.jobs << "," << t.cost << "," << t.makespan << "\n";
    return out.str();
}

std::string render_table(const RunSummary& s) {
    std::size_t name_w = 8;
    for (const auto& u : s.resources) name_w = std::max(name_w, u.resource_id.size());

    std::ostringstream out;
    out << "run summary  (seed " << s.seed << ", finished at " << s.finished_at << " s)\n\n";
    out << std::left << std::setw(static_cast<int>(name_w) + 2) << "resource" << std::right
        << std::setw(7) << "price" << std::setw(7) << "jobs" << std::setw(12) << "cost"
        << std::setw(10) << "makespan" << "\n";
    for (const auto& u : s.resources)
        out << std::left << std::setw(static_cast<int>(name_w) + 2) << u.resource_id << std::right
            << std::setw(7) << u.price << std::setw(7) << u.jobs_completed << std::setw(12)
            << u.revenue.units << std::setw(10) << u.last_completion << "\n";
    auto t = totals_of(s);
    out << std::left << std::setw(static_cast<int>(name_w) + 2) << "total" << std::right
        << std::setw(7) << "" << std::setw(7) << t.jobs << std::setw(12) << t.cost
        << std::setw(10) << t.makespan << "\n";

    for (const auto& r : s.brokers) {
        out << "\nbroker " << r.broker << "  mode " << broker::mode_name(r.mode) << "  jobs "
            << r.jobs_completed << "/" << r.jobs_total << "  spend " << r.total_cost.units
            << "  makespan " << r.makespan << "  deadline "
            << (r.deadline_met ? "met" : "missed") << "  budget "
            << (r.budget_respected ? "respected" : "exceeded");
    }
    if (!s.brokers.empty()) out << "\n";

    for (const auto& u : s.data_sites)
        out << "\ndata site " << u.site_id << "  provisioned " << u.provisioned.units
            << " tokens  granted " << u.requests_granted << "  denied " << u.requests_denied
            << "  charged " << u.tokens_charged.units << "\n";

    out << "\nledger: broker spend " << s.total_spend.units << " / provider revenue "
        << s.total_revenue.units << (s.ledger_balanced ? " (balanced)" : " (MISMATCH)") << "\n";
    return out.str();
}

std::string render(const RunSummary& s, const std::string& format) {
    if (format == "table") return render_table(s);
    if (format == "json") return summary_to_json(s);
    if (format == "csv") return render_csv(s);
    throw std::invalid_argument("unknown format: " + format +
                                " (expected table, json or csv)");
}

void write_outputs(RunResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path base(dir);

    auto write = [&](const fs::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << text;
    };
    write(base / "trace.csv", result.trace.csv_string());
    write(base / "trace.jsonl", result.trace.jsonl_string());
    result.summary.trace_csv_path = (base / "trace.csv").string();
    result.summary.trace_jsonl_path = (base / "trace.jsonl").string();
    write(base / "summary.txt", render_table(result.summary));
    write(base / "summary.json", summary_to_json(result.summary));
}

}  // namespace gridecon::run
