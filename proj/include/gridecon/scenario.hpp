#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridecon/broker.hpp"
#include "gridecon/dataecon.hpp"
#include "gridecon/directory.hpp"
#include "gridecon/fabric.hpp"

namespace gridecon::scenario {

// Loader failures carry the offending field's path ("providers[2].offers[0].valid_until")
// and a kind that maps one-to-one onto an exit code.
struct ScenarioError : std::runtime_error {
    enum class Kind { parse, dangling_reference, invariant };
    Kind kind;
    std::string field;

    ScenarioError(Kind k, std::string f, const std::string& why)
        : std::runtime_error(f.empty() ? why : f + ": " + why),
          kind(k),
          field(std::move(f)) {}
};

struct ProviderDef {
    std::string id;
    fabric::ResourceSpec resource;
    std::vector<market::ServiceOffer> offers;  // provider/resource_ref filled by the loader
    std::vector<market::PostedSpecial> specials;
};

struct BrokerDef {
    std::string id;
    broker::UserRequirements requirements;
    std::vector<broker::JobSpec> jobs;
    broker::BrokerConfig config;
    econ::SimTime start_at = 0;
};

struct DataRequest {
    econ::SimTime at = 0;
    std::string user;
    std::int64_t mb = 0;
};

struct DataSiteDef {
    std::string id;
    data::SiteCapacity capacity;
    data::TokenTariff tariff;
    std::map<std::string, std::int64_t> users;  // demand weights for provisioning
    std::vector<DataRequest> requests;          // optional scripted transfers
};

struct Scenario {
    std::uint64_t seed = 1;
    econ::SimTime stop_time = 0;
    econ::Calendar calendar;  // default for every schedule and tariff without its own
    std::vector<ProviderDef> providers;
    std::vector<BrokerDef> brokers;
    std::vector<DataSiteDef> data_sites;
    std::string notes;

    // Full cross-reference and invariant check; load_scenario runs it too.
    void validate() const;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// Canonical serialization; parse_scenario(scenario_to_json(s)) reproduces s.
std::string scenario_to_json(const Scenario& sc);

}  // namespace gridecon::scenario
