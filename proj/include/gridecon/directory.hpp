#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gridecon/price_schedule.hpp"

namespace gridecon::market {

using econ::PriceSchedule;
using econ::Rate;
using econ::SimTime;

using AttrValue = std::variant<std::int64_t, std::string>;
using AttrMap = std::map<std::string, AttrValue>;

// Attribute filters: exact match for enumerations, >= for numeric minima.
// An at_least clause against a string attribute simply fails.
struct AttrClause {
    enum class Op { eq, at_least };
    std::string key;
    Op op = Op::eq;
    AttrValue value;
};

bool matches(const AttrMap& attrs, const AttrClause& clause);
bool matches_all(const AttrMap& attrs, const std::vector<AttrClause>& filter);

enum class NegotiationModel { commodity, posted, bargain, tender, auction, proportional };
std::string model_name(NegotiationModel m);
std::optional<NegotiationModel> parse_model(const std::string& name);

struct ServiceOffer {
    std::string offer_id;
    std::string provider;      // owning service provider
    std::string resource_ref;  // resource behind the offer
    AttrMap attributes;
    PriceSchedule pricing;
    std::set<NegotiationModel> negotiation_models;
    SimTime valid_until = 0;
};

struct SpecialConditions {
    SimTime window_start = 0;
    SimTime window_end = 0;  // half-open [start, end)
    std::int64_t max_cpu_seconds = 0;
    std::set<std::string> consumer_classes;  // empty = any consumer
};

// Discounted posted price tied to a base offer; never above the regular
// band rate anywhere in its window.
struct PostedSpecial {
    std::string offer_id;
    std::string base_offer;
    Rate special_rate{};
    SpecialConditions conditions;
    std::int64_t cpu_seconds_used = 0;

    bool applies(SimTime t, const std::string& consumer) const;
    std::int64_t cpu_seconds_left() const {
        return conditions.max_cpu_seconds - cpu_seconds_used;
    }
};

// Published call for tenders; providers poll these from the directory.
struct DealTemplate {
    std::string addressee;  // user/broker the work is for
    std::vector<AttrClause> eligibility;
    std::int64_t job_count = 0;
    std::int64_t cpu_seconds_per_job = 0;
    std::optional<Rate> price_hint;
    std::string bid_specification;
    SimTime expiration = 0;
};

struct TenderNotice {
    std::string tender_id;
    std::string manager;  // announcing broker
    DealTemplate deal;
};

// Yellow-pages directory: providers publish offers and specials, brokers
// poll. Reads are side-effect free and every result ordering is
// deterministic (provider id, then offer id).
class MarketDirectory {
public:
    std::string publish(ServiceOffer offer, SimTime now);
    void withdraw(const std::string& offer_id);
    bool has_offer(const std::string& offer_id) const;
    const ServiceOffer& offer(const std::string& offer_id) const;

    std::vector<ServiceOffer> query(const std::vector<AttrClause>& filter, SimTime t) const;

    std::string post_special(PostedSpecial special, SimTime now);
    std::vector<PostedSpecial> active_specials(SimTime t, const std::string& consumer) const;
    // First-come first-served against the special's CPU-second cap.
    void consume_special(const std::string& special_id, std::int64_t cpu_seconds);

    // Providers flip this during outages; unavailable providers drop out of
    // query results until restored.
    void set_provider_available(const std::string& provider, bool available);
    bool provider_available(const std::string& provider) const;

    std::string announce_tender(std::string manager, DealTemplate deal, SimTime now);
    std::vector<TenderNotice> open_tenders(SimTime t) const;

    std::string dump_json(SimTime now) const;

private:
    std::map<std::string, ServiceOffer> offers_;
    std::map<std::string, PostedSpecial> specials_;
    std::map<std::string, bool> provider_available_;
    std::vector<TenderNotice> tenders_;
    std::uint64_t next_tender_ = 0;
};

}  // namespace gridecon::market
