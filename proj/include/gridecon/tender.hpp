#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridecon/directory.hpp"
#include "gridecon/money.hpp"

namespace gridecon::trading {

using econ::Rate;
using econ::SimTime;
using market::AttrMap;
using market::DealTemplate;

struct TenderBid {
    std::string gsp;
    Rate rate{};
    SimTime at = 0;
};

// Contract-net style call for bids managed by a broker.
struct Tender {
    enum class State { announced, awarded, failed };

    std::string tender_id;
    std::string manager;  // broker running the tender
    DealTemplate deal;
    State state = State::announced;
    std::string winner;
    Rate awarded_rate{};
};

// What a provider looks like to the tender protocol at one instant.
struct ProviderSnapshot {
    std::string gsp;
    AttrMap attributes;
    double load = 0;      // busy fraction, 1.0 = fully loaded
    Rate reserve{};       // lowest rate the provider will work for
    Rate quoted_rate{};   // rate it would bid right now
};

enum class QuickResponse { eligible, busy, ineligible, not_interested };

std::string quick_response_name(QuickResponse r);

// How a provider answers a tender announcement without committing:
// ineligible when the template's attribute clauses fail, busy when eligible
// but fully loaded, not_interested when the price hint is below its
// reserve, otherwise eligible.
QuickResponse classify_response(const DealTemplate& deal, const ProviderSnapshot& provider);

std::map<std::string, QuickResponse> quick_response_poll(
    const DealTemplate& deal, const std::vector<ProviderSnapshot>& providers);

// Gathers one bid from every eligible provider once the announcement has
// expired (collection before expiration is an error).
std::vector<TenderBid> collect_bids(const Tender& tender,
                                    const std::vector<ProviderSnapshot>& providers, SimTime t);

// Lowest rate wins; ties go to the earliest bid, then the smallest gsp id.
// No bids at all closes the tender as failed.
Tender award_tender(Tender tender, const std::vector<TenderBid>& bids, SimTime t);

enum class ContractReply { acceptance, refusal };

// A directed contract skips negotiation entirely: the provider accepts iff
// the offered rate covers its reserve and it has capacity left.
inline ContractReply directed_contract(Rate offered, Rate reserve, bool has_capacity) {
    return (offered >= reserve && has_capacity) ? ContractReply::acceptance
                                                : ContractReply::refusal;
}

}  // namespace gridecon::trading
