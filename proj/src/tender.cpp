#include "gridecon/tender.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridecon::trading {

std::string quick_response_name(QuickResponse r) {
    switch (r) {
        case QuickResponse::eligible: return "eligible";
        case QuickResponse::busy: return "busy";
        case QuickResponse::ineligible: return "ineligible";
        case QuickResponse::not_interested: return "not_interested";
    }
    return "?";
}

QuickResponse classify_response(const DealTemplate& deal, const ProviderSnapshot& provider) {
    if (!market::matches_all(provider.attributes, deal.eligibility))
        return QuickResponse::ineligible;
    if (provider.load >= 1.0) return QuickResponse::busy;
    if (deal.price_hint && *deal.price_hint < provider.reserve)
        return QuickResponse::not_interested;
    return QuickResponse::eligible;
}

std::map<std::string, QuickResponse> quick_response_poll(
    const DealTemplate& deal, const std::vector<ProviderSnapshot>& providers) {
    std::map<std::string, QuickResponse> out;
    for (const auto& p : providers) out[p.gsp] = classify_response(deal, p);
    return out;
}

std::vector<TenderBid> collect_bids(const Tender& tender,
                                    const std::vector<ProviderSnapshot>& providers,
                                    SimTime t) {
    if (t < tender.deal.expiration)
        throw std::logic_error("bids are collected at or after the tender expiration");
    std::vector<TenderBid> bids;
    for (const auto& p : providers)
        if (classify_response(tender.deal, p) == QuickResponse::eligible)
            bids.push_back({p.gsp, p.quoted_rate, t});
    return bids;
}

Tender award_tender(Tender tender, const std::vector<TenderBid>& bids, SimTime t) {
    if (tender.state != Tender::State::announced)
        throw std::logic_error("tender " + tender.tender_id + " already closed");
    if (t < tender.deal.expiration)
        throw std::logic_error("cannot award before the tender expiration");
    if (bids.empty()) {
        tender.state = Tender::State::failed;
        return tender;
    }
    const TenderBid* best = &bids.front();
    for (const auto& b : bids) {
        if (b.rate != best->rate ? b.rate < best->rate
            : b.at != best->at  ? b.at < best->at
                                : b.gsp < best->gsp)
            best = &b;
    }
    tender.state = Tender::State::awarded;
    tender.winner = best->gsp;
    tender.awarded_rate = best->rate;
    return tender;
}

}  // namespace gridecon::trading
