#pragma once

#include <stdexcept>
#include <string>

#include "gridecon/directory.hpp"
#include "gridecon/price_schedule.hpp"

namespace gridecon::trading {

using econ::Rate;
using econ::SimTime;

// A provider's commodity-market price answer, good until the pricing band
// next changes.
struct Quote {
    std::string provider;
    Rate rate{};
    SimTime valid_until = 0;
};

inline Quote request_quote(const market::ServiceOffer& offer, SimTime t, double load,
                           const std::string& consumer) {
    if (!offer.negotiation_models.count(market::NegotiationModel::commodity))
        throw std::invalid_argument("offer " + offer.offer_id +
                                    " does not trade in the commodity market");
    Quote q;
    q.provider = offer.provider;
    q.rate = econ::price_at(offer.pricing, t, load, consumer);
    q.valid_until = offer.pricing.calendar.next_band_change(t);
    return q;
}

}  // namespace gridecon::trading
