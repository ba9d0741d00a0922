#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "gridecon/money.hpp"
#include "gridecon/rational.hpp"

namespace gridecon::trading {

using econ::Money;
using econ::Rational;

// Bid-proportional resource split: each user's share of the machine is its
// bid divided by the sum of all bids, kept as an exact fraction.
struct ShareAllocation {
    std::map<std::string, Money> bids;
    std::map<std::string, Rational> shares;
};

inline ShareAllocation proportional_shares(const std::map<std::string, Money>& bids) {
    Money total{0};
    for (const auto& [user, bid] : bids) {
        if (bid.units < 0) throw std::invalid_argument("negative bid from " + user);
        total += bid;
    }
    if (total.units == 0) throw std::invalid_argument("proportional share needs a positive bid");
    ShareAllocation out{bids, {}};
    for (const auto& [user, bid] : bids) out.shares[user] = Rational(bid.units, total.units);
    return out;
}

}  // namespace gridecon::trading
