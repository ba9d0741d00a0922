#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridecon/calendar.hpp"
#include "gridecon/money.hpp"

namespace gridecon::trading {

using econ::Rate;
using econ::SimTime;

enum class AuctionKind { english, dutch, fpsb, vickrey };

std::string auction_kind_name(AuctionKind k);
std::optional<AuctionKind> parse_auction_kind(const std::string& name);

struct AuctionConfig {
    AuctionKind kind = AuctionKind::english;
    std::string item;         // resource slot being sold
    Rate reserve{0};
    Rate increment{1};        // english: minimum raise
    Rate start_price{};       // dutch: opening (descending) price
    Rate decrement{1};        // dutch: price drop per tick
    SimTime tick_seconds = 1; // dutch: simulated seconds per tick
};

// One participant. english consults private_value, fpsb/vickrey submit
// sealed_bid, dutch accepts once the announced price falls to
// dutch_threshold.
struct Bidder {
    std::string id;
    Rate private_value{};
    Rate sealed_bid{};
    Rate dutch_threshold{};
};

struct AuctionResult {
    AuctionKind kind = AuctionKind::english;
    bool sold = false;
    std::string winner;
    Rate price{};
    std::int64_t rounds = 0;  // english: bids placed; dutch: ticks elapsed; sealed: 1
    std::vector<std::string> log;
};

// Runs the auction to completion. Bidder order is the submission order;
// sealed-bid ties go to the lexicographically smallest bidder id, and
// same-tick dutch acceptances to the highest threshold (then smallest id).
AuctionResult run_auction(const AuctionConfig& config, const std::vector<Bidder>& bidders);

}  // namespace gridecon::trading
