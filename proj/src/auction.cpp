#include "gridecon/auction.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridecon::trading {

std::string auction_kind_name(AuctionKind k) {
    switch (k) {
        case AuctionKind::english: return "english";
        case AuctionKind::dutch: return "dutch";
        case AuctionKind::fpsb: return "fpsb";
        case AuctionKind::vickrey: return "vickrey";
    }
    return "?";
}

std::optional<AuctionKind> parse_auction_kind(const std::string& name) {
    if (name == "english") return AuctionKind::english;
    if (name == "dutch") return AuctionKind::dutch;
    if (name == "fpsb") return AuctionKind::fpsb;
    if (name == "vickrey") return AuctionKind::vickrey;
    return std::nullopt;
}

namespace {

AuctionResult run_english(const AuctionConfig& cfg, const std::vector<Bidder>& bidders) {
    AuctionResult res{cfg.kind, false, "", {}, 0, {}};
    Rate eps = cfg.increment;
    // Round-robin proxy bidding: whoever is not leading raises to
    // standing + increment while that stays within their private value.
    std::size_t leader = bidders.size();  // none yet
    Rate standing{0};
    std::vector<bool> exited(bidders.size(), false);
    bool opened = false;
    bool raised = true;
    while (raised) {
        raised = false;
        for (std::size_t i = 0; i < bidders.size(); ++i) {
            if (i == leader || exited[i]) continue;
            Rate next = opened ? Rate{standing.per_cpu_second + eps.per_cpu_second}
                               : Rate{cfg.reserve.per_cpu_second + eps.per_cpu_second};
            if (bidders[i].private_value >= next) {
                standing = next;
                leader = i;
                opened = true;
                raised = true;
                ++res.rounds;
            } else if (opened) {
                exited[i] = true;
                res.log.push_back(bidders[i].id + " exits at " +
                                  std::to_string(standing.per_cpu_second));
            }
        }
    }
    if (!opened) {
        res.log.push_back("no opening bid above the reserve");
        return res;
    }
    res.sold = true;
    res.winner = bidders[leader].id;
    res.price = standing;
    return res;
}

AuctionResult run_dutch(const AuctionConfig& cfg, const std::vector<Bidder>& bidders) {
    AuctionResult res{cfg.kind, false, "", {}, 0, {}};
    for (Rate price = cfg.start_price; price >= cfg.reserve;
         price.per_cpu_second -= cfg.decrement.per_cpu_second) {
        const Bidder* taker = nullptr;
        for (const auto& b : bidders) {
            if (b.dutch_threshold < price) continue;
            // first acceptance in a continuous descent: highest threshold,
            // then smallest id
            if (!taker || b.dutch_threshold > taker->dutch_threshold ||
                (b.dutch_threshold == taker->dutch_threshold && b.id < taker->id))
                taker = &b;
        }
        if (taker) {
            res.sold = true;
            res.winner = taker->id;
            res.price = price;
            return res;
        }
        ++res.rounds;
    }
    --res.rounds;  // the final tick announced the reserve, not a lower price
    res.log.push_back("descended to the reserve with no acceptance");
    return res;
}

AuctionResult run_sealed(const AuctionConfig& cfg, const std::vector<Bidder>& bidders) {
    AuctionResult res{cfg.kind, false, "", {}, 1, {}};
    std::vector<const Bidder*> order;
    for (const auto& b : bidders) order.push_back(&b);
    std::sort(order.begin(), order.end(), [](const Bidder* a, const Bidder* b) {
        if (a->sealed_bid != b->sealed_bid) return a->sealed_bid > b->sealed_bid;
        return a->id < b->id;
    });
    const Bidder& top = *order.front();
    if (top.sealed_bid < cfg.reserve) {
        res.log.push_back("no sealed bid met the reserve");
        return res;
    }
    res.sold = true;
    res.winner = top.id;
    if (cfg.kind == AuctionKind::fpsb) {
        res.price = top.sealed_bid;
    } else {
        Rate second = order.size() > 1 ? order[1]->sealed_bid : cfg.reserve;
        res.price = std::max(second, cfg.reserve);
    }
    return res;
}

}  // namespace

AuctionResult run_auction(const AuctionConfig& cfg, const std::vector<Bidder>& bidders) {
    if (bidders.empty()) throw std::invalid_argument("auction needs at least one bidder");
    if (cfg.reserve.per_cpu_second < 0) throw std::invalid_argument("negative reserve");
    switch (cfg.kind) {
        case AuctionKind::english:
            if (cfg.increment.per_cpu_second <= 0)
                throw std::invalid_argument("english auction needs a positive increment");
            return run_english(cfg, bidders);
        case AuctionKind::dutch:
            if (cfg.start_price <= cfg.reserve)
                throw std::invalid_argument("dutch auction must start above the reserve");
            if (cfg.decrement.per_cpu_second <= 0)
                throw std::invalid_argument("dutch auction needs a positive decrement");
            if (cfg.tick_seconds < 1) throw std::invalid_argument("dutch tick must be >= 1 s");
            return run_dutch(cfg, bidders);
        case AuctionKind::fpsb:
        case AuctionKind::vickrey:
            return run_sealed(cfg, bidders);
    }
    throw std::invalid_argument("unknown auction kind");
}

}  // namespace gridecon::trading
