#pragma once

#include <functional>
#include <string>

#include "gridecon/money.hpp"

namespace gridecon::trading {

using econ::Rate;

// Alternating-offer price negotiation. The broker's offer climbs by
// broker_step per round (never past broker_limit); the provider's ask drops
// by gsp_step (never below gsp_reserve). Round 1 compares the opening
// positions as given; the session closes at the first round where
// offer >= ask, at the provider's standing ask.
struct BargainSession {
    enum class State { open, agreed, abandoned };

    std::string broker;
    std::string gsp;
    Rate broker_offer{};
    Rate gsp_ask{};
    Rate broker_limit{};
    Rate gsp_reserve{};
    Rate broker_step{};
    Rate gsp_step{};
    int round = 0;
    int max_rounds = 0;
    State state = State::open;
    Rate agreed_rate{};
};

// Validates opening positions; rejects sessions that can never move
// (both steps zero while the positions are apart).
BargainSession make_bargain_session(std::string broker, std::string gsp, Rate broker_offer,
                                    Rate broker_step, Rate broker_limit, Rate gsp_ask,
                                    Rate gsp_step, Rate gsp_reserve, int max_rounds);

using BargainObserver = std::function<void(const BargainSession&)>;

// Runs an open session to its terminal state; on_round (if given) sees the
// session after every comparison round.
BargainSession negotiate_bargain(BargainSession session, const BargainObserver& on_round = {});

}  // namespace gridecon::trading
