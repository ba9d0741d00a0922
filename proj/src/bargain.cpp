#include "gridecon/bargain.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridecon::trading {

BargainSession make_bargain_session(std::string broker, std::string gsp, Rate broker_offer,
                                    Rate broker_step, Rate broker_limit, Rate gsp_ask,
                                    Rate gsp_step, Rate gsp_reserve, int max_rounds) {
    if (broker_offer.per_cpu_second < 0 || gsp_ask.per_cpu_second < 0)
        throw std::invalid_argument("bargain positions must be non-negative");
    if (broker_step.per_cpu_second < 0 || gsp_step.per_cpu_second < 0)
        throw std::invalid_argument("bargain steps must be non-negative");
    if (broker_offer > broker_limit)
        throw std::invalid_argument("broker opens above its own limit");
    if (gsp_ask < gsp_reserve)
        throw std::invalid_argument("provider opens below its own reserve");
    if (max_rounds < 1) throw std::invalid_argument("bargain needs at least one round");
    if (broker_step.per_cpu_second <= 0 && gsp_step.per_cpu_second <= 0 &&
        broker_offer < gsp_ask)
        throw std::invalid_argument("neither side will move and the positions are apart");
    BargainSession s;
    s.broker = std::move(broker);
    s.gsp = std::move(gsp);
    s.broker_offer = broker_offer;
    s.broker_step = broker_step;
    s.broker_limit = broker_limit;
    s.gsp_ask = gsp_ask;
    s.gsp_step = gsp_step;
    s.gsp_reserve = gsp_reserve;
    s.max_rounds = max_rounds;
    return s;
}

BargainSession negotiate_bargain(BargainSession s, const BargainObserver& on_round) {
    if (s.state != BargainSession::State::open)
        throw std::logic_error("bargain session already closed");
    while (s.round < s.max_rounds) {
        ++s.round;
        if (s.round > 1) {
            s.broker_offer = std::min(Rate{s.broker_offer.per_cpu_second +
                                           s.broker_step.per_cpu_second},
                                      s.broker_limit);
            s.gsp_ask = std::max(Rate{s.gsp_ask.per_cpu_second - s.gsp_step.per_cpu_second},
                                 s.gsp_reserve);
        }
        if (s.broker_offer >= s.gsp_ask) {
            s.state = BargainSession::State::agreed;
            s.agreed_rate = s.gsp_ask;
            if (on_round) on_round(s);
            return s;
        }
        if (on_round) on_round(s);
    }
    s.state = BargainSession::State::abandoned;
    return s;
}

}  // namespace gridecon::trading
