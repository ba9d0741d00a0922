#pragma once

#include <stdexcept>
#include <string>

#include "gridecon/money.hpp"

namespace gridecon::econ {

// Community/bartering credits: contributing CPU-seconds to the pool earns
// credits that can be spent later. Spent never exceeds earned.
struct BarterCredit {
    std::string account;
    Money earned{0};
    Money spent{0};

    Money available() const { return earned - spent; }
};

inline BarterCredit accrue_barter_credit(BarterCredit credit, Duration contributed_cpu_seconds,
                                         Rate exchange_rate) {
    if (contributed_cpu_seconds < 0)
        throw std::invalid_argument("accrue_barter_credit: negative contribution");
    credit.earned += job_cost(contributed_cpu_seconds, exchange_rate);
    return credit;
}

inline BarterCredit spend_barter_credit(BarterCredit credit, Money amount) {
    if (amount.units < 0) throw std::invalid_argument("spend_barter_credit: negative amount");
    if (credit.available() < amount)
        throw std::runtime_error("barter credit overdraw: " + credit.account);
    credit.spent += amount;
    return credit;
}

}  // namespace gridecon::econ
