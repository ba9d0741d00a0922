#pragma once

#include <map>
#include <string>

#include "gridecon/calendar.hpp"
#include "gridecon/money.hpp"

namespace gridecon::econ {

// Calendar- and load-dependent pricing rule set a provider attaches to a
// resource. Field names follow the scenario file's price_schedule record.
struct PriceSchedule {
    Rate peak_time_price{};
    Rate lunch_time_price{};
    Rate offpeak_time_price{};
    Rate price_holiday_time{};
    int discount_when_lightly_loaded = 0;  // percent, applied when load < 0.5
    int raise_price_high_demand = 0;       // percent, applied when load > 0.5
    std::map<std::string, Rate> per_consumer_overrides;
    Calendar calendar;

    void validate() const;

    Rate band_rate(SimTime t) const;

    // Flat base rate ignoring load: consumer override if present, else the
    // band rate for t.
    Rate base_rate(SimTime t, const std::string& consumer) const;
};

// Per-CPU-second price for a consumer at time t under the given load.
// Pure function of its inputs: base rate (override or band), then a
// multiplicative discount below 50% load or raise above it, floor-rounded.
Rate price_at(const PriceSchedule& schedule, SimTime t, double load,
              const std::string& consumer);

}  // namespace gridecon::econ
