#include "gridecon/price_schedule.hpp"

#include <stdexcept>

namespace gridecon::econ {

void PriceSchedule::validate() const {
    calendar.validate();
    for (Rate r : {peak_time_price, lunch_time_price, offpeak_time_price, price_holiday_time})
        if (r.per_cpu_second < 0)
            throw std::invalid_argument("price_schedule: negative band rate");
    if (discount_when_lightly_loaded < 0 || discount_when_lightly_loaded > 100)
        throw std::invalid_argument("price_schedule: discount percent out of [0,100]");
    if (raise_price_high_demand < 0)
        throw std::invalid_argument("price_schedule: negative raise percent");
    for (const auto& [id, r] : per_consumer_overrides)
        if (r.per_cpu_second < 0)
            throw std::invalid_argument("price_schedule: negative override for " + id);
}

Rate PriceSchedule::band_rate(SimTime t) const {
    switch (calendar.band_at(t)) {
        case PriceBand::peak: return peak_time_price;
        case PriceBand::lunch: return lunch_time_price;
        case PriceBand::offpeak: return offpeak_time_price;
        case PriceBand::holiday: return price_holiday_time;
    }
    return offpeak_time_price;
}

Rate PriceSchedule::base_rate(SimTime t, const std::string& consumer) const {
    if (auto it = per_consumer_overrides.find(consumer); it != per_consumer_overrides.end())
        return it->second;
    return band_rate(t);
}

Rate price_at(const PriceSchedule& schedule, SimTime t, double load,
              const std::string& consumer) {
    if (load < 0.0 || load > 1.0) throw std::invalid_argument("price_at: load out of [0,1]");
    Rate base = schedule.base_rate(t, consumer);
    if (load < 0.5)
        return Rate{apply_discount_percent(base.per_cpu_second,
                                           schedule.discount_when_lightly_loaded)};
    if (load > 0.5)
        return Rate{apply_raise_percent(base.per_cpu_second,
                                        schedule.raise_price_high_demand)};
    return base;
}

}  // namespace gridecon::econ
