#include "gridecon/calendar.hpp"

#include <array>
#include <algorithm>
#include <stdexcept>

namespace gridecon::econ {

const char* weekday_name(Weekday d) {
    static constexpr std::array names{"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
    return names[static_cast<int>(d)];
}

const char* band_name(PriceBand b) {
    switch (b) {
        case PriceBand::peak: return "peak";
        case PriceBand::lunch: return "lunch";
        case PriceBand::offpeak: return "offpeak";
        case PriceBand::holiday: return "holiday";
    }
    return "?";
}

Weekday parse_weekday(const std::string& name) {
    static constexpr std::array<const char*, 7> shorts{"mon", "tue", "wed", "thu",
                                                       "fri", "sat", "sun"};
    static constexpr std::array<const char*, 7> longs{
        "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
    for (int i = 0; i < 7; ++i)
        if (name == shorts[i] || name == longs[i]) return static_cast<Weekday>(i);
    throw std::invalid_argument("unknown weekday: " + name);
}

Weekday Calendar::weekday_of(SimTime t) const {
    // Negative t not meaningful; clamp to epoch.
    std::int64_t day = t <= 0 ? 0 : t / kSecondsPerDay;
    return static_cast<Weekday>((static_cast<int>(epoch_weekday) + day) % 7);
}

PriceBand Calendar::band_at(SimTime t) const {
    if (is_holiday(t)) return PriceBand::holiday;
    std::int64_t tod = t <= 0 ? 0 : t % kSecondsPerDay;
    if (tod >= lunch_start && tod < lunch_end) return PriceBand::lunch;
    if (tod >= peak_start && tod < peak_end) return PriceBand::peak;
    return PriceBand::offpeak;
}

SimTime Calendar::next_band_change(SimTime t) const {
    const PriceBand current = band_at(t);
    // Band boundaries repeat daily; scan candidate instants until the band
    // value differs. Bounded: the weekly pattern repeats, so 8 days suffice
    // unless every day classifies identically (then report one week out).
    SimTime day_start = (t / kSecondsPerDay) * kSecondsPerDay;
    for (int d = 0; d < 9; ++d) {
        SimTime base = day_start + static_cast<SimTime>(d) * kSecondsPerDay;
        const std::int64_t marks[] = {0, peak_start, lunch_start, lunch_end, peak_end};
        for (std::int64_t m : marks) {
            SimTime cand = base + m;
            if (cand <= t) continue;
            if (band_at(cand) != current) return cand;
        }
    }
    return t + 7 * kSecondsPerDay;
}

void Calendar::validate() const {
    if (peak_start < 0 || peak_end > kSecondsPerDay || peak_start >= peak_end)
        throw std::invalid_argument("calendar: bad peak window");
    if (lunch_start < 0 || lunch_end > kSecondsPerDay || lunch_start >= lunch_end)
        throw std::invalid_argument("calendar: bad lunch window");
    if (lunch_start < peak_start || lunch_end > peak_end)
        throw std::invalid_argument("calendar: lunch window must lie within peak hours");
}

}  // namespace gridecon::econ
