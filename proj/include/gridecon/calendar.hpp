#pragma once

#include <cstdint>
#include <set>
#include <string>

namespace gridecon::econ {

using SimTime = std::int64_t;  // seconds since scenario epoch

constexpr SimTime kSecondsPerDay = 86400;

enum class Weekday { monday = 0, tuesday, wednesday, thursday, friday, saturday, sunday };

enum class PriceBand { peak, lunch, offpeak, holiday };

const char* weekday_name(Weekday d);
const char* band_name(PriceBand b);
Weekday parse_weekday(const std::string& name);  // "mon".."sun" or full names

// Weekly simulated calendar. The scenario epoch (t = 0) falls at 00:00 on
// epoch_weekday. Working days carry the peak/lunch/offpeak bands; holiday
// weekdays are one flat band that dominates time-of-day classification.
struct Calendar {
    Weekday epoch_weekday = Weekday::monday;
    std::set<Weekday> holidays{Weekday::saturday, Weekday::sunday};
    std::int32_t peak_start = 9 * 3600;          // 09:00
    std::int32_t peak_end = 18 * 3600;           // 18:00
    std::int32_t lunch_start = 12 * 3600 + 1800; // 12:30
    std::int32_t lunch_end = 14 * 3600;          // 14:00

    Weekday weekday_of(SimTime t) const;
    bool is_holiday(SimTime t) const { return holidays.contains(weekday_of(t)); }
    PriceBand band_at(SimTime t) const;

    // First instant strictly after t at which band_at changes value.
    SimTime next_band_change(SimTime t) const;

    void validate() const;  // throws std::invalid_argument on nonsense windows
};

}  // namespace gridecon::econ
