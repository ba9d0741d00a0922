#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>

namespace gridecon::econ {

// Simulated grid currency (G$) and data-economy tokens. Amounts are integer
// units; one unit is indivisible. Sub-unit prices are expressed by scaling
// the whole scenario (all amounts in the smallest unit).
struct Money {
    std::int64_t units = 0;
    constexpr auto operator<=>(const Money&) const = default;
};

// Access price in currency units per CPU-second.
struct Rate {
    std::int64_t per_cpu_second = 0;
    constexpr auto operator<=>(const Rate&) const = default;
};

using Duration = std::int64_t;  // simulated seconds

inline Money add(Money a, Money b) {
    std::int64_t r;
    if (__builtin_add_overflow(a.units, b.units, &r))
        throw std::overflow_error("money addition overflow");
    return Money{r};
}

inline Money sub(Money a, Money b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a.units, b.units, &r))
        throw std::overflow_error("money subtraction overflow");
    return Money{r};
}

inline Money operator+(Money a, Money b) { return add(a, b); }
inline Money operator-(Money a, Money b) { return sub(a, b); }
inline Money& operator+=(Money& a, Money b) { a = add(a, b); return a; }
inline Money& operator-=(Money& a, Money b) { a = sub(a, b); return a; }

// cpu_seconds * rate, exact; overflow is a hard error, never wraparound.
inline Money job_cost(Duration cpu_seconds, Rate rate) {
    if (cpu_seconds < 0) throw std::invalid_argument("job_cost: negative duration");
    if (rate.per_cpu_second < 0) throw std::invalid_argument("job_cost: negative rate");
    std::int64_t r;
    if (__builtin_mul_overflow(cpu_seconds, rate.per_cpu_second, &r))
        throw std::overflow_error("job_cost overflow");
    return Money{r};
}

// floor(value * (100 - percent) / 100), percent in [0, 100]
inline std::int64_t apply_discount_percent(std::int64_t value, int percent) {
    if (percent < 0 || percent > 100)
        throw std::invalid_argument("discount percent out of range");
    __int128 scaled = static_cast<__int128>(value) * (100 - percent);
    return static_cast<std::int64_t>(scaled / 100);
}

// floor(value * (100 + percent) / 100), percent >= 0
inline std::int64_t apply_raise_percent(std::int64_t value, int percent) {
    if (percent < 0) throw std::invalid_argument("raise percent negative");
    __int128 scaled = static_cast<__int128>(value) * (100 + percent);
    if (scaled / 100 > INT64_MAX) throw std::overflow_error("raise overflow");
    return static_cast<std::int64_t>(scaled / 100);
}

}  // namespace gridecon::econ
