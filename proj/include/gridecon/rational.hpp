#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gridecon::econ {

// Exact rational arithmetic for resource shares. Always normalized:
// denominator > 0, gcd(|num|, den) == 1. Intermediates use __int128 and
// out-of-range results throw rather than wrap.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw std::invalid_argument("rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        num = n;
        den = d;
    }
    explicit Rational(std::int64_t n) : num(n), den(1) {}

    bool operator==(const Rational&) const = default;
    std::strong_ordering operator<=>(const Rational& o) const {
        __int128 lhs = static_cast<__int128>(num) * o.den;
        __int128 rhs = static_cast<__int128>(o.num) * den;
        return lhs <=> rhs;
    }

    std::string str() const {
        return den == 1 ? std::to_string(num)
                        : std::to_string(num) + "/" + std::to_string(den);
    }
    double approx() const { return static_cast<double>(num) / static_cast<double>(den); }
};

namespace detail {
inline Rational reduce128(__int128 n, __int128 d) {
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
        throw std::overflow_error("rational overflow");
    Rational r;
    r.num = static_cast<std::int64_t>(n);
    r.den = static_cast<std::int64_t>(d);
    return r;
}
}  // namespace detail

inline Rational operator+(Rational a, Rational b) {
    return detail::reduce128(static_cast<__int128>(a.num) * b.den +
                                 static_cast<__int128>(b.num) * a.den,
                             static_cast<__int128>(a.den) * b.den);
}
inline Rational operator-(Rational a, Rational b) {
    return detail::reduce128(static_cast<__int128>(a.num) * b.den -
                                 static_cast<__int128>(b.num) * a.den,
                             static_cast<__int128>(a.den) * b.den);
}
inline Rational operator*(Rational a, Rational b) {
    return detail::reduce128(static_cast<__int128>(a.num) * b.num,
                             static_cast<__int128>(a.den) * b.den);
}
inline Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw std::domain_error("rational division by zero");
    return detail::reduce128(static_cast<__int128>(a.num) * b.den,
                             static_cast<__int128>(a.den) * b.num);
}
inline Rational& operator+=(Rational& a, Rational b) { a = a + b; return a; }
inline Rational& operator-=(Rational& a, Rational b) { a = a - b; return a; }

inline std::int64_t floor_to_int(Rational r) {
    std::int64_t q = r.num / r.den;
    if (r.num % r.den != 0 && r.num < 0) --q;
    return q;
}
inline std::int64_t ceil_to_int(Rational r) {
    std::int64_t q = r.num / r.den;
    if (r.num % r.den != 0 && r.num > 0) ++q;
    return q;
}

}  // namespace gridecon::econ
