#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace smr {

using Tick = std::int64_t;
using View = std::uint64_t;
using Pos = std::uint64_t;
using Pid = std::uint32_t;  // 1-based process id
using Hash = std::uint64_t;

inline constexpr Tick kNever = std::numeric_limits<Tick>::max();

// Pre-GST clock rate num/den (local ticks per real tick).
struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (num <= 0 || den <= 0) throw std::invalid_argument("clock rate must be positive");
        auto g = std::gcd(num, den);
        num /= g;
        den /= g;
    }
    friend bool operator==(const Rational&, const Rational&) = default;
};

// floor(a / b) for b > 0
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && (a < 0)) --q;
    return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

inline Pid leader_of(View v, std::uint32_t n) {
    if (v == 0) throw std::invalid_argument("view 0 has no leader");
    return static_cast<Pid>(((v - 1) % n) + 1);
}

}  // namespace smr
