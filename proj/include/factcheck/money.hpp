#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace factcheck {

// Currency amount held as an integer count of 1e-12 units. Integer storage
// keeps ledger sums independent of the order concurrent workers add to them.
class Money {
public:
    static constexpr double kUnitsPerDollar = 1e12;

    constexpr Money() = default;

    static constexpr Money from_units(std::int64_t units) { return Money(units); }
    static Money from_dollars(double dollars) {
        return Money(static_cast<std::int64_t>(std::llround(dollars * kUnitsPerDollar)));
    }

    constexpr std::int64_t units() const { return units_; }
    double dollars() const { return static_cast<double>(units_) / kUnitsPerDollar; }

    constexpr Money& operator+=(Money other) {
        units_ += other.units_;
        return *this;
    }
    friend constexpr Money operator+(Money a, Money b) { return Money(a.units_ + b.units_); }
    friend constexpr Money operator*(Money a, std::int64_t n) { return Money(a.units_ * n); }
    friend constexpr auto operator<=>(Money, Money) = default;

private:
    constexpr explicit Money(std::int64_t units) : units_(units) {}
    std::int64_t units_ = 0;
};

}  // namespace factcheck
