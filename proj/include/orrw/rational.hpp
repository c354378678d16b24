#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace orrw {

// Nonnegative rational with machine-integer numerator/denominator.
// Used for the reinforcement parameter so one-step transition weights and
// the crossing martingale stay exact (no floating drift).
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ <= 0) throw std::invalid_argument("Rational: denominator must be positive");
        if (num_ < 0) throw std::invalid_argument("Rational: negative value not allowed");
        normalize();
    }
    /* implicit */ Rational(std::int64_t num) : Rational(num, 1) {}

    // Exact conversion: every finite nonnegative double is p / 2^k.
    static Rational from_double(double x) {
        if (!(x >= 0) || !std::isfinite(x))
            throw std::invalid_argument("Rational: value must be finite and >= 0");
        if (x == 0) return Rational();
        int exp = 0;
        double m = std::frexp(x, &exp); // x = m * 2^exp, m in [0.5, 1)
        std::int64_t mant = static_cast<std::int64_t>(std::ldexp(m, 53));
        exp -= 53;
        while (mant % 2 == 0 && exp < 0) { mant /= 2; ++exp; }
        if (exp >= 0) {
            if (exp > 10) throw std::invalid_argument("Rational: value too large");
            return Rational(mant << exp, 1);
        }
        if (exp < -62) throw std::invalid_argument("Rational: value not representable");
        return Rational(mant, std::int64_t{1} << -exp);
    }

    // Accepts "p/q", integers and decimal notation.
    static Rational parse(const std::string& text) {
        auto slash = text.find('/');
        if (slash != std::string::npos) {
            std::int64_t p = std::stoll(text.substr(0, slash));
            std::int64_t q = std::stoll(text.substr(slash + 1));
            return Rational(p, q);
        }
        if (text.find('.') != std::string::npos || text.find('e') != std::string::npos ||
            text.find('E') != std::string::npos)
            return from_double(std::stod(text));
        return Rational(std::stoll(text), 1);
    }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_zero() const noexcept { return num_ == 0; }
    bool is_integer() const noexcept { return den_ == 1; }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

private:
    void normalize() {
        if (num_ == 0) { den_ = 1; return; }
        std::int64_t g = std::gcd(num_, den_);
        num_ /= g;
        den_ /= g;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace orrw
