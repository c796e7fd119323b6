#pragma once

// Non-negative exact rationals for time schedules, writer parameters and
// verdict-policy thresholds. Values stay exact (arbitrary precision, always
// reduced) until the moment a duration is multiplied into a Hamiltonian.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ctqa {

class Rational {
public:
    Rational() : v_(0) {}

    Rational(long long value) : v_(value) {
        if (value < 0) throw std::invalid_argument("rational: negative value " + std::to_string(value));
    }

    Rational(long long num, long long den) {
        if (den == 0) throw std::invalid_argument("rational: zero denominator");
        if ((num < 0) != (den < 0) && num != 0)
            throw std::invalid_argument("rational: negative value " + std::to_string(num) + "/" + std::to_string(den));
        v_ = boost::multiprecision::cpp_rational(num, den);
    }

    /// Parses "p" or "p/q" (digits only, no sign). Throws on anything else.
    static Rational from_string(const std::string& text) {
        const auto slash = text.find('/');
        const std::string num = text.substr(0, slash == std::string::npos ? text.size() : slash);
        const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
        if (num.empty() || den.empty() || !all_digits(num) || !all_digits(den))
            throw std::invalid_argument("rational: cannot parse \"" + text + "\"");
        if (den.find_first_not_of('0') == std::string::npos)
            throw std::invalid_argument("rational: zero denominator in \"" + text + "\"");
        Rational r;
        r.v_ = boost::multiprecision::cpp_rational(boost::multiprecision::cpp_int(num),
                                                   boost::multiprecision::cpp_int(den));
        return r;
    }

    /// Exact dyadic expansion of a finite non-negative double. Used for
    /// policy-threshold comparisons, which are exact by contract.
    static Rational from_double_exact(double value) {
        if (!std::isfinite(value) || value < 0.0)
            throw std::invalid_argument("rational: value not a finite non-negative number");
        Rational r;
        r.v_ = boost::multiprecision::cpp_rational(value);
        return r;
    }

    double to_double() const { return v_.convert_to<double>(); }

    bool is_zero() const { return v_.is_zero(); }

    /// Compact form: "4", "1/3".
    std::string str() const {
        std::string s = numerator(v_).str();
        if (denominator(v_) != 1) s += "/" + denominator(v_).str();
        return s;
    }

    /// Always-explicit form "p/q" ("4/1"), used in CSV and run output.
    std::string str_explicit() const { return numerator(v_).str() + "/" + denominator(v_).str(); }

    Rational operator+(const Rational& o) const { return wrap(v_ + o.v_); }
    Rational operator*(const Rational& o) const { return wrap(v_ * o.v_); }

    Rational operator-(const Rational& o) const {
        if (v_ < o.v_) throw std::invalid_argument("rational: subtraction would go negative");
        return wrap(v_ - o.v_);
    }

    Rational operator/(const Rational& o) const {
        if (o.is_zero()) throw std::invalid_argument("rational: division by zero");
        return wrap(v_ / o.v_);
    }

    Rational inverse() const {
        if (is_zero()) throw std::invalid_argument("rational: inverse of zero");
        return wrap(1 / v_);
    }

    bool operator==(const Rational& o) const { return v_ == o.v_; }
    bool operator!=(const Rational& o) const { return v_ != o.v_; }
    bool operator<(const Rational& o) const { return v_ < o.v_; }
    bool operator<=(const Rational& o) const { return v_ <= o.v_; }
    bool operator>(const Rational& o) const { return v_ > o.v_; }
    bool operator>=(const Rational& o) const { return v_ >= o.v_; }

    /// Exact comparison of a floating probability against this threshold:
    /// -1 below, 0 equal, +1 above. No tolerance is injected.
    int compare_double(double p) const {
        const auto exact = boost::multiprecision::cpp_rational(p);
        if (exact < v_) return -1;
        if (exact > v_) return 1;
        return 0;
    }

private:
    static bool all_digits(const std::string& s) {
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    }

    static Rational wrap(boost::multiprecision::cpp_rational v) {
        Rational r;
        r.v_ = std::move(v);
        return r;
    }

    boost::multiprecision::cpp_rational v_;
};

}  // namespace ctqa
