#pragma once

// Exact rational arithmetic used throughout the library, plus the extension
// with +infinity that bound values live in (bounds can be unbounded).

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace polybound {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline int sign(const Rational& r) { return sgn(r); }

// Canonical text form: "p/q", or just "p" when the denominator is 1.
inline std::string to_string(const Rational& r) {
    if (r.get_den() == 1)
        return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Parse "p/q", "p", or a finite decimal like "2.5" / "-0.125", all exact.
// Returns nullopt on malformed input.
inline std::optional<Rational> parse_rational(std::string_view text) {
    auto is_integer = [](std::string_view s) {
        if (!s.empty() && (s[0] == '+' || s[0] == '-'))
            s.remove_prefix(1);
        if (s.empty())
            return false;
        for (char ch : s)
            if (ch < '0' || ch > '9')
                return false;
        return true;
    };
    std::string s(text);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!is_integer(num) || !is_integer(den))
            return std::nullopt;
        Rational r{mpz_class(num), mpz_class(den)};
        if (r.get_den() == 0)
            return std::nullopt;
        r.canonicalize();
        return r;
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
        bool neg = !whole.empty() && whole[0] == '-';
        if (whole.empty() || whole == "-" || whole == "+")
            whole += "0";
        if (frac.empty() || !is_integer(frac) || !is_integer(whole))
            return std::nullopt;
        mpz_class den(1);
        for (size_t i = 0; i < frac.size(); ++i)
            den *= 10;
        mpz_class num = mpz_class(whole) * den;
        mpz_class frac_num(frac);
        num += neg ? -frac_num : frac_num;
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    if (!is_integer(s))
        return std::nullopt;
    return Rational(mpz_class(s));
}

// A rational extended with +infinity. Bounds computed by the engines are
// values of this type; +infinity means the underlying LP was unbounded (or
// infeasible for every choice of capacities, depending on the engine).
class ExtRational {
public:
    ExtRational() : finite_(0) {}
    ExtRational(Rational v) : finite_(std::move(v)) {}
    ExtRational(long v) : finite_(v) {}

    static ExtRational infinity() {
        ExtRational e;
        e.infinite_ = true;
        return e;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    const Rational& value() const {
        if (infinite_)
            throw std::logic_error("ExtRational: value() on +inf");
        return finite_;
    }

    friend bool operator==(const ExtRational& a, const ExtRational& b) {
        if (a.infinite_ != b.infinite_)
            return false;
        return a.infinite_ || a.finite_ == b.finite_;
    }
    friend bool operator!=(const ExtRational& a, const ExtRational& b) { return !(a == b); }
    friend bool operator<(const ExtRational& a, const ExtRational& b) {
        if (a.infinite_)
            return false;
        if (b.infinite_)
            return true;
        return a.finite_ < b.finite_;
    }
    friend bool operator<=(const ExtRational& a, const ExtRational& b) { return a < b || a == b; }
    friend bool operator>(const ExtRational& a, const ExtRational& b) { return b < a; }
    friend bool operator>=(const ExtRational& a, const ExtRational& b) { return b <= a; }

    friend std::ostream& operator<<(std::ostream& os, const ExtRational& e) {
        return os << e.to_string();
    }

    // "p/q" or "inf"; the form used in all emitted JSON.
    std::string to_string() const { return infinite_ ? "inf" : polybound::to_string(finite_); }

private:
    Rational finite_;
    bool infinite_ = false;
};

}  // namespace polybound
