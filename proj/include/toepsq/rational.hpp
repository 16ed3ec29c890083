#pragma once
// Exact rationals over 128-bit integers. The tower parameters keep values
// tiny; any intermediate overflow throws capacity_error instead of wrapping.

#include <string>
#include <string_view>

#include "core.hpp"

namespace toepsq {

namespace detail {

inline USeqIndex gcd128(USeqIndex a, USeqIndex b) {
    while (b != 0) {
        USeqIndex t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline SeqIndex mul_checked(SeqIndex a, SeqIndex b) {
    SeqIndex out;
    if (__builtin_mul_overflow(a, b, &out))
        throw capacity_error("rational arithmetic overflow");
    return out;
}

inline SeqIndex add_checked(SeqIndex a, SeqIndex b) {
    SeqIndex out;
    if (__builtin_add_overflow(a, b, &out))
        throw capacity_error("rational arithmetic overflow");
    return out;
}

}  // namespace detail

struct Rational {
    SeqIndex num = 0;
    SeqIndex den = 1;  // always > 0, gcd(|num|, den) = 1

    Rational() = default;
    Rational(SeqIndex n) : num(n), den(1) {}  // NOLINT: implicit by design
    Rational(SeqIndex n, SeqIndex d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw domain_error("rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        if (num == 0) {
            den = 1;
            return;
        }
        USeqIndex g = detail::gcd128(USeqIndex(seq_abs(num)), USeqIndex(den));
        num /= SeqIndex(g);
        den /= SeqIndex(g);
    }

    // "p/q", "p", or a plain decimal like "0.25".
    static Rational parse(std::string_view s) {
        auto slash = s.find('/');
        if (slash != std::string_view::npos) {
            SeqIndex n = parse_seq_index(s.substr(0, slash));
            SeqIndex d = parse_seq_index(s.substr(slash + 1));
            return Rational(n, d);
        }
        auto dot = s.find('.');
        if (dot != std::string_view::npos) {
            std::string digits(s.substr(0, dot));
            std::string_view frac = s.substr(dot + 1);
            if (frac.empty()) throw domain_error("rational: trailing '.' in '" + std::string(s) + "'");
            digits.append(frac);
            SeqIndex n = parse_seq_index(digits);
            SeqIndex d = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) d = detail::mul_checked(d, 10);
            return Rational(n, d);
        }
        return Rational(parse_seq_index(s));
    }

    std::string str() const {
        if (den == 1) return to_string(num);
        return to_string(num) + "/" + to_string(den);
    }

    double to_double() const { return (double)num / (double)den; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(detail::add_checked(detail::mul_checked(a.num, b.den),
                                            detail::mul_checked(b.num, a.den)),
                        detail::mul_checked(a.den, b.den));
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(detail::add_checked(detail::mul_checked(a.num, b.den),
                                            -detail::mul_checked(b.num, a.den)),
                        detail::mul_checked(a.den, b.den));
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(detail::mul_checked(a.num, b.num), detail::mul_checked(a.den, b.den));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw domain_error("rational: division by zero");
        return Rational(detail::mul_checked(a.num, b.den), detail::mul_checked(a.den, b.num));
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return detail::mul_checked(a.num, b.den) < detail::mul_checked(b.num, a.den);
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
};

// Largest e with 2^e <= r; r must be positive. e may be negative.
// Comparisons use shifts of the larger side only, so nothing can overflow.
inline int floor_log2(const Rational& r) {
    if (r.num <= 0) throw domain_error("floor_log2: argument must be positive");
    SeqIndex num = r.num, den = r.den;
    if (num >= den) {
        int e = 0;
        while (e + 1 <= 126 && den <= (num >> (e + 1))) ++e;  // den*2^(e+1) <= num
        return e;
    }
    int t = 0;  // smallest t with num*2^t >= den, i.e. num >= ceil(den / 2^t)
    for (;;) {
        SeqIndex q = den >> t;
        SeqIndex bump = (t > 0 && (den & ((SeqIndex(1) << t) - 1)) != 0) ? 1 : 0;
        if (num >= q + bump) break;
        ++t;
    }
    return -t;
}

}  // namespace toepsq
