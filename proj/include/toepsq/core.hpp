#pragma once
// Core scalar types. Sequence indices routinely exceed 64 bits (the default
// parameter tower reaches period 2^103), so SeqIndex is a signed 128-bit
// integer and overflow is a hard error, never a silent wrap.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace toepsq {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A value outside the operation's domain.
struct domain_error : error {
    using error::error;
};
// A lookup outside a precomputed table.
struct range_error : error {
    using error::error;
};
// Request exceeds a capacity limit: memory budget, 128-bit indices, tower reach.
struct capacity_error : error {
    using error::error;
};

using SeqIndex = __int128;
using USeqIndex = unsigned __int128;

// Sequence values in {-1, 0, +1}; arithmetic promotes to int.
using Symbol = std::int8_t;

constexpr SeqIndex seq_abs(SeqIndex n) { return n < 0 ? -n : n; }

// 2^e as a SeqIndex, e in [0, 126].
inline SeqIndex pow2(int e) {
    if (e < 0 || e > 126)
        throw capacity_error("pow2: exponent " + std::to_string(e) + " outside [0, 126]");
    return SeqIndex(1) << e;
}

inline std::string to_string(USeqIndex v) {
    if (v == 0) return "0";
    char buf[48];
    int pos = 48;
    while (v > 0) {
        buf[--pos] = char('0' + int(v % 10));
        v /= 10;
    }
    return std::string(buf + pos, 48 - pos);
}

inline std::string to_string(SeqIndex v) {
    if (v >= 0) return to_string(USeqIndex(v));
    return "-" + to_string(USeqIndex(0) - USeqIndex(v));
}

inline SeqIndex parse_seq_index(std::string_view s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        neg = (s[i] == '-');
        ++i;
    }
    if (i == s.size()) throw domain_error("parse_seq_index: no digits in '" + std::string(s) + "'");
    const USeqIndex limit = neg ? (USeqIndex(1) << 127) : (USeqIndex(1) << 127) - 1;
    USeqIndex u = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            throw domain_error("parse_seq_index: bad digit in '" + std::string(s) + "'");
        unsigned d = unsigned(s[i] - '0');
        if (u > (limit - d) / 10)
            throw capacity_error("parse_seq_index: '" + std::string(s) + "' exceeds 128-bit range");
        u = u * 10 + d;
    }
    return neg ? -SeqIndex(u - 1) - 1 : SeqIndex(u);
}

// Floor square root, exact.
inline USeqIndex isqrt(USeqIndex x) {
    if (x == 0) return 0;
    const USeqIndex max_root = USeqIndex(~std::uint64_t(0));  // 2^64 - 1
    USeqIndex r = USeqIndex(__builtin_sqrtl((long double)x));
    if (r > max_root) r = max_root;
    for (int i = 0; i < 4 && r > 0; ++i) r = (r + x / r) / 2;  // integer Newton
    while (r > 0 && r * r > x) --r;
    while (r < max_root && (r + 1) * (r + 1) <= x) ++r;
    return r;
}

inline USeqIndex isqrt(SeqIndex x) {
    if (x < 0) throw domain_error("isqrt: negative argument");
    return isqrt(USeqIndex(x));
}

// Division rounding toward -infinity.
constexpr SeqIndex floor_div(SeqIndex a, SeqIndex b) {
    SeqIndex q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

constexpr SeqIndex ceil_div(SeqIndex a, SeqIndex b) { return -floor_div(-a, b); }

}  // namespace toepsq
