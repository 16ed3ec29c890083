#pragma once
// The parameter tower (eps_i, n_i, l_i = 2^{n_i}) driving the construction.
//
// Constraints, all strict:
//   eps_0 = epsilon0,   eps_{i+1} < eps_i / 2
//   n_0 = 0,            n_i > max(2 n_{i-1}, n_{i-1} + 2 - log2(eps_i))
// which force 4 l_{i-1} / l_i <= eps_i. The generator instantiates
// eps_i = epsilon0 * 3^{-i} and picks each n_i minimal admissible; the log2
// constraint is evaluated in exact integer arithmetic, never in floating
// point. n_i > 2 n_{i-1} also keeps the stage-i windows pairwise disjoint.
//
// Derived quantities: K_M, the largest multiple of 2^{n_{M-1}} strictly below
// sqrt(2^{n_M} - 2^{n_{M-1}}); and the mixed-radix digits h_M(n) of
// n = sum_M h_M(n) 2^{n_M} with 0 <= h_M(n) <= 2^{n_{M+1}-n_M} - 1.

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "rational.hpp"

namespace toepsq {

struct ParamSchedule {
    Rational epsilon0;
    std::vector<Rational> epsilons;  // eps_0 .. eps_{M_max}
    std::vector<int> exponents;      // n_0 .. n_{M_max}
    int m_max = 0;

    SeqIndex length(int i) const {  // l_i = 2^{n_i}
        if (i < 0 || i > m_max || i >= int(exponents.size()))
            throw domain_error("schedule: stage index " + std::to_string(i) + " outside [0, M_max]");
        return pow2(exponents[i]);
    }
    const Rational& epsilon(int i) const {
        if (i < 0 || i > m_max || i >= int(epsilons.size()))
            throw domain_error("schedule: epsilon index " + std::to_string(i) + " outside [0, M_max]");
        return epsilons[i];
    }
};

inline ParamSchedule generate_schedule(const Rational& epsilon0, int m_max) {
    if (epsilon0.num <= 0 || epsilon0 > Rational(1))
        throw domain_error("generate_schedule: epsilon0 must lie in (0, 1]");
    if (m_max < 1) throw domain_error("generate_schedule: M_max must be >= 1");
    ParamSchedule s;
    s.epsilon0 = epsilon0;
    s.m_max = m_max;
    s.epsilons.push_back(epsilon0);
    s.exponents.push_back(0);
    Rational eps = epsilon0;
    for (int i = 1; i <= m_max; ++i) {
        eps = eps / Rational(3);
        s.epsilons.push_back(eps);
        int prev = s.exponents[i - 1];
        // floor(n_{i-1} + 2 - log2(eps_i)) + 1; eps_i <= 1 so -log2 is >= 0
        int log_term = floor_log2(Rational(1) / eps);
        int ni = std::max(2 * prev, prev + 2 + log_term) + 1;
        if (ni > 126)
            throw capacity_error("generate_schedule: n_" + std::to_string(i) + " = " +
                                 std::to_string(ni) + " exceeds 128-bit index capacity");
        s.exponents.push_back(ni);
    }
    return s;
}

struct ScheduleViolation {
    int index = 0;
    std::string constraint;
};

namespace detail {

// Sign of a*2^e - b for positive a, b; e may be negative. Shift-free of
// overflow: only the larger side is ever shifted down.
inline int cmp_pow2_scaled(SeqIndex a, int e, SeqIndex b) {
    if (e < 0) return -cmp_pow2_scaled(b, -e, a);
    if (e > 126) return 1;  // a*2^e >= 2^127 > b
    SeqIndex q = b >> e;
    if (a != q) return a < q ? -1 : 1;
    // a == b >> e: equal iff the shifted-out bits of b are zero
    return (b & ((SeqIndex(1) << e) - 1)) == 0 ? 0 : -1;
}

}  // namespace detail

// Empty result iff all tower constraints hold; each violation names the
// stage index and the broken constraint.
inline std::vector<ScheduleViolation> validate_schedule(const ParamSchedule& s) {
    std::vector<ScheduleViolation> out;
    if (s.m_max < 1 || int(s.epsilons.size()) != s.m_max + 1 ||
        int(s.exponents.size()) != s.m_max + 1) {
        out.push_back({-1, "structure: need epsilons and exponents of size M_max+1, M_max >= 1"});
        return out;
    }
    for (int i = 0; i <= s.m_max; ++i) {
        if (s.epsilons[i].num <= 0) out.push_back({i, "epsilon must be positive"});
        if (s.exponents[i] < 0 || s.exponents[i] > 126)
            out.push_back({i, "exponent outside [0, 126]"});
    }
    if (!out.empty()) return out;
    if (s.epsilons[0] != s.epsilon0) out.push_back({0, "epsilon[0] differs from epsilon0"});
    if (s.exponents[0] != 0) out.push_back({0, "n_0 must be 0"});
    for (int i = 1; i <= s.m_max; ++i) {
        const Rational& e = s.epsilons[i];
        const Rational& p = s.epsilons[i - 1];
        if (!(Rational(2) * e < p))
            out.push_back({i, "epsilon halving: requires eps_i < eps_{i-1} / 2 strictly"});
        int n = s.exponents[i], np = s.exponents[i - 1];
        if (n <= 2 * np) out.push_back({i, "exponent growth: requires n_i > 2 n_{i-1}"});
        // n_i > n_{i-1} + 2 - log2(eps_i)  <=>  num_i * 2^(n_i - n_{i-1} - 2) > den_i
        if (detail::cmp_pow2_scaled(e.num, n - np - 2, e.den) <= 0)
            out.push_back({i, "log2 constraint: requires n_i > n_{i-1} + 2 - log2(eps_i)"});
        // consequence 4 l_{i-1} / l_i <= eps_i  <=>  den_i <= num_i * 2^(n_i - n_{i-1} - 2)
        if (detail::cmp_pow2_scaled(e.num, n - np - 2, e.den) < 0)
            out.push_back({i, "window mass: requires 4 l_{i-1} / l_i <= eps_i"});
    }
    return out;
}

// K_M: largest multiple of 2^{n_{M-1}} strictly below sqrt(2^{n_M} - 2^{n_{M-1}}).
inline SeqIndex k_bound(const ParamSchedule& s, int m) {
    if (m < 1 || m > s.m_max)
        throw domain_error("k_bound: M=" + std::to_string(m) + " outside [1, M_max]");
    SeqIndex x = s.length(m) - s.length(m - 1);
    USeqIndex root = isqrt(USeqIndex(x));
    if (root > 0 && root * root == USeqIndex(x)) --root;  // strictly below sqrt
    SeqIndex step = s.length(m - 1);
    SeqIndex k = SeqIndex(root) - SeqIndex(root) % step;
    if (k < step)
        throw domain_error("k_bound: no positive multiple of 2^{n_{M-1}} below sqrt(l_M - l_{M-1})");
    return k;
}

// h_M(n): digit at position M of the mixed-radix expansion of n over the
// tower 2^{n_0}, 2^{n_1}, ...; requires n < l_{M_max} for the digits to
// reconstruct n.
inline SeqIndex digit(const ParamSchedule& s, SeqIndex n, int m) {
    if (n < 0) throw domain_error("digit: n must be non-negative");
    if (m < 0 || m >= s.m_max)
        throw domain_error("digit: position M must satisfy 0 <= M < M_max");
    if (n >= s.length(s.m_max))
        throw capacity_error("digit: n >= l_{M_max}; expansion not representable by this schedule");
    int lo = s.exponents[m], hi = s.exponents[m + 1];
    return (n >> lo) & (pow2(hi - lo) - 1);
}

// --- serialization -----------------------------------------------------
// Key-value text, one key per line:
//   epsilon0 = 1/2
//   M_max = 5
//   epsilons = 1/2 1/6 ...
//   exponents = 0 5 ...

inline std::string serialize_schedule(const ParamSchedule& s) {
    std::string out;
    out += "epsilon0 = " + s.epsilon0.str() + "\n";
    out += "M_max = " + std::to_string(s.m_max) + "\n";
    out += "epsilons =";
    for (const Rational& e : s.epsilons) out += " " + e.str();
    out += "\nexponents =";
    for (int n : s.exponents) out += " " + std::to_string(n);
    out += "\n";
    return out;
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view sv) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < sv.size()) {
        while (i < sv.size() && (sv[i] == ' ' || sv[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < sv.size() && sv[j] != ' ' && sv[j] != '\t') ++j;
        if (j > i) out.emplace_back(sv.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace detail

// Parses without validating the tower constraints; callers decide whether a
// non-conforming schedule is acceptable (validate_schedule reports on it).
inline ParamSchedule parse_schedule(std::string_view text) {
    ParamSchedule s;
    bool have_eps0 = false, have_mmax = false, have_epsilons = false, have_exponents = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw domain_error("schedule parse: expected 'key = value', got '" + std::string(line) + "'");
        auto trim = [](std::string_view v) {
            while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
            while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r'))
                v.remove_suffix(1);
            return v;
        };
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key == "epsilon0") {
            s.epsilon0 = Rational::parse(value);
            have_eps0 = true;
        } else if (key == "M_max") {
            s.m_max = int(parse_seq_index(value));
            have_mmax = true;
        } else if (key == "epsilons") {
            for (const std::string& tok : detail::split_ws(value))
                s.epsilons.push_back(Rational::parse(tok));
            have_epsilons = true;
        } else if (key == "exponents") {
            for (const std::string& tok : detail::split_ws(value))
                s.exponents.push_back(int(parse_seq_index(tok)));
            have_exponents = true;
        } else {
            throw domain_error("schedule parse: unknown key '" + std::string(key) + "'");
        }
    }
    if (!have_eps0 || !have_mmax || !have_epsilons || !have_exponents)
        throw domain_error("schedule parse: missing one of epsilon0, M_max, epsilons, exponents");
    return s;
}

}  // namespace toepsq
