#pragma once
// Word-complexity sampling over finite windows, the polynomial entropy-bound
// checks, regular-recurrence verification, and the log p / beta_P ratio.
//
// Counting over a window yields lower bounds of the true complexity, so only
// assertions of the form  sampled <= analytic upper bound  are ever made;
// trend quantities are reported, never asserted. Words of length <= 64 are
// keyed exactly (2 bits per symbol in a 128-bit integer); longer words fall
// back to a double 61-bit rolling hash and the report flags that.

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "parallel.hpp"
#include "schedule.hpp"
#include "sequences.hpp"
#include "weights.hpp"

namespace toepsq {

// Materialized stretch of a sequence: values for indices [lo, lo+size-1].
struct SymbolWindow {
    SeqIndex lo = 0;
    std::vector<Symbol> values;

    SeqIndex hi() const { return lo + SeqIndex(values.size()) - 1; }
    Symbol at(SeqIndex n) const { return values[std::size_t(n - lo)]; }
};

template <typename Eval>
SymbolWindow materialize_window(Eval&& eval, SeqIndex lo, SeqIndex hi,
                                std::size_t budget_entries = kMaterializeBudgetDefault) {
    if (lo > hi) throw domain_error("materialize_window: empty range");
    USeqIndex span = USeqIndex(hi - lo) + 1;
    if (span > budget_entries) throw capacity_error("materialize_window: range exceeds budget");
    SymbolWindow w;
    w.lo = lo;
    w.values.resize(std::size_t(span));
    for (SeqIndex n = lo; n <= hi; ++n) w.values[std::size_t(n - lo)] = eval(n);
    return w;
}

inline SymbolWindow window_of_limit(const ParamSchedule& s, const WeightFunction& base,
                                    SeqIndex lo, SeqIndex hi,
                                    std::size_t budget_entries = kMaterializeBudgetDefault) {
    return materialize_window([&](SeqIndex n) { return limit_value(s, base, n); }, lo, hi,
                              budget_entries);
}

inline SymbolWindow window_of_stage(const ParamSchedule& s, const WeightFunction& base, int stage,
                                    SeqIndex lo, SeqIndex hi,
                                    std::size_t budget_entries = kMaterializeBudgetDefault) {
    return materialize_window([&](SeqIndex n) { return stage_value(s, base, stage, n); }, lo, hi,
                              budget_entries);
}

inline SymbolWindow window_of_base(const WeightFunction& base, SeqIndex lo, SeqIndex hi,
                                   std::size_t budget_entries = kMaterializeBudgetDefault) {
    return materialize_window([&](SeqIndex n) { return base_value(base, n); }, lo, hi,
                              budget_entries);
}

struct ComplexityReport {
    int word_len = 0;            // m
    std::uint64_t sampled_p = 0;  // distinct sliding m-words in the window
    std::uint64_t aligned_p = 0;  // distinct m-words starting at multiples of m
    SeqIndex window_lo = 0, window_hi = 0;
    bool hashed = false;  // keys were hashes, not exact words (m > 64)

    double log_p_over_m() const {
        return sampled_p == 0 ? 0.0 : std::log(double(sampled_p)) / double(word_len);
    }
};

namespace detail {

struct U128Hash {
    std::size_t operator()(USeqIndex v) const {
        std::uint64_t lo = std::uint64_t(v), hi = std::uint64_t(v >> 64);
        std::uint64_t x = lo ^ (hi * 0x9e3779b97f4a7c15ULL);
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return std::size_t(x);
    }
};

// Rolling polynomial hash modulo 2^61 - 1, two independent bases. Symbols
// are pushed first, then the outgoing symbol (weight base^m) is popped.
struct RollingHash {
    static constexpr std::uint64_t kMod = (std::uint64_t(1) << 61) - 1;
    std::uint64_t base;
    std::uint64_t h = 0;
    std::uint64_t top = 1;  // base^m mod kMod

    static std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
        USeqIndex p = USeqIndex(a) * b;
        std::uint64_t lo = std::uint64_t(p & kMod), hi = std::uint64_t(p >> 61);
        std::uint64_t r = lo + hi;
        if (r >= kMod) r -= kMod;
        return r;
    }
    void init(int m) {
        for (int i = 0; i < m; ++i) top = mulmod(top, base);
    }
    void push(std::uint64_t code) { h = (mulmod(h, base) + code) % kMod; }
    void pop(std::uint64_t code) { h = (h + kMod - mulmod(top, code)) % kMod; }
};

}  // namespace detail

// Distinct sliding and aligned m-words within the window. Lower bounds of the
// true complexities by construction.
inline ComplexityReport sampled_complexity(const SymbolWindow& w, int m,
                                           std::size_t distinct_budget = 1u << 27) {
    if (m < 1) throw domain_error("sampled_complexity: word length must be >= 1");
    if (USeqIndex(m) > USeqIndex(w.values.size()))
        throw domain_error("sampled_complexity: window shorter than word length");
    ComplexityReport rep;
    rep.word_len = m;
    rep.window_lo = w.lo;
    rep.window_hi = w.hi();
    const std::size_t len = w.values.size();

    auto aligned_start = [&](std::size_t i) {
        // word covering offsets [i, i+m-1] starts at absolute index w.lo + i
        SeqIndex start = w.lo + SeqIndex(i);
        SeqIndex r = start % m;
        return r == 0;
    };

    if (m <= 64) {
        std::unordered_set<USeqIndex, detail::U128Hash> sliding, aligned;
        const USeqIndex mask = m == 64 ? ~USeqIndex(0) : (USeqIndex(1) << (2 * m)) - 1;
        USeqIndex word = 0;
        for (std::size_t i = 0; i < len; ++i) {
            unsigned code = unsigned(w.values[i] == 0 ? 0 : (w.values[i] > 0 ? 1 : 2));
            word = ((word << 2) | code) & mask;
            if (i + 1 < std::size_t(m)) continue;
            sliding.insert(word);
            if (sliding.size() > distinct_budget)
                throw capacity_error("sampled_complexity: distinct-word storage exceeds budget");
            if (aligned_start(i + 1 - m)) aligned.insert(word);
        }
        rep.sampled_p = sliding.size();
        rep.aligned_p = aligned.size();
        return rep;
    }

    // m > 64: hash-keyed counting (report-only paths use this)
    rep.hashed = true;
    detail::RollingHash a{131, 0, 1}, b{1'000'003, 0, 1};
    a.init(m);
    b.init(m);
    std::unordered_set<USeqIndex, detail::U128Hash> sliding, aligned;
    auto code_of = [&](std::size_t i) {
        return std::uint64_t(w.values[i] == 0 ? 1 : (w.values[i] > 0 ? 2 : 3));
    };
    for (std::size_t i = 0; i < len; ++i) {
        a.push(code_of(i));
        b.push(code_of(i));
        if (i + 1 > std::size_t(m)) {
            a.pop(code_of(i - m));
            b.pop(code_of(i - m));
        }
        if (i + 1 < std::size_t(m)) continue;
        USeqIndex key = (USeqIndex(a.h) << 64) | b.h;
        sliding.insert(key);
        if (sliding.size() > distinct_budget)
            throw capacity_error("sampled_complexity: distinct-word storage exceeds budget");
        if (aligned_start(i + 1 - m)) aligned.insert(key);
    }
    rep.sampled_p = sliding.size();
    rep.aligned_p = aligned.size();
    return rep;
}

// --- entropy bound -------------------------------------------------------

// Q(m) = m^2 + 2m bounds the base-sequence complexity; the limit sequence
// obeys p_b(m) <= (m+1) Q(m)^2.
inline SeqIndex base_complexity_bound(int m) { return SeqIndex(m) * m + 2 * m; }

inline SeqIndex limit_complexity_bound(int m) {
    SeqIndex q = base_complexity_bound(m);
    return (SeqIndex(m) + 1) * q * q;
}

struct EntropyCheckRow {
    ComplexityReport report;
    SeqIndex bound = 0;
    bool pass = false;
};

struct EntropyCheckReport {
    std::vector<EntropyCheckRow> rows;
    bool pass = true;
};

// For each m: sampled p_b(m) <= (m+1) Q(m)^2 (valid since sampled <= true and
// true p_a <= Q); reports the log p / m decay alongside.
inline EntropyCheckReport entropy_bound_check(const SymbolWindow& limit_window,
                                              const std::vector<int>& word_lengths) {
    EntropyCheckReport rep;
    for (int m : word_lengths) {
        EntropyCheckRow row;
        row.report = sampled_complexity(limit_window, m);
        row.bound = limit_complexity_bound(m);
        // hashed counts can only undercount, so the <= direction stays valid
        row.pass = SeqIndex(row.report.sampled_p) <= row.bound;
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

// --- regular recurrence ---------------------------------------------------

struct RecurrenceReport {
    SeqIndex i_max = 0;
    SeqIndex t_lo = 0, t_hi = 0;
    std::uint64_t checked = 0;  // (i, t) pairs
    std::uint64_t failures = 0;
    bool pass = true;
    SeqIndex first_fail_i = 0, first_fail_t = 0;
};

// Period candidate for position i: l_{M(i)} with M(i) = min{M >= 1 : l_{M-1} > |i|}.
inline SeqIndex recurrence_period(const ParamSchedule& s, SeqIndex i) {
    SeqIndex mag = seq_abs(i);
    for (int m = 1; m <= s.m_max; ++m)
        if (s.length(m - 1) > mag) return s.length(m);
    throw capacity_error("recurrence_period: |i| too large for this schedule");
}

// Checks b_{i + t*l_{M(i)}} = b_i for all |i| <= i_max, t in [t_lo, t_hi].
inline RecurrenceReport toeplitz_recurrence_check(const ParamSchedule& s,
                                                  const WeightFunction& base, SeqIndex i_max,
                                                  SeqIndex t_lo, SeqIndex t_hi, int threads = 1) {
    if (i_max < 0) throw domain_error("toeplitz_recurrence_check: i_max must be >= 0");
    if (t_lo > t_hi) throw domain_error("toeplitz_recurrence_check: empty t range");
    struct Acc {
        std::uint64_t checked = 0, failures = 0;
        bool have_fail = false;
        SeqIndex fail_i = 0, fail_t = 0;
    };
    Acc total = chunked_reduce<Acc>(
        -i_max, i_max, threads, Acc{},
        [&](SeqIndex a, SeqIndex b) {
            Acc acc;
            for (SeqIndex i = a; i <= b; ++i) {
                SeqIndex period = recurrence_period(s, i);
                Symbol ref = limit_value(s, base, i);
                for (SeqIndex t = t_lo; t <= t_hi; ++t) {
                    ++acc.checked;
                    if (limit_value(s, base, i + t * period) != ref) {
                        ++acc.failures;
                        if (!acc.have_fail) {
                            acc.have_fail = true;
                            acc.fail_i = i;
                            acc.fail_t = t;
                        }
                    }
                }
            }
            return acc;
        },
        [](Acc x, Acc y) {
            x.checked += y.checked;
            x.failures += y.failures;
            if (!x.have_fail && y.have_fail) {
                x.have_fail = y.have_fail;
                x.fail_i = y.fail_i;
                x.fail_t = y.fail_t;
            }
            return x;
        },
        /*chunk_len=*/SeqIndex(1) << 8);
    RecurrenceReport rep;
    rep.i_max = i_max;
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;
    rep.checked = total.checked;
    rep.failures = total.failures;
    rep.pass = total.failures == 0;
    rep.first_fail_i = total.fail_i;
    rep.first_fail_t = total.fail_t;
    return rep;
}

// --- polynomial ratio ------------------------------------------------------

struct PolySpec {
    std::vector<std::uint64_t> coeffs;  // P(x) = sum coeffs[i] x^i, all >= 0

    bool valid() const {
        if (coeffs.empty()) return false;
        for (std::size_t i = 1; i < coeffs.size(); ++i)
            if (coeffs[i] > 0) return true;
        return false;  // constant polynomials have no finite beta
    }

    SeqIndex eval(SeqIndex x) const {
        if (x < 0) throw domain_error("PolySpec: negative argument");
        SeqIndex acc = 0;
        for (std::size_t i = coeffs.size(); i-- > 0;) {
            if (__builtin_mul_overflow(acc, x, &acc))
                throw capacity_error("PolySpec: evaluation overflow");
            if (__builtin_add_overflow(acc, SeqIndex(coeffs[i]), &acc))
                throw capacity_error("PolySpec: evaluation overflow");
        }
        return acc;
    }
};

// beta_P(n): largest m with P(m) <= n. Non-negative coefficients make P
// non-decreasing on its whole domain.
inline std::uint64_t poly_beta(const PolySpec& p, SeqIndex n) {
    if (!p.valid())
        throw domain_error("poly_beta: polynomial must have a positive non-constant coefficient");
    if (n < 0 || p.eval(0) > n) throw domain_error("poly_beta: no m with P(m) <= n");
    SeqIndex lo = 0, hi = 1;
    auto le = [&](SeqIndex m) {
        try {
            return p.eval(m) <= n;
        } catch (const capacity_error&) {
            return false;  // overflowed past n already
        }
    };
    while (le(hi)) {
        lo = hi;
        hi *= 2;
    }
    while (lo + 1 < hi) {
        SeqIndex mid = lo + (hi - lo) / 2;
        if (le(mid))
            lo = mid;
        else
            hi = mid;
    }
    return std::uint64_t(lo);
}

struct SequentialRatioRow {
    int stage = 0;
    SeqIndex word_len = 0;     // l_M
    std::uint64_t beta = 0;    // beta_P(l_M)
    std::uint64_t sampled_p = 0;
    bool hashed = false;
    double ratio = 0.0;        // log(sampled_p) / beta
};

// The finite surrogate of the polynomial-entropy ratio: per stage M,
// log(sampled p_b(l_M)) / beta_P(l_M) over the given window. Report-only.
inline std::vector<SequentialRatioRow> sequential_ratio_report(const ParamSchedule& s,
                                                               const SymbolWindow& limit_window,
                                                               const PolySpec& p,
                                                               const std::vector<int>& stages) {
    std::vector<SequentialRatioRow> rows;
    for (int m : stages) {
        SeqIndex word_len = s.length(m);
        if (word_len > SeqIndex(limit_window.values.size()))
            throw domain_error("sequential_ratio_report: window shorter than l_M");
        ComplexityReport rep = sampled_complexity(limit_window, int(word_len));
        SequentialRatioRow row;
        row.stage = m;
        row.word_len = word_len;
        row.beta = poly_beta(p, word_len);
        row.sampled_p = rep.sampled_p;
        row.hashed = rep.hashed;
        row.ratio = row.beta == 0 ? 0.0 : std::log(double(rep.sampled_p)) / double(row.beta);
        rows.push_back(row);
    }
    return rows;
}

// --- CSV ---------------------------------------------------------------

inline std::string complexity_csv_header() { return "m,sampled_p,aligned_p,bound,log_p_over_m"; }

inline std::string complexity_csv_row(const ComplexityReport& r, SeqIndex bound) {
    return std::to_string(r.word_len) + "," + std::to_string(r.sampled_p) + "," +
           std::to_string(r.aligned_p) + "," + to_string(bound) + "," +
           detail::format_double(r.log_p_over_m());
}

inline std::string recurrence_csv_header() {
    return "i_max,t_lo,t_hi,checked,failures,first_fail_i,first_fail_t";
}

inline std::string recurrence_csv_row(const RecurrenceReport& r) {
    return to_string(r.i_max) + "," + to_string(r.t_lo) + "," + to_string(r.t_hi) + "," +
           std::to_string(r.checked) + "," + std::to_string(r.failures) + "," +
           (r.pass ? "," : to_string(r.first_fail_i) + "," + to_string(r.first_fail_t));
}

}  // namespace toepsq
