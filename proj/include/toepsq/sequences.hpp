#pragma once
// The sequence tower. Base sequence a: w(k) at n = k^2 (k >= 1), 0 elsewhere
// (w = Möbius unless another integer preset is plugged in). Stage 1 zeroes
// l_1*Z; stage M >= 2 rewrites every window
//   [r*l_M - l_{M-1}, r*l_M + l_{M-1} - 1],  r in Z,
// with the central block a^{(M-1)}[-l_{M-1}, l_{M-1}-1]. The Toeplitz limit
// b is evaluated lazily: once l_M > |n| all later stages act as the identity
// at n, so b_n equals a^{(M*)}_n for the first such stage M*. Components
// c^(m) follow the stage-1-literal window convention: the stage-1 windows are
// the singletons l_1*Z, not the two-sided [r*l_1 - 1, r*l_1] blocks.
//
// materialize_stage_bruteforce is the independent oracle: it performs the
// window copying literally (explicit r enumeration, recursive central
// blocks) and never consults the reduction-chain evaluators.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "core.hpp"
#include "mobius.hpp"
#include "schedule.hpp"
#include "weights.hpp"

namespace toepsq {

// k with k^2 = n and k >= 1; empty otherwise (n = 0 has no such k).
inline std::optional<USeqIndex> exact_sqrt(SeqIndex n) {
    if (n <= 0) return std::nullopt;
    USeqIndex r = isqrt(USeqIndex(n));
    if (r * r != USeqIndex(n)) return std::nullopt;
    return r;
}

namespace detail {

inline std::uint64_t root_to_u64(USeqIndex k) {
    if (k > USeqIndex(~std::uint64_t(0)))
        throw capacity_error("base sequence: square root exceeds 64 bits");
    return std::uint64_t(k);
}

}  // namespace detail

inline Symbol base_value(const WeightFunction& base, SeqIndex n) {
    if (n <= 0) return 0;
    auto k = exact_sqrt(n);
    if (!k) return 0;
    return base.sign(detail::root_to_u64(*k));
}

inline Symbol base_value(const MobiusSieve& sieve, SeqIndex n) {
    if (n <= 0) return 0;
    auto k = exact_sqrt(n);
    if (!k) return 0;
    return sieve.at(detail::root_to_u64(*k));
}

// j = n mod l with j in [-l/2, l/2); l a power of two >= 2.
inline SeqIndex centered_residue(SeqIndex n, SeqIndex l) {
    if (l < 2 || (l & (l - 1)) != 0)
        throw domain_error("centered_residue: l must be a power of two >= 2");
    SeqIndex r = n & (l - 1);  // two's complement AND: non-negative residue
    return r < l / 2 ? r : r - l;
}

// a^{(M)}_n via the reduction chain; stage 0 is the base sequence.
inline Symbol stage_value(const ParamSchedule& s, const WeightFunction& base, int stage,
                          SeqIndex n) {
    if (stage < 0 || stage > s.m_max)
        throw domain_error("stage_value: stage " + std::to_string(stage) + " outside [0, M_max]");
    for (int m = stage; m >= 2; --m) {
        SeqIndex prev_len = s.length(m - 1);
        SeqIndex j = centered_residue(n, s.length(m));
        if (j >= -prev_len && j <= prev_len - 1) n = j;  // inside a stage-m window
    }
    if (stage >= 1 && (n & (s.length(1) - 1)) == 0) return 0;
    return base_value(base, n);
}

// b_n. The first stage with l_M > |n| already has the limit value; later
// stages cannot touch n (their windows start at distance l_M - l_{M-1} > |n|).
inline Symbol limit_value(const ParamSchedule& s, const WeightFunction& base, SeqIndex n) {
    SeqIndex mag = seq_abs(n);
    int m = 0;
    while (m <= s.m_max && s.length(m) <= mag) ++m;
    if (m > s.m_max)
        throw capacity_error("limit_value: |n| >= l_{M_max} = 2^" +
                             std::to_string(s.exponents[s.m_max]) +
                             "; index beyond schedule reach");
    return stage_value(s, base, m, n);
}

// Stage-m window membership under the stage-1-literal convention.
inline bool in_stage_window(const ParamSchedule& s, int m, SeqIndex n) {
    if (m < 1 || m > s.m_max)
        throw domain_error("in_stage_window: stage outside [1, M_max]");
    if (m == 1) return (n & (s.length(1) - 1)) == 0;
    SeqIndex prev_len = s.length(m - 1);
    SeqIndex j = centered_residue(n, s.length(m));
    return j >= -prev_len && j <= prev_len - 1;
}

// c^{(m)}_n for the decomposition a^{(M)} = sum_{m=0}^{M} c^{(m)}:
// m = 0 keeps the base value outside every stage window up to M; m >= 1 keeps
// a^{(m)} on the stage-m windows not already claimed by a stage s < m.
inline Symbol component_value(const ParamSchedule& s, const WeightFunction& base, int m,
                              int stage_cap, SeqIndex n) {
    if (m < 0 || m > stage_cap || stage_cap > s.m_max)
        throw domain_error("component_value: need 0 <= m <= M <= M_max");
    if (m == 0) {
        for (int t = 1; t <= stage_cap; ++t)
            if (in_stage_window(s, t, n)) return 0;
        return base_value(base, n);
    }
    for (int t = 1; t < m; ++t)
        if (in_stage_window(s, t, n)) return 0;
    if (!in_stage_window(s, m, n)) return 0;
    return stage_value(s, base, m, n);
}

// n in D_m = {n : a^{(m-1)}_n != a^{(m)}_n}.
inline bool in_difference_set(const ParamSchedule& s, const WeightFunction& base, int m,
                              SeqIndex n) {
    if (m < 1 || m > s.m_max)
        throw domain_error("in_difference_set: stage outside [1, M_max]");
    return stage_value(s, base, m - 1, n) != stage_value(s, base, m, n);
}

// Human-readable reduction chain of a stage evaluation, for diagnostics.
inline std::string reduction_trace(const ParamSchedule& s, const WeightFunction& base, int stage,
                                   SeqIndex n) {
    std::string out = "a^(" + std::to_string(stage) + ")_" + to_string(n);
    SeqIndex cur = n;
    for (int m = stage; m >= 2; --m) {
        SeqIndex prev_len = s.length(m - 1);
        SeqIndex j = centered_residue(cur, s.length(m));
        if (j >= -prev_len && j <= prev_len - 1) {
            SeqIndex r = (cur - j) / s.length(m);
            out += " = [stage " + std::to_string(m) + " window r=" + to_string(r) + "] a^(" +
                   std::to_string(m - 1) + ")_" + to_string(j);
            cur = j;
        } else {
            out += " = [outside stage " + std::to_string(m) + " windows] a^(" +
                   std::to_string(m - 1) + ")_" + to_string(cur);
        }
    }
    if (stage >= 1) {
        if ((cur & (s.length(1) - 1)) == 0) return out + " = 0 [stage 1 zeroes l_1 Z]";
        out += " = a_" + to_string(cur);
    }
    auto k = exact_sqrt(cur);
    if (!k) return out + " = 0 [not a positive square]";
    return out + " = w(" + to_string(SeqIndex(*k)) +
           ") = " + std::to_string(int(base.sign(detail::root_to_u64(*k))));
}

inline constexpr std::size_t kMaterializeBudgetDefault = 10'000'000;

// Literal construction of a^{(stage)} on [lo, hi]: fill the base sequence,
// then apply Steps 1..stage by explicit window copying. The stage-m copy
// source a^{(m-1)}[-l_{m-1}, l_{m-1}-1] is built by recursion, so no part of
// this function depends on the reduction-chain evaluators.
inline std::vector<Symbol> materialize_stage_bruteforce(
    const ParamSchedule& s, const WeightFunction& base, int stage, SeqIndex lo, SeqIndex hi,
    std::size_t budget_entries = kMaterializeBudgetDefault) {
    if (stage < 0 || stage > s.m_max)
        throw domain_error("materialize: stage outside [0, M_max]");
    if (lo > hi) throw domain_error("materialize: empty range");
    USeqIndex span = USeqIndex(hi - lo) + 1;
    if (span > budget_entries)
        throw capacity_error("materialize: range of " + to_string(span) +
                             " entries exceeds budget " + std::to_string(budget_entries));
    std::vector<Symbol> a(std::size_t(span), 0);

    // base: w(k) at the squares k^2 inside [lo, hi]
    if (hi >= 1) {
        SeqIndex first = std::max<SeqIndex>(lo, 1);
        USeqIndex k = isqrt(USeqIndex(first));
        if (k * k < USeqIndex(first)) ++k;
        if (k == 0) k = 1;
        for (; SeqIndex(k * k) <= hi; ++k)
            a[std::size_t(SeqIndex(k * k) - lo)] = base.sign(detail::root_to_u64(k));
    }

    for (int m = 1; m <= stage; ++m) {
        if (m == 1) {
            SeqIndex l1 = s.length(1);
            SeqIndex first = lo + ((l1 - (lo & (l1 - 1))) & (l1 - 1));
            for (SeqIndex p = first; p <= hi; p += l1) a[std::size_t(p - lo)] = 0;
            continue;
        }
        SeqIndex lm = s.length(m), lp = s.length(m - 1);
        std::vector<Symbol> central =
            materialize_stage_bruteforce(s, base, m - 1, -lp, lp - 1, budget_entries);
        SeqIndex r_lo = ceil_div(lo - lp + 1, lm);
        SeqIndex r_hi = floor_div(hi + lp, lm);
        for (SeqIndex r = r_lo; r <= r_hi; ++r) {
            SeqIndex wlo = r * lm - lp;
            SeqIndex clo = std::max(wlo, lo);
            SeqIndex chi = std::min(r * lm + lp - 1, hi);
            for (SeqIndex p = clo; p <= chi; ++p)
                a[std::size_t(p - lo)] = central[std::size_t(p - wlo)];
        }
    }
    return a;
}

}  // namespace toepsq
