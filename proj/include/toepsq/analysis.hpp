#pragma once
// Cesàro averages and density checks.
//
//   S1(N) = (1/N) sum_{k<=N} b_{k^2} w(k)     (weight also drives the base)
//   S2(N) = (1/N) sum_{k<=N} mu(k) b_k
//   baseline(N) = (1/N) sum_{k<=N} mu(k)^2    (-> 6/pi^2)
//
// Integer-valued weights accumulate exactly: the numerator is kept as a
// 128-bit integer and divided once. discrepancy_ratio counts the k <= K_M
// whose square lies in some difference set D_m, m < M, and compares the
// ratio against (1/2) sum_{m<M} eps_m by exact cross-multiplication.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "core.hpp"
#include "mobius.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "schedule.hpp"
#include "sequences.hpp"
#include "weights.hpp"

namespace toepsq {

namespace detail {

// %.15g rendering, used by every CSV writer so files are byte-stable.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

inline void check_square_capacity(const ParamSchedule& s, std::uint64_t n_terms,
                                  const char* what) {
    // need l_{M_max} > N^2 so that b at N^2 is evaluable
    USeqIndex reach = USeqIndex(s.length(s.m_max));
    USeqIndex need = USeqIndex(n_terms) * n_terms;
    if (need >= reach) {
        USeqIndex max_n = isqrt(reach - 1);  // largest N with N^2 < l_{M_max}
        throw capacity_error(std::string(what) + ": N=" + std::to_string(n_terms) +
                             " exceeds schedule reach; maximal feasible N is " +
                             to_string(max_n));
    }
}

}  // namespace detail

struct ExactAverage {
    std::uint64_t n_terms = 0;
    SeqIndex numerator = 0;

    double value() const { return n_terms == 0 ? 0.0 : double(numerator) / double(n_terms); }
};

// S1 with an integer-valued weight; the same weight supplies the base
// sequence of b, matching the generalized construction.
inline ExactAverage weighted_square_average(const ParamSchedule& s, const WeightFunction& weight,
                                            std::uint64_t n_terms, int threads = 1) {
    if (n_terms == 0) throw domain_error("weighted_square_average: N must be >= 1");
    if (!weight.integer_valued())
        throw domain_error("weighted_square_average: weight '" + weight.name() +
                           "' is not integer-valued; use weighted_square_average_real");
    detail::check_square_capacity(s, n_terms, "weighted_square_average");
    SeqIndex total = chunked_reduce<SeqIndex>(
        1, SeqIndex(n_terms), threads, 0,
        [&](SeqIndex a, SeqIndex b) {
            SeqIndex acc = 0;
            for (SeqIndex k = a; k <= b; ++k) {
                int w = weight.sign(std::uint64_t(k));
                if (w == 0) continue;
                acc += w * limit_value(s, weight, k * k);
            }
            return acc;
        },
        [](SeqIndex x, SeqIndex y) { return x + y; });
    return ExactAverage{n_terms, total};
}

struct CompensatedAverage {
    std::uint64_t n_terms = 0;
    double value = 0.0;
    double error_bound = 0.0;  // summation error, not a statistical bound
};

// S1 for arbitrary real-valued weights. The base sequence stays Möbius-built
// (symbols are confined to {-1,0,+1}); the weight only multiplies. Kahan
// accumulation per chunk, chunk sums combined in fixed order.
inline CompensatedAverage weighted_square_average_real(const ParamSchedule& s,
                                                       const MobiusSieve& sieve,
                                                       const WeightFunction& weight,
                                                       std::uint64_t n_terms, int threads = 1) {
    if (n_terms == 0) throw domain_error("weighted_square_average_real: N must be >= 1");
    detail::check_square_capacity(s, n_terms, "weighted_square_average_real");
    WeightFunction base = WeightFunction::mobius(sieve);
    struct KahanAcc {
        double sum = 0.0, comp = 0.0;
        void add(double x) {
            double y = x - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    };
    KahanAcc total = chunked_reduce<KahanAcc>(
        1, SeqIndex(n_terms), threads, KahanAcc{},
        [&](SeqIndex a, SeqIndex b) {
            KahanAcc acc;
            for (SeqIndex k = a; k <= b; ++k) {
                int bv = limit_value(s, base, k * k);
                if (bv == 0) continue;
                acc.add(bv * weight.value(std::uint64_t(k)));
            }
            return acc;
        },
        [](KahanAcc x, KahanAcc y) {
            x.add(y.sum);
            x.add(-y.comp);  // comp is the part already counted in excess
            return x;
        });
    double eps = 2.220446049250313e-16;
    double bound = double(n_terms) * weight.bound() * eps * 4.0;
    return CompensatedAverage{n_terms, total.sum / double(n_terms), bound};
}

// S2: Möbius against b itself. The base weight is whatever b was built from.
inline ExactAverage mobius_average(const ParamSchedule& s, const MobiusSieve& sieve,
                                   const WeightFunction& base, std::uint64_t n_terms,
                                   int threads = 1) {
    if (n_terms == 0) throw domain_error("mobius_average: N must be >= 1");
    if (n_terms > sieve.limit)
        throw range_error("mobius_average: N exceeds sieve limit " + std::to_string(sieve.limit));
    if (USeqIndex(n_terms) >= USeqIndex(s.length(s.m_max)))
        throw capacity_error("mobius_average: N beyond schedule reach");
    SeqIndex total = chunked_reduce<SeqIndex>(
        1, SeqIndex(n_terms), threads, 0,
        [&](SeqIndex a, SeqIndex b) {
            SeqIndex acc = 0;
            for (SeqIndex k = a; k <= b; ++k) {
                int mu = sieve.at(std::uint64_t(k));
                if (mu == 0) continue;
                acc += mu * limit_value(s, base, k);
            }
            return acc;
        },
        [](SeqIndex x, SeqIndex y) { return x + y; });
    return ExactAverage{n_terms, total};
}

// (1/N) sum mu(k)^2, the squarefree density along [1, N].
inline ExactAverage baseline_squarefree(const MobiusSieve& sieve, std::uint64_t n_terms,
                                        int threads = 1) {
    if (n_terms == 0) throw domain_error("baseline_squarefree: N must be >= 1");
    if (n_terms > sieve.limit)
        throw range_error("baseline_squarefree: N exceeds sieve limit " +
                          std::to_string(sieve.limit));
    SeqIndex total = chunked_reduce<SeqIndex>(
        1, SeqIndex(n_terms), threads, 0,
        [&](SeqIndex a, SeqIndex b) {
            SeqIndex acc = 0;
            for (SeqIndex k = a; k <= b; ++k) acc += sieve.at(std::uint64_t(k)) != 0 ? 1 : 0;
            return acc;
        },
        [](SeqIndex x, SeqIndex y) { return x + y; });
    return ExactAverage{n_terms, total};
}

struct DiscrepancyReport {
    int stage_m = 0;        // M
    SeqIndex k_limit = 0;   // K_M
    std::uint64_t count = 0;  // #{k <= K_M : k^2 in union of D_m, m < M}
    double ratio = 0.0;
    Rational bound;          // (1/2) sum_{m=1}^{M-1} eps_m; this is the asserted bound
    Rational bound_shifted;  // (1/2) sum_{m=1}^{M-1} eps_{m-1}, reported alongside, never asserted
    bool pass = false;       // ratio < bound, exact
};

inline DiscrepancyReport discrepancy_ratio(const ParamSchedule& s, const WeightFunction& base,
                                           int stage_m, int threads = 1) {
    if (stage_m < 2 || stage_m > s.m_max)
        throw domain_error("discrepancy_ratio: M must lie in [2, M_max]");
    SeqIndex k_limit = k_bound(s, stage_m);
    if (k_limit > (SeqIndex(1) << 36))
        throw capacity_error("discrepancy_ratio: K_M = " + to_string(k_limit) +
                             " too large to enumerate");
    std::uint64_t count = std::uint64_t(chunked_reduce<SeqIndex>(
        1, k_limit, threads, 0,
        [&](SeqIndex a, SeqIndex b) {
            SeqIndex acc = 0;
            for (SeqIndex k = a; k <= b; ++k) {
                SeqIndex idx = k * k;
                Symbol prev = stage_value(s, base, 0, idx);
                for (int m = 1; m < stage_m; ++m) {
                    Symbol cur = stage_value(s, base, m, idx);
                    if (cur != prev) {
                        ++acc;
                        break;
                    }
                    prev = cur;
                }
            }
            return acc;
        },
        [](SeqIndex x, SeqIndex y) { return x + y; }));

    Rational bound(0), bound_shifted(0);
    for (int m = 1; m < stage_m; ++m) {
        bound = bound + s.epsilon(m);
        bound_shifted = bound_shifted + s.epsilon(m - 1);
    }
    bound = bound / Rational(2);
    bound_shifted = bound_shifted / Rational(2);

    DiscrepancyReport rep;
    rep.stage_m = stage_m;
    rep.k_limit = k_limit;
    rep.count = count;
    rep.ratio = double(count) / double(k_limit);
    rep.bound = bound;
    rep.bound_shifted = bound_shifted;
    rep.pass = Rational(SeqIndex(count), k_limit) < bound;
    return rep;
}

struct StageDistance {
    int stage_m = 0;
    std::uint64_t n_terms = 0;
    SeqIndex numerator = 0;  // sum |a^{(M)}_n - a^{(M-1)}_n|
    double value = 0.0;
    Rational epsilon;
    bool pass = false;  // value < eps_M, exact
};

inline StageDistance stage_distance(const ParamSchedule& s, const WeightFunction& base,
                                    int stage_m, std::uint64_t n_terms, int threads = 1) {
    if (stage_m < 1 || stage_m > s.m_max)
        throw domain_error("stage_distance: M must lie in [1, M_max]");
    if (n_terms == 0) throw domain_error("stage_distance: N must be >= 1");
    SeqIndex total = chunked_reduce<SeqIndex>(
        1, SeqIndex(n_terms), threads, 0,
        [&](SeqIndex a, SeqIndex b) {
            SeqIndex acc = 0;
            for (SeqIndex n = a; n <= b; ++n) {
                int d = stage_value(s, base, stage_m, n) - stage_value(s, base, stage_m - 1, n);
                acc += d < 0 ? -d : d;
            }
            return acc;
        },
        [](SeqIndex x, SeqIndex y) { return x + y; });
    StageDistance out;
    out.stage_m = stage_m;
    out.n_terms = n_terms;
    out.numerator = total;
    out.value = double(total) / double(n_terms);
    out.epsilon = s.epsilon(stage_m);
    out.pass = Rational(total, SeqIndex(n_terms)) < out.epsilon;
    return out;
}

struct ComponentAverage {
    int component_m = 0;
    std::uint64_t n_terms = 0;
    SeqIndex numerator = 0;  // sum mu(n) c^{(m)}_n
    double value = 0.0;
};

// (1/N) sum_{n<=N} mu(n) c^{(m)}_n; reported for decay inspection.
inline ComponentAverage periodic_weight_average(const ParamSchedule& s, const MobiusSieve& sieve,
                                                const WeightFunction& base, int component_m,
                                                int stage_cap, std::uint64_t n_terms,
                                                int threads = 1) {
    if (component_m < 0 || component_m > stage_cap || stage_cap > s.m_max)
        throw domain_error("periodic_weight_average: need 0 <= m <= M <= M_max");
    if (n_terms == 0) throw domain_error("periodic_weight_average: N must be >= 1");
    if (n_terms > sieve.limit)
        throw range_error("periodic_weight_average: N exceeds sieve limit");
    SeqIndex total = chunked_reduce<SeqIndex>(
        1, SeqIndex(n_terms), threads, 0,
        [&](SeqIndex a, SeqIndex b) {
            SeqIndex acc = 0;
            for (SeqIndex n = a; n <= b; ++n) {
                int mu = sieve.at(std::uint64_t(n));
                if (mu == 0) continue;
                acc += mu * component_value(s, base, component_m, stage_cap, n);
            }
            return acc;
        },
        [](SeqIndex x, SeqIndex y) { return x + y; });
    ComponentAverage out;
    out.component_m = component_m;
    out.n_terms = n_terms;
    out.numerator = total;
    out.value = double(total) / double(n_terms);
    return out;
}

// --- combined report + CSV ----------------------------------------------

struct AverageReport {
    std::uint64_t n_terms = 0;
    SeqIndex s1_num = 0;
    double s1 = 0.0;
    SeqIndex s2_num = 0;
    double s2 = 0.0;
    SeqIndex baseline_num = 0;
    double baseline = 0.0;
};

inline AverageReport compute_average_report(const ParamSchedule& s, const MobiusSieve& sieve,
                                            const WeightFunction& weight, std::uint64_t n_terms,
                                            int threads = 1) {
    AverageReport rep;
    rep.n_terms = n_terms;
    ExactAverage s1 = weighted_square_average(s, weight, n_terms, threads);
    rep.s1_num = s1.numerator;
    rep.s1 = s1.value();
    ExactAverage s2 = mobius_average(s, sieve, weight, n_terms, threads);
    rep.s2_num = s2.numerator;
    rep.s2 = s2.value();
    ExactAverage bl = baseline_squarefree(sieve, n_terms, threads);
    rep.baseline_num = bl.numerator;
    rep.baseline = bl.value();
    return rep;
}

inline std::string average_csv_header() { return "N,S1_num,S1,S2_num,S2,baseline"; }

inline std::string average_csv_row(const AverageReport& r) {
    return std::to_string(r.n_terms) + "," + to_string(r.s1_num) + "," +
           detail::format_double(r.s1) + "," + to_string(r.s2_num) + "," +
           detail::format_double(r.s2) + "," + detail::format_double(r.baseline);
}

inline std::string discrepancy_csv_header() { return "M,K,count,ratio,bound,bound_shifted,pass"; }

inline std::string discrepancy_csv_row(const DiscrepancyReport& r) {
    return std::to_string(r.stage_m) + "," + to_string(r.k_limit) + "," +
           std::to_string(r.count) + "," + detail::format_double(r.ratio) + "," + r.bound.str() +
           "," + r.bound_shifted.str() + "," + (r.pass ? "1" : "0");
}

inline std::string distance_csv_header() { return "M,N,sum,value,epsilon,pass"; }

inline std::string distance_csv_row(const StageDistance& r) {
    return std::to_string(r.stage_m) + "," + std::to_string(r.n_terms) + "," +
           to_string(r.numerator) + "," + detail::format_double(r.value) + "," +
           r.epsilon.str() + "," + (r.pass ? "1" : "0");
}

}  // namespace toepsq
