#pragma once
// Quadratic residues modulo powers of two.
//
// A nonzero residue q is a square mod 2^n exactly when q = 4^r(8s+1). The
// class B(r,s,n) collects the k in [1, 2^n] with k^2 = 4^r(8s+1) mod 2^n;
// class sizes satisfy #B(r,s,n) = 2^r * #B(0,s,n-2r) <= 2^(r+2).
// verify_residue_lemma checks the formula, the bound, pairwise disjointness,
// and that the classes with n-2r >= 1 cover exactly the k whose square is a
// nonzero residue. (k with 2^n | k^2 fit no class with an odd part; they are
// excluded from the coverage statement.)

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace toepsq {

inline constexpr unsigned kEnumerationCapDefault = 24;

struct ResidueForm {
    unsigned r = 0;
    std::uint64_t s = 0;
};

namespace detail {

inline void check_residue_args(unsigned r, std::uint64_t s, unsigned n) {
    if (n == 0 || n > 62) throw domain_error("residue class: n must lie in [1, 62]");
    USeqIndex q = USeqIndex(8 * s + 1) << (2 * r);
    if (2 * r > 62 || q > (USeqIndex(1) << n))
        throw domain_error("residue class: 4^r(8s+1) exceeds 2^n (r=" + std::to_string(r) +
                           ", s=" + std::to_string(s) + ", n=" + std::to_string(n) + ")");
}

}  // namespace detail

// Decomposition q = 4^r(8s+1); empty when q has no such form.
inline std::optional<ResidueForm> residue_form(std::uint64_t q, unsigned n) {
    if (q == 0) throw domain_error("residue_form: q must be nonzero");
    if (n == 0 || n > 62) throw domain_error("residue_form: n must lie in [1, 62]");
    if (q > (std::uint64_t(1) << n))
        throw domain_error("residue_form: q=" + std::to_string(q) + " exceeds 2^n");
    unsigned tz = unsigned(__builtin_ctzll(q));
    if (tz % 2 != 0) return std::nullopt;
    std::uint64_t odd = q >> tz;
    if (odd % 8 != 1) return std::nullopt;
    return ResidueForm{tz / 2, (odd - 1) / 8};
}

struct ResidueClass {
    unsigned r = 0;
    std::uint64_t s = 0;
    unsigned n = 0;
    std::vector<std::uint64_t> members;  // ascending, within [1, 2^n]

    std::uint64_t residue() const { return (8 * s + 1) << (2 * r); }
};

// Brute-force enumeration of B(r,s,n) over all k in [1, 2^n].
inline ResidueClass enumerate_class(unsigned r, std::uint64_t s, unsigned n,
                                    unsigned enumeration_cap = kEnumerationCapDefault) {
    detail::check_residue_args(r, s, n);
    if (n > enumeration_cap)
        throw capacity_error("enumerate_class: n=" + std::to_string(n) +
                             " above enumeration cap " + std::to_string(enumeration_cap));
    ResidueClass out;
    out.r = r;
    out.s = s;
    out.n = n;
    const std::uint64_t size = std::uint64_t(1) << n;
    const std::uint64_t mask = size - 1;
    const std::uint64_t target = out.residue() & mask;  // q = 2^n maps to 0
    for (std::uint64_t k = 1; k <= size; ++k) {
        if ((std::uint64_t)((USeqIndex(k) * k) & mask) == target) out.members.push_back(k);
    }
    return out;
}

// 2^r * #B(0,s,n-2r), the class size without enumerating B(r,s,n) itself.
inline std::uint64_t class_count_formula(unsigned r, std::uint64_t s, unsigned n,
                                         unsigned enumeration_cap = kEnumerationCapDefault) {
    detail::check_residue_args(r, s, n);
    if (n < 2 * r + 1)
        throw domain_error("class_count_formula: requires n - 2r >= 1 (n=" + std::to_string(n) +
                           ", r=" + std::to_string(r) + ")");
    ResidueClass base = enumerate_class(0, s, n - 2 * r, enumeration_cap);
    return (std::uint64_t(1) << r) * base.members.size();
}

struct ResidueLemmaReport {
    bool pass = true;
    unsigned n_max = 0;
    std::uint64_t classes_checked = 0;
    std::string first_failure;                    // empty when pass
    std::vector<std::uint64_t> coverage_counts;   // per n: #{k <= 2^n : k^2 mod 2^n != 0}
};

// Exhaustive check of the class-size formula, the 2^(r+2) bound, disjointness
// and coverage, for every n <= n_max and every (r,s) with 4^r(8s+1) <= 2^n,
// n - 2r >= 1. Stops at the first counterexample.
inline ResidueLemmaReport verify_residue_lemma(unsigned n_max,
                                               unsigned enumeration_cap = kEnumerationCapDefault) {
    if (n_max == 0) throw domain_error("verify_residue_lemma: n_max must be >= 1");
    if (n_max > enumeration_cap)
        throw capacity_error("verify_residue_lemma: n_max above enumeration cap");
    ResidueLemmaReport report;
    report.n_max = n_max;

    auto fail = [&](const std::string& msg) {
        report.pass = false;
        report.first_failure = msg;
    };

    for (unsigned n = 1; n <= n_max && report.pass; ++n) {
        const std::uint64_t size = std::uint64_t(1) << n;
        const std::uint64_t mask = size - 1;
        std::vector<std::uint32_t> cnt(size, 0);
        for (std::uint64_t k = 1; k <= size; ++k) ++cnt[(std::uint64_t)((USeqIndex(k) * k) & mask)];
        const std::uint64_t nonzero_total = size - cnt[0];
        report.coverage_counts.push_back(nonzero_total);

        std::vector<bool> seen(size, false);
        std::uint64_t covered = 0;
        for (unsigned r = 0; 2 * r + 1 <= n && report.pass; ++r) {
            const unsigned m = n - 2 * r;
            const std::uint64_t msize = std::uint64_t(1) << m;
            const std::uint64_t mmask = msize - 1;
            std::vector<std::uint32_t> cnt_m(msize, 0);
            for (std::uint64_t k = 1; k <= msize; ++k)
                ++cnt_m[(std::uint64_t)((USeqIndex(k) * k) & mmask)];

            for (std::uint64_t s = 0; (USeqIndex(8 * s + 1) << (2 * r)) <= USeqIndex(size); ++s) {
                const std::uint64_t q = (8 * s + 1) << (2 * r);  // < 2^n since n-2r >= 1
                const std::uint64_t brute = cnt[q];
                const std::uint64_t formula = (std::uint64_t(1) << r) * cnt_m[8 * s + 1];
                const std::uint64_t bound = std::uint64_t(1) << (r + 2);
                std::string where = "n=" + std::to_string(n) + " r=" + std::to_string(r) +
                                    " s=" + std::to_string(s);
                if (brute != formula) {
                    fail(where + ": #B=" + std::to_string(brute) + " but formula gives " +
                         std::to_string(formula));
                    break;
                }
                if (brute > bound) {
                    fail(where + ": #B=" + std::to_string(brute) + " exceeds bound " +
                         std::to_string(bound));
                    break;
                }
                if (seen[q]) {
                    fail(where + ": residue " + std::to_string(q) + " listed twice");
                    break;
                }
                seen[q] = true;
                covered += brute;
                ++report.classes_checked;
            }
        }
        if (report.pass && covered != nonzero_total)
            fail("n=" + std::to_string(n) + ": classes cover " + std::to_string(covered) +
                 " of " + std::to_string(nonzero_total) + " nonzero-residue k");
    }
    return report;
}

}  // namespace toepsq
