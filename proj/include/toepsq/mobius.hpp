#pragma once
// Möbius function via a linear sieve: one table entry per integer in
// [1, limit]. Construction is O(limit); queries are O(1) and read-only, so
// the table is safe for concurrent use once built.

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "core.hpp"

namespace toepsq {

// Byte budget for sieve tables. Overridable through TOEPSQ_MEMORY_BUDGET.
inline std::uint64_t memory_budget_bytes() {
    if (const char* env = std::getenv("TOEPSQ_MEMORY_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return std::uint64_t(1) << 30;
}

namespace detail {

// Rough footprint of a linear sieve run: value table + composite flags + primes.
inline void check_sieve_budget(std::uint64_t limit, const char* what) {
    std::uint64_t est = (limit + 1) * 2;
    if (limit >= (std::uint64_t(1) << 40) || est > memory_budget_bytes())
        throw capacity_error(std::string(what) + ": limit " + std::to_string(limit) +
                             " exceeds the memory budget (" +
                             std::to_string(memory_budget_bytes()) + " bytes)");
}

}  // namespace detail

struct MobiusSieve {
    std::uint64_t limit = 0;
    std::vector<std::int8_t> values;  // values[n] = mu(n); index 0 unused

    static MobiusSieve build(std::uint64_t limit) {
        if (limit == 0) throw capacity_error("mobius sieve: limit must be >= 1");
        detail::check_sieve_budget(limit, "mobius sieve");
        MobiusSieve s;
        s.limit = limit;
        s.values.assign(limit + 1, 0);
        s.values[1] = 1;
        std::vector<bool> composite(limit + 1, false);
        std::vector<std::uint64_t> primes;
        for (std::uint64_t n = 2; n <= limit; ++n) {
            if (!composite[n]) {
                primes.push_back(n);
                s.values[n] = -1;
            }
            for (std::uint64_t p : primes) {
                if (p > limit / n) break;
                composite[n * p] = true;
                if (n % p == 0) {
                    s.values[n * p] = 0;  // p^2 divides n*p
                    break;
                }
                s.values[n * p] = -s.values[n];
            }
        }
        return s;
    }

    Symbol at(std::uint64_t n) const {
        if (n == 0 || n > limit)
            throw range_error("mobius: n=" + std::to_string(n) + " outside sieve range [1, " +
                              std::to_string(limit) + "]");
        return values[n];
    }
};

}  // namespace toepsq
