#pragma once
// Arithmetic weight functions. The named presets (Möbius, Liouville, unit)
// are integer-valued with |w(n)| <= 1 and can serve both as the correlation
// weight and as the symbol source of the base sequence. Custom weights are
// real-valued multipliers only; their averages are accumulated in compensated
// floating point with a reported error bound.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"
#include "mobius.hpp"

namespace toepsq {

class WeightFunction {
  public:
    enum class Kind { kMobius, kLiouville, kUnit, kCustom };

    // View onto an existing Möbius table; the sieve must outlive the weight.
    static WeightFunction mobius(const MobiusSieve& sieve) {
        WeightFunction w(Kind::kMobius, "mobius");
        w.mobius_ = &sieve;
        w.limit_ = sieve.limit;
        return w;
    }

    // Liouville lambda(n) = (-1)^Omega(n), tabulated by a linear sieve.
    static WeightFunction liouville(std::uint64_t limit) {
        if (limit == 0) throw capacity_error("liouville sieve: limit must be >= 1");
        detail::check_sieve_budget(limit, "liouville sieve");
        auto table = std::make_shared<std::vector<std::int8_t>>(limit + 1, 0);
        std::vector<std::int8_t>& lam = *table;
        lam[1] = 1;
        std::vector<bool> composite(limit + 1, false);
        std::vector<std::uint64_t> primes;
        for (std::uint64_t n = 2; n <= limit; ++n) {
            if (!composite[n]) {
                primes.push_back(n);
                lam[n] = -1;
            }
            for (std::uint64_t p : primes) {
                if (p > limit / n) break;
                composite[n * p] = true;
                lam[n * p] = -lam[n];  // completely multiplicative
                if (n % p == 0) break;
            }
        }
        WeightFunction w(Kind::kLiouville, "liouville");
        w.table_ = std::move(table);
        w.limit_ = limit;
        return w;
    }

    static WeightFunction unit() { return WeightFunction(Kind::kUnit, "unit"); }

    static WeightFunction custom(std::string name, std::function<double(std::uint64_t)> fn,
                                 double bound) {
        WeightFunction w(Kind::kCustom, std::move(name));
        w.fn_ = std::move(fn);
        w.bound_ = bound;
        return w;
    }

    static WeightFunction preset(std::string_view name, const MobiusSieve& sieve,
                                 std::uint64_t liouville_limit) {
        if (name == "mobius") return mobius(sieve);
        if (name == "liouville") return liouville(liouville_limit);
        if (name == "unit") return unit();
        throw domain_error("unknown weight preset '" + std::string(name) +
                           "' (expected mobius, liouville or unit)");
    }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    // Integer-valued weights take values in {-1, 0, +1} and accumulate exactly.
    bool integer_valued() const { return kind_ != Kind::kCustom; }
    double bound() const { return bound_; }
    // 0 means unlimited (unit weight); otherwise the backing table limit.
    std::uint64_t table_limit() const { return kind_ == Kind::kUnit ? 0 : limit_; }

    Symbol sign(std::uint64_t n) const {
        switch (kind_) {
            case Kind::kMobius:
                return mobius_->at(n);
            case Kind::kLiouville:
                if (n == 0 || n > limit_)
                    throw range_error("liouville: n=" + std::to_string(n) +
                                      " outside table range [1, " + std::to_string(limit_) + "]");
                return (*table_)[n];
            case Kind::kUnit:
                if (n == 0) throw range_error("unit weight: n must be >= 1");
                return 1;
            case Kind::kCustom:
                break;
        }
        throw domain_error("weight '" + name_ + "' is not integer-valued");
    }

    double value(std::uint64_t n) const {
        if (kind_ == Kind::kCustom) return fn_(n);
        return double(sign(n));
    }

  private:
    WeightFunction(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    Kind kind_;
    std::string name_;
    const MobiusSieve* mobius_ = nullptr;
    std::shared_ptr<const std::vector<std::int8_t>> table_;
    std::function<double(std::uint64_t)> fn_;
    std::uint64_t limit_ = 0;
    double bound_ = 1.0;
};

}  // namespace toepsq
