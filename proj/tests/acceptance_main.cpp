// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any fails. The plain run covers the default-scale criteria;
// --long adds the K_4-scale reproductions (stage-4 discrepancy and the
// 2^25-term averages).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <toepsq/toepsq.hpp>

using namespace toepsq;

namespace {

constexpr double kSixOverPiSq = 0.6079271018540267;

struct Runner {
    int failures = 0;
    std::chrono::steady_clock::time_point start;

    void begin() { start = std::chrono::steady_clock::now(); }
    void report(int criterion, bool pass, const std::string& detail) {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d [%s] %s  (%.1fs)\n", criterion, pass ? "PASS" : "FAIL",
                    detail.c_str(), secs);
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    bool long_mode = false;
    int threads = 2;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--long") == 0) long_mode = true;
        else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) threads = std::atoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: acceptance [--long] [--threads N]\n");
            return 2;
        }
    }

    Runner r;
    std::printf("acceptance suite (%s mode, %d threads)\n", long_mode ? "long" : "default", threads);

    r.begin();
    auto sieve = MobiusSieve::build(long_mode ? (std::uint64_t(1) << 25) : (std::uint64_t(1) << 20));
    auto sched = generate_schedule(Rational(1, 2), 5);
    WeightFunction mu = WeightFunction::mobius(sieve);
    std::printf("setup: sieve limit %llu, tower exponents 0/5/12/25/51/103  (%.1fs)\n",
                (unsigned long long)sieve.limit,
                std::chrono::duration<double>(std::chrono::steady_clock::now() - r.start).count());

    // 1. residue-class lemma, exhaustive to n = 16
    r.begin();
    {
        auto rep = verify_residue_lemma(16);
        r.report(1, rep.pass,
                 "residue classes n<=16: formula, bound, disjointness, coverage (" +
                     std::to_string(rep.classes_checked) + " classes)" +
                     (rep.pass ? "" : "; first failure: " + rep.first_failure));
    }

    // 2. oracle equivalence on [-1e5, 1e5], default and toy schedules
    r.begin();
    {
        auto toy = generate_schedule(Rational(1), 5);
        std::uint64_t mismatches = 0;
        for (const ParamSchedule* s : {&sched, &toy}) {
            for (int stage = 1; stage <= 3; ++stage) {
                auto arr = materialize_stage_bruteforce(*s, mu, stage, -100000, 100000);
                for (SeqIndex n = -100000; n <= 100000; ++n)
                    if (arr[std::size_t(n + 100000)] != stage_value(*s, mu, stage, n)) ++mismatches;
            }
        }
        r.report(2, mismatches == 0,
                 "recursive evaluator vs window-copy oracle, M<=3, |n|<=1e5, 2 schedules (" +
                     std::to_string(mismatches) + " mismatches)");
    }

    // 3. regular recurrence
    r.begin();
    {
        auto rep = toeplitz_recurrence_check(sched, mu, 10000, -50, 50, threads);
        r.report(3, rep.pass,
                 "toeplitz recurrence |i|<=1e4, t in [-50,50] (" + std::to_string(rep.checked) +
                     " checks, " + std::to_string(rep.failures) + " failures)");
    }

    // 4. discrepancy density
    r.begin();
    {
        bool pass = true;
        std::string detail = "discrepancy ratio < (1/2) sum eps_m:";
        std::vector<int> stages = {2, 3};
        if (long_mode) stages.push_back(4);
        for (int m : stages) {
            auto rep = discrepancy_ratio(sched, mu, m, threads);
            pass = pass && rep.pass;
            detail += " M=" + std::to_string(m) + " " + fmt(rep.ratio) + "<" + rep.bound.str();
        }
        if (!long_mode) detail += " (M=4 in --long)";
        r.report(4, pass, detail);
    }

    // 5. main-theorem average at the checkpoints
    r.begin();
    {
        const double threshold = kSixOverPiSq - (1.0 / 6 + 1.0 / 18 + 1.0 / 54) - 0.02;
        bool pass = true;
        std::string detail = "S1(K_M) > " + fmt(threshold) + " and |S1-baseline| <= 2*count/K_M:";
        std::vector<int> stages = {3};
        if (long_mode) stages.push_back(4);
        for (int m : stages) {
            std::uint64_t k_m = std::uint64_t(k_bound(sched, m));
            auto s1 = weighted_square_average(sched, mu, k_m, threads);
            auto bl = baseline_squarefree(sieve, k_m, threads);
            auto d = discrepancy_ratio(sched, mu, m, threads);
            bool above = s1.value() > threshold;
            bool triangle = seq_abs(s1.numerator - bl.numerator) <= 2 * SeqIndex(d.count);
            pass = pass && above && triangle;
            detail += " S1(K_" + std::to_string(m) + ")=" + fmt(s1.value()) +
                      (triangle ? "" : " TRIANGLE-FAIL");
        }
        if (!long_mode) detail += " (K_4 in --long)";
        r.report(5, pass, detail);
    }

    // 6. squarefree baseline
    r.begin();
    {
        auto bl = baseline_squarefree(sieve, 1'000'000, threads);
        double err = std::abs(bl.value() - kSixOverPiSq);
        r.report(6, err < 0.002,
                 "baseline(1e6) = " + fmt(bl.value()) + ", |err| = " + fmt(err) + " < 0.002");
    }

    // 7. Sarnak property of b
    r.begin();
    {
        auto s2 = mobius_average(sched, sieve, mu, 1'000'000, threads);
        bool pass = std::abs(s2.value()) < 0.005;
        std::string detail = "S2(1e6) = " + fmt(s2.value()) + " (<0.005)";
        for (int m : {1, 2}) {
            auto c = periodic_weight_average(sched, sieve, mu, m, 3, 1'000'000, threads);
            pass = pass && std::abs(c.value) < 0.01;
            detail += ", |c" + std::to_string(m) + "-avg| = " + fmt(std::abs(c.value)) + " (<0.01)";
        }
        r.report(7, pass, detail);
    }

    // 8. stage distances below epsilon_M
    r.begin();
    {
        bool pass = true;
        double worst = 0;
        for (int m = 1; m <= 4; ++m) {
            for (std::uint64_t n : {1000ull, 10000ull, 100000ull, 1000000ull}) {
                auto rep = stage_distance(sched, mu, m, n, threads);
                pass = pass && rep.pass;
                worst = std::max(worst, rep.value * rep.epsilon.den / double(rep.epsilon.num));
            }
        }
        r.report(8, pass,
                 "stage distance < eps_M for M<=4, N in {1e3..1e6} (worst value/eps = " +
                     fmt(worst) + ")");
    }

    // 9. complexity falsifiers
    r.begin();
    {
        auto wa = window_of_base(mu, -1'000'000, 1'000'000);
        bool pass_a = true;
        std::uint64_t worst_pa = 0;
        for (int m = 1; m <= 64; ++m) {
            auto rep = sampled_complexity(wa, m);
            pass_a = pass_a && SeqIndex(rep.sampled_p) <= base_complexity_bound(m);
            worst_pa = std::max(worst_pa, rep.sampled_p);
        }
        wa.values.clear();
        wa.values.shrink_to_fit();
        auto wb = window_of_limit(sched, mu, -1'000'000, 1'000'000);
        auto entropy = entropy_bound_check(wb, {8, 16, 32});
        r.report(9, pass_a && entropy.pass,
                 "sampled p_a(m) <= m^2+2m (m<=64, worst " + std::to_string(worst_pa) +
                     "); p_b(m) <= (m+1)(m^2+2m)^2 for m in {8,16,32}");
    }

    // 10. component decomposition
    r.begin();
    {
        std::uint64_t mismatches = 0;
        for (int cap = 0; cap <= 3; ++cap) {
            for (SeqIndex n = -100000; n <= 100000; ++n) {
                int sum = 0;
                for (int m = 0; m <= cap; ++m) sum += component_value(sched, mu, m, cap, n);
                if (sum != stage_value(sched, mu, cap, n)) ++mismatches;
            }
        }
        r.report(10, mismatches == 0,
                 "sum_m c^(m)_n = a^(M)_n for |n|<=1e5, M<=3 (" + std::to_string(mismatches) +
                     " mismatches)");
    }

    // 11. generalized weight: Liouville rebuild
    r.begin();
    {
        WeightFunction lam = WeightFunction::liouville(4096);
        auto s1 = weighted_square_average(sched, lam, 4096, threads);
        r.report(11, std::abs(s1.value()) > 0.3,
                 "liouville-based S1(K_3) = " + fmt(s1.value()) + " (|.| > 0.3)");
    }

    // 12. determinism of the criterion 4-5 reports across parallelism degrees
    r.begin();
    {
        auto make_reports = [&](int deg) {
            std::string out;
            std::vector<int> stages = {2, 3};
            if (long_mode) stages.push_back(4);
            for (int m : stages) out += discrepancy_csv_row(discrepancy_ratio(sched, mu, m, deg)) + "\n";
            std::vector<int> kms = {3};
            if (long_mode) kms.push_back(4);
            for (int m : kms) {
                std::uint64_t k_m = std::uint64_t(k_bound(sched, m));
                out += average_csv_row(compute_average_report(sched, sieve, mu, k_m, deg)) + "\n";
            }
            return out;
        };
        std::string deg1 = make_reports(1);
        std::string deg8 = make_reports(8);
        r.report(12, deg1 == deg8,
                 std::string("discrepancy + average reports byte-identical at degrees 1 and 8") +
                     (long_mode ? " (incl. M=4, K_4)" : ""));
    }

    if (r.failures == 0) {
        std::printf("RESULT: all criteria PASS (%s mode)\n", long_mode ? "long" : "default");
        return 0;
    }
    std::printf("RESULT: %d criteria FAILED\n", r.failures);
    return 1;
}
