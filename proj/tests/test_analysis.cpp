#include <toepsq/analysis.hpp>

#include <cmath>

#include "test_helpers.hpp"

using namespace toepsq;

namespace {

struct Fixture {
    MobiusSieve sieve = MobiusSieve::build(1 << 20);
    ParamSchedule sched = generate_schedule(Rational(1, 2), 5);
    WeightFunction mu = WeightFunction::mobius(sieve);
};

Fixture& fix() {
    static Fixture f;
    return f;
}

constexpr double kSixOverPiSq = 0.6079271018540267;

}  // namespace

TEST_CASE("weighted square average at tiny N") {
    auto& f = fix();
    auto s1 = weighted_square_average(f.sched, f.mu, 1);
    CHECK(s1.numerator == 1);  // b_1 = +1, mu(1) = +1
    CHECK(s1.value() == 1.0);

    s1 = weighted_square_average(f.sched, f.mu, 2);
    CHECK(s1.numerator == 2);  // b_4 = mu(2) = -1, term (-1)(-1) = 1
    CHECK(s1.value() == 1.0);
}

TEST_CASE("weighted square average capacity error names the feasible N") {
    auto& f = fix();
    try {
        weighted_square_average(f.sched, f.mu, std::uint64_t(1) << 52);
        FAIL("expected capacity_error");
    } catch (const capacity_error& e) {
        CHECK(std::string(e.what()).find("maximal feasible N") != std::string::npos);
    }
}

TEST_CASE("square averages at the checkpoints track the squarefree density") {
    auto& f = fix();
    // K_3 = 4096: frozen by an earlier run, cross-checked here against the
    // per-term triangle inequality with the discrepancy count.
    auto s1 = weighted_square_average(f.sched, f.mu, 4096);
    CHECK(s1.numerator == 2460);
    auto bl = baseline_squarefree(f.sieve, 4096);
    CHECK(bl.numerator == 2491);

    auto d3 = discrepancy_ratio(f.sched, f.mu, 3);
    CHECK(d3.count == 32);
    CHECK(seq_abs(s1.numerator - bl.numerator) <= 2 * SeqIndex(d3.count));

    double eps_sum = (1.0 / 6 + 1.0 / 18 + 1.0 / 54);
    CHECK(s1.value() > kSixOverPiSq - eps_sum - 0.02);
}

TEST_CASE("mobius average of b stays near zero") {
    auto& f = fix();
    auto s2 = mobius_average(f.sched, f.sieve, f.mu, 1);
    CHECK(s2.numerator == 1);

    s2 = mobius_average(f.sched, f.sieve, f.mu, 1000);
    CHECK(s2.n_terms == 1000);
    CHECK(double(s2.numerator) / 1000 == s2.value());  // exactness contract

    s2 = mobius_average(f.sched, f.sieve, f.mu, 1'000'000);
    CHECK(std::abs(s2.value()) < 0.005);
}

TEST_CASE("squarefree baseline") {
    auto& f = fix();
    auto b10 = baseline_squarefree(f.sieve, 10);
    CHECK(b10.numerator == 7);  // 1,2,3,5,6,7,10
    CHECK(baseline_squarefree(f.sieve, 1).numerator == 1);
    auto b1m = baseline_squarefree(f.sieve, 1'000'000);
    CHECK(std::abs(b1m.value() - kSixOverPiSq) < 0.002);
    CHECK_THROWS_AS(baseline_squarefree(f.sieve, (1 << 20) + 1), range_error);
}

TEST_CASE("discrepancy ratios stay below the epsilon bound") {
    auto& f = fix();
    auto d2 = discrepancy_ratio(f.sched, f.mu, 2);
    CHECK(d2.count == 0);  // D_1 is empty under the default schedule
    CHECK(d2.k_limit == 32);
    CHECK(d2.pass);

    auto d3 = discrepancy_ratio(f.sched, f.mu, 3);
    CHECK(d3.k_limit == 4096);
    CHECK(d3.bound == Rational(1, 9));
    CHECK(d3.pass);
    CHECK(d3.ratio < 1.0 / 9);

    CHECK_THROWS_AS(discrepancy_ratio(f.sched, f.mu, 1), domain_error);
    CHECK_THROWS_AS(discrepancy_ratio(f.sched, f.mu, 5), capacity_error);  // K_5 = 2^51
}

TEST_CASE("stage distances stay below epsilon_M") {
    auto& f = fix();
    auto d = stage_distance(f.sched, f.mu, 1, 31);
    CHECK(d.numerator == 0);  // no multiple of 32 in range

    d = stage_distance(f.sched, f.mu, 2, 10000);
    CHECK(d.pass);
    CHECK(d.epsilon == Rational(1, 18));

    d = stage_distance(f.sched, f.mu, 3, 1'000'000);
    CHECK(d.pass);
    CHECK(d.epsilon == Rational(1, 54));

    // frozen regression: stage-2 disagreements over [1, 10^6]
    d = stage_distance(f.sched, f.mu, 2, 1'000'000);
    CHECK(d.numerator == 982);
}

TEST_CASE("periodic component averages decay") {
    auto& f = fix();
    // mu(k^2) = 0, so the m=0 component average vanishes identically
    auto c0 = periodic_weight_average(f.sched, f.sieve, f.mu, 0, 3, 1'000'000);
    CHECK(c0.numerator == 0);

    auto c1 = periodic_weight_average(f.sched, f.sieve, f.mu, 1, 3, 1'000'000);
    CHECK(std::abs(c1.value) < 0.01);  // identically 0 under the step-1 convention
    CHECK(c1.numerator == 0);

    auto c2 = periodic_weight_average(f.sched, f.sieve, f.mu, 2, 3, 1'000'000);
    CHECK(std::abs(c2.value) < 0.01);
}

TEST_CASE("liouville rebuild keeps the square average away from zero") {
    auto& f = fix();
    WeightFunction lam = WeightFunction::liouville(4096);
    auto s1 = weighted_square_average(f.sched, lam, 4096);
    CHECK(std::abs(s1.value()) > 0.3);
    CHECK(s1.numerator == 3526);  // frozen by an earlier run

    // lambda never vanishes: off the discrepancy set every term is +1
    auto d3 = discrepancy_ratio(f.sched, lam, 3);
    CHECK(s1.numerator >= SeqIndex(4096) - 2 * SeqIndex(d3.count));
    CHECK(s1.numerator <= SeqIndex(4096));
}

TEST_CASE("unit weight base gives density-one averages") {
    auto& f = fix();
    WeightFunction one = WeightFunction::unit();
    auto s1 = weighted_square_average(f.sched, one, 100);
    CHECK(s1.numerator <= 100);
    // zeros only where stage windows strike (n in 8Z gives 32 | n^2, plus n=64)
    CHECK(s1.value() > 0.8);
}

TEST_CASE("custom real weights go through the compensated path") {
    auto& f = fix();
    WeightFunction w = WeightFunction::custom(
        "cosine", [](std::uint64_t n) { return std::cos(double(n)); }, 1.0);
    CHECK_THROWS_AS(weighted_square_average(f.sched, w, 10), domain_error);
    auto avg = weighted_square_average_real(f.sched, f.sieve, w, 1000);
    CHECK(std::abs(avg.value) <= 1.0);
    CHECK(avg.error_bound < 1e-10);

    // integer presets agree between the exact and compensated paths
    auto exact = weighted_square_average(f.sched, f.mu, 500);
    auto comp = weighted_square_average_real(f.sched, f.sieve, WeightFunction::mobius(f.sieve), 500);
    CHECK(std::abs(exact.value() - comp.value) < 1e-12);
}

TEST_CASE("reductions are deterministic across parallelism degrees") {
    auto& f = fix();
    auto rep1 = compute_average_report(f.sched, f.sieve, f.mu, 4096, 1);
    auto rep8 = compute_average_report(f.sched, f.sieve, f.mu, 4096, 8);
    CHECK(average_csv_row(rep1) == average_csv_row(rep8));

    auto d1 = discrepancy_ratio(f.sched, f.mu, 3, 1);
    auto d8 = discrepancy_ratio(f.sched, f.mu, 3, 8);
    CHECK(discrepancy_csv_row(d1) == discrepancy_csv_row(d8));

    auto s1 = stage_distance(f.sched, f.mu, 2, 200000, 1);
    auto s8 = stage_distance(f.sched, f.mu, 2, 200000, 8);
    CHECK(distance_csv_row(s1) == distance_csv_row(s8));
}

TEST_CASE("chunked_reduce combines in chunk order and propagates errors") {
    auto sum = chunked_reduce<SeqIndex>(
        1, 1000, 4, 0, [](SeqIndex a, SeqIndex b) { return (a + b) * (b - a + 1) / 2; },
        [](SeqIndex x, SeqIndex y) { return x + y; }, 64);
    CHECK(sum == 500500);

    CHECK_THROWS_AS(chunked_reduce<int>(
                        1, 1000, 4, 0,
                        [](SeqIndex a, SeqIndex) -> int {
                            if (a > 500) throw range_error("boom");
                            return 0;
                        },
                        [](int x, int y) { return x + y; }, 64),
                    range_error);
}

TEST_CASE("csv rows render exact numerators") {
    auto& f = fix();
    auto rep = compute_average_report(f.sched, f.sieve, f.mu, 4096);
    CHECK(average_csv_header() == "N,S1_num,S1,S2_num,S2,baseline");
    CHECK(average_csv_row(rep) == "4096,2460,0.6005859375,1,0.000244140625,0.608154296875");
}
