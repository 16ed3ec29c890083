#include <toepsq/mobius.hpp>
#include <toepsq/residues.hpp>
#include <toepsq/sequences.hpp>

#include <numeric>
#include <random>

#include "test_helpers.hpp"

using namespace toepsq;

namespace {

// Independent mu by trial division, for spot checks against the sieve.
int mu_by_factoring(std::uint64_t n) {
    int k = 0;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            ++k;
        }
    }
    if (n > 1) ++k;
    return k % 2 == 0 ? 1 : -1;
}

}  // namespace

TEST_CASE("mobius sieve basic values") {
    auto sieve = MobiusSieve::build(100);
    CHECK(sieve.at(1) == 1);
    CHECK(sieve.at(4) == 0);
    CHECK(sieve.at(6) == 1);    // two distinct primes
    CHECK(sieve.at(12) == 0);   // 2^2 | 12
    CHECK(sieve.at(30) == -1);  // three distinct primes
    for (std::uint64_t p : {2, 3, 5, 7, 11, 97}) CHECK(sieve.at(p) == -1);
}

TEST_CASE("mobius sieve agrees with trial division") {
    auto sieve = MobiusSieve::build(5000);
    for (std::uint64_t n = 1; n <= 5000; ++n) CHECK(int(sieve.at(n)) == mu_by_factoring(n));
}

TEST_CASE("mobius multiplicativity on coprime pairs") {
    auto sieve = MobiusSieve::build(1 << 20);
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<std::uint64_t> dist(1, 1000);
    int checked = 0;
    while (checked < 500) {
        std::uint64_t a = dist(rng), b = dist(rng);
        if (std::gcd(a, b) != 1) continue;
        CHECK(int(sieve.at(a * b)) == int(sieve.at(a)) * int(sieve.at(b)));
        ++checked;
    }
}

TEST_CASE("mobius range and capacity errors") {
    auto sieve = MobiusSieve::build(10);
    CHECK_THROWS_AS(sieve.at(0), range_error);
    CHECK_THROWS_AS(sieve.at(11), range_error);
    CHECK_THROWS_AS(MobiusSieve::build(0), capacity_error);
}

TEST_CASE("mobius sieve rejects limits beyond the memory budget") {
    setenv("TOEPSQ_MEMORY_BUDGET", "1024", 1);
    CHECK_THROWS_AS(MobiusSieve::build(1 << 20), capacity_error);
    unsetenv("TOEPSQ_MEMORY_BUDGET");
    CHECK_NOTHROW(MobiusSieve::build(1 << 16));
}

TEST_CASE("squarefree density approaches 6/pi^2") {
    auto sieve = MobiusSieve::build(1'000'000);
    std::uint64_t squarefree = 0;
    for (std::uint64_t n = 1; n <= 1'000'000; ++n)
        if (sieve.at(n) != 0) ++squarefree;
    double density = double(squarefree) / 1e6;
    CHECK(std::abs(density - 6.0 / (M_PI * M_PI)) < 0.002);
}

TEST_CASE("exact_sqrt detects squares only") {
    CHECK(exact_sqrt(49).value() == 7);
    CHECK_FALSE(exact_sqrt(50).has_value());
    CHECK_FALSE(exact_sqrt(0).has_value());
    CHECK_FALSE(exact_sqrt(-4).has_value());
    CHECK(exact_sqrt(1).value() == 1);
}

TEST_CASE("exact_sqrt on wide values") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 2000; ++i) {
        USeqIndex k = (USeqIndex(rng()) << 30) ^ rng();
        k %= (USeqIndex(1) << 60);
        if (k < 2) k = 2;
        SeqIndex sq = SeqIndex(k * k);
        CHECK(exact_sqrt(sq).value() == k);
        CHECK_FALSE(exact_sqrt(sq - 1).has_value());
        CHECK_FALSE(exact_sqrt(sq + 1).has_value());
    }
}

TEST_CASE("isqrt is the exact floor root") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 5000; ++i) {
        USeqIndex x = (USeqIndex(rng()) << 64) | rng();
        x >>= (rng() % 120);
        USeqIndex r = isqrt(x);
        CHECK(r * r <= x);
        USeqIndex next = r + 1;
        // (r+1)^2 > x, guarding the top of the root range
        CHECK((next > USeqIndex(~std::uint64_t(0)) || next * next > x));
    }
    CHECK(isqrt(USeqIndex(0)) == 0);
    CHECK(isqrt(USeqIndex(1)) == 1);
    CHECK(isqrt(USeqIndex(3)) == 1);
    CHECK(isqrt(USeqIndex(4)) == 2);
}

TEST_CASE("residue_form decomposes 4^r(8s+1)") {
    auto f = residue_form(1, 3);
    REQUIRE(f.has_value());
    CHECK(f->r == 0);
    CHECK(f->s == 0);

    f = residue_form(4, 4);
    REQUIRE(f.has_value());
    CHECK(f->r == 1);
    CHECK(f->s == 0);

    CHECK_FALSE(residue_form(3, 4).has_value());
    CHECK_FALSE(residue_form(2, 4).has_value());
    CHECK_FALSE(residue_form(8, 4).has_value());
    CHECK_THROWS_AS(residue_form(0, 4), domain_error);
    CHECK_THROWS_AS(residue_form(17, 4), domain_error);
}

TEST_CASE("odd squares are 1 mod 8") {
    for (unsigned n = 3; n <= 12; ++n) {
        for (std::uint64_t k = 1; k <= (1ull << n); k += 2) {
            std::uint64_t q = (k * k) & ((1ull << n) - 1);
            auto f = residue_form(q, n);
            REQUIRE(f.has_value());
            CHECK(f->r == 0);
        }
    }
}

TEST_CASE("enumerate_class matches hand-checked classes") {
    auto b1 = enumerate_class(0, 0, 1);
    CHECK(b1.members == std::vector<std::uint64_t>{1});

    auto b3 = enumerate_class(0, 0, 3);
    CHECK(b3.members == std::vector<std::uint64_t>{1, 3, 5, 7});

    auto b14 = enumerate_class(1, 0, 4);
    CHECK(b14.members == std::vector<std::uint64_t>{2, 6, 10, 14});

    // membership really solves k^2 = q mod 2^n
    for (std::uint64_t k : b14.members) CHECK((k * k) % 16 == 4);
}

TEST_CASE("enumerate_class argument errors") {
    CHECK_THROWS_AS(enumerate_class(3, 0, 4), domain_error);    // 4^3 > 2^4
    CHECK_THROWS_AS(enumerate_class(0, 2, 4), domain_error);    // 17 > 16
    CHECK_THROWS_AS(enumerate_class(0, 0, 25), capacity_error); // above cap
    CHECK_NOTHROW(enumerate_class(0, 0, 25, 25));               // cap overridden
}

TEST_CASE("class_count_formula against enumeration") {
    CHECK(class_count_formula(1, 0, 4) == 4);   // 2 * #B(0,0,2) = 2*2
    CHECK(class_count_formula(0, 0, 3) == 4);
    CHECK(class_count_formula(2, 0, 6) == 8);   // 4 * #B(0,0,2)
    CHECK(enumerate_class(2, 0, 6).members.size() == 8);
    CHECK_THROWS_AS(class_count_formula(2, 0, 4), domain_error);  // n - 2r = 0
}

TEST_CASE("residue lemma verification") {
    auto small = verify_residue_lemma(3);
    CHECK(small.pass);

    auto full = verify_residue_lemma(12);
    CHECK(full.pass);
    CHECK(full.first_failure.empty());

    // coverage at n=4: 12 of the 16 k have a nonzero square residue
    REQUIRE(full.coverage_counts.size() >= 4);
    CHECK(full.coverage_counts[3] == 12);
}

TEST_CASE("classes partition the nonzero residues, memberwise") {
    // full cross-check at n=6: every k with k^2 mod 64 != 0 in exactly one class
    const unsigned n = 6;
    const std::uint64_t size = 1ull << n;
    std::vector<int> hits(size + 1, 0);
    for (unsigned r = 0; 2 * r + 1 <= n; ++r) {
        for (std::uint64_t s = 0;; ++s) {
            std::uint64_t q = (8 * s + 1) << (2 * r);
            if (q > size) break;
            auto cls = enumerate_class(r, s, n);
            for (std::uint64_t k : cls.members) ++hits[k];
        }
    }
    for (std::uint64_t k = 1; k <= size; ++k) {
        bool nonzero = (k * k) % size != 0;
        CHECK(hits[k] == (nonzero ? 1 : 0));
    }
}
