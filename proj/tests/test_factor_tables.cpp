#include "doctest.h"

#include <numeric>
#include <random>

#include "divcorr/factor_tables.hpp"

using namespace divcorr;

namespace {

std::uint64_t tau_by_trial(std::uint64_t n) {
    std::uint64_t c = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d)
        if (n % d == 0) c += (d * d == n) ? 1 : 2;
    return c;
}

} // namespace

TEST_CASE("smallest prime factors at N = 12") {
    FactorTables t = FactorTables::build(12);
    CHECK(t.spf(12) == 2);
    CHECK(t.spf(9) == 3);
    CHECK(t.spf(7) == 7);
    CHECK(t.tau(12) == 6); // 1,2,3,4,6,12
    CHECK(t.tau(1) == 1);
}

TEST_CASE("divisor counts match trial enumeration up to 10^4") {
    FactorTables t = FactorTables::build(10000);
    for (std::uint64_t n = 1; n <= 10000; ++n) REQUIRE(t.tau(n) == tau_by_trial(n));
}

TEST_CASE("large prime has two divisors") {
    FactorTables t = FactorTables::build(1000000);
    CHECK(t.tau(999983) == 2);
    CHECK(t.tau(999983) == tau_by_trial(999983));
    CHECK(t.is_prime(999983));
}

TEST_CASE("factorize") {
    FactorTables t = FactorTables::build(2000);
    CHECK(t.factorize(1).empty());
    Factorization f = t.factorize(360);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == PrimePower{2, 3});
    CHECK(f[1] == PrimePower{3, 2});
    CHECK(f[2] == PrimePower{5, 1});
    Factorization g = t.factorize(1024);
    REQUIRE(g.size() == 1);
    CHECK(g[0] == PrimePower{2, 10});
    CHECK_THROWS_AS(t.factorize(0), RangeError);
    CHECK_THROWS_AS(t.factorize(2001), RangeError);
}

TEST_CASE("tau is multiplicative on coprime pairs") {
    FactorTables t = FactorTables::build(100000);
    std::mt19937_64 rng(12345);
    for (int it = 0; it < 500; ++it) {
        std::uint64_t a = 1 + rng() % 300, b = 1 + rng() % 300;
        if (std::gcd(a, b) != 1) continue;
        REQUIRE(t.tau(a * b) == t.tau(a) * t.tau(b));
    }
}

TEST_CASE("memory budget is enforced") {
    CHECK_THROWS_AS(FactorTables::build(1000000, 1024), CapacityError);
    CHECK_THROWS_AS(FactorTables::build(1), ConfigError);
}

TEST_CASE("factorization reconstructs n with increasing primes") {
    FactorTables t = FactorTables::build(5000);
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        std::uint64_t prod = 1;
        std::uint64_t last_p = 0;
        for (const auto& [p, a] : t.factorize(n)) {
            CHECK(p > last_p);
            last_p = p;
            for (std::uint32_t k = 0; k < a; ++k) prod *= p;
        }
        REQUIRE(prod == n);
    }
}
