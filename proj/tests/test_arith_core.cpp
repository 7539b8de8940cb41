#include "doctest.h"

#include <cmath>
#include <random>

#include "divcorr/arith_core.hpp"

using namespace divcorr;

namespace {

const FactorTables& tables_1e6() {
    static FactorTables t = FactorTables::build(1000000);
    return t;
}

// independent truncated-divisor oracle: trial division, exact power threshold
std::uint64_t truncated_count_oracle(std::uint64_t n, std::uint64_t N, std::uint64_t g) {
    std::uint64_t c = 0;
    for (std::uint64_t d = 1; d <= n; ++d) {
        if (n % d) continue;
        unsigned __int128 pw = 1;
        bool ok = true;
        for (std::uint64_t k = 0; k < g && ok; ++k) {
            pw *= d;
            if (pw > N) ok = false;
        }
        if (ok) ++c;
    }
    return c;
}

} // namespace

TEST_CASE("exact power comparisons") {
    CHECK(pow_at_least(2, 10, 1024));
    CHECK(!pow_at_least(2, 10, 1025));
    CHECK(pow_at_most(12, 4, 20736));
    CHECK(!pow_at_most(13, 4, 20736));
    CHECK(pow_at_least(2, 1ull << 40, 1000)); // early exit on huge exponents
}

TEST_CASE("normalised divisor function") {
    const auto& t = tables_1e6();
    CHECK(tau_tilde(1, 20, t) == doctest::Approx(1.0 / std::log(20.0)).epsilon(1e-15));
    CHECK(tau_tilde(12, 100, t) == doctest::Approx(6.0 / std::log(100.0)).epsilon(1e-15));
    CHECK_THROWS_AS(tau_tilde(0, 100, t), RangeError);
    CHECK_THROWS_AS(tau_tilde(101, 100, t), RangeError);
}

TEST_CASE("mean of tau~ over [1, 10^6] is close to 1") {
    const auto& t = tables_1e6();
    long double sum = 0;
    for (std::uint64_t n = 1; n <= 1000000; ++n) sum += t.tau(n);
    long double mean = sum / (1000000.0L * std::log(1000000.0L));
    CHECK(std::fabs(static_cast<double>(mean) - 1.0) < 0.10);
}

TEST_CASE("truncated divisor function") {
    const auto& t = tables_1e6();
    // prime with p^g > N counts only d = 1
    CHECK(truncated_divisor_count(101, 10000, 4, t) == 1);
    CHECK(tau_gamma_tilde(101, 10000, 4, t) ==
          doctest::Approx(4.0 / std::log(10000.0)).epsilon(1e-15));
    // n = 12, N = 20736 = 12^4: all six divisors pass d^4 <= N
    CHECK(truncated_divisor_count(12, 20736, 4, t) == 6);
    // 13^4 = 28561 > 20736, so 13 stays out at the same N
    CHECK(truncated_divisor_count(13, 20736, 4, t) == 1);
}

TEST_CASE("truncated counts match the divisor-scan oracle") {
    const auto& t = tables_1e6();
    std::mt19937_64 rng(777);
    for (int it = 0; it < 300; ++it) {
        std::uint64_t n = 200001 + rng() % 30000;
        std::uint64_t got = truncated_divisor_count(n, 1000000, 4, t);
        REQUIRE(got == truncated_count_oracle(n, 1000000, 4));
    }
}

TEST_CASE("truncated count never exceeds tau") {
    const auto& t = tables_1e6();
    std::mt19937_64 rng(778);
    for (int it = 0; it < 2000; ++it) {
        std::uint64_t n = 1 + rng() % 1000000;
        REQUIRE(truncated_divisor_count(n, 1000000, 3, t) <= t.tau(n));
    }
}

TEST_CASE("rough set membership") {
    const auto& t = tables_1e6();
    CHECK(!is_rough_S1(6, 1000, 2.0, t));                 // squarefree
    CHECK(is_rough_S1(256, 1000000, 2.0, t));             // 2^8 = 256 > log^2(1e6) ~ 190.9
    CHECK(!is_rough_S1(4, 1000000, 2.0, t));              // 4 < 190.9
    CHECK(is_rough_S1(256 * 3, 1000000, 2.0, t));
    CHECK(!is_rough_S1(1, 1000000, 2.0, t));
}

TEST_CASE("rough density decreases along the N grid") {
    const auto& t = tables_1e6();
    double prev = 1.0;
    for (std::uint64_t N : {10000ull, 100000ull, 1000000ull}) {
        std::uint64_t c = 0;
        for (std::uint64_t n = 1; n <= N; ++n)
            if (is_rough_S1(n, N, 2.0, t)) ++c;
        double density = static_cast<double>(c) / static_cast<double>(N);
        CHECK(density < prev);
        prev = density;
    }
}

TEST_CASE("smooth set membership") {
    const auto& t = tables_1e6();
    CHECK(!is_smooth_S2(1, 10000, 4, t));
    // at N = 10^4 the small-prime cutoff is ~2.32 and the threshold ~2.82,
    // so membership collapses to 4 | n
    CHECK(is_smooth_S2(4, 10000, 4, t));
    CHECK(is_smooth_S2(12, 10000, 4, t));
    CHECK(!is_smooth_S2(2, 10000, 4, t));
    CHECK(!is_smooth_S2(15, 10000, 4, t));
}

TEST_CASE("smooth set agrees with a direct-definition oracle up to 10^5") {
    const auto& t = tables_1e6();
    const std::uint64_t N = 100000;
    long double ln = std::log(static_cast<long double>(N));
    long double ll = std::log(ln);
    long double cutoff = std::pow(static_cast<long double>(N), 1.0L / (ll * ll * ll));
    long double threshold = std::pow(static_cast<long double>(N), 0.25L / ll);
    for (std::uint64_t n = 1; n <= N; ++n) {
        // oracle: trial division, long-double thresholds
        std::uint64_t m = n, smooth = 1;
        for (std::uint64_t p = 2; p * p <= m; ++p)
            while (m % p == 0) {
                if (static_cast<long double>(p) <= cutoff) smooth *= p;
                m /= p;
            }
        if (m > 1 && static_cast<long double>(m) <= cutoff) smooth *= m;
        bool expect = static_cast<long double>(smooth) >= threshold;
        REQUIRE(is_smooth_S2(n, N, 4, t) == expect);
    }
}

TEST_CASE("superdyadic interval counting") {
    const auto& t = tables_1e6();
    // I_1 = [225^{1/4}, 225^{1/2}): 3^4 = 81 < 225 keeps 3 out, 5^4 = 625 >= 225 lets 5 in
    CHECK(omega_in_interval(15, 1, 225, t) == 1);
    for (std::uint32_t i = 0; i <= 5; ++i) CHECK(omega_in_interval(1, i, 10000, t) == 0);
}

TEST_CASE("superdyadic intervals partition the primes they cover") {
    const auto& t = tables_1e6();
    const std::uint64_t N = 10000;
    std::uint32_t imax = max_superdyadic_index(N);
    for (std::uint64_t n = 2; n <= 3000; ++n) {
        std::uint32_t total = 0;
        for (std::uint32_t i = 0; i <= imax; ++i) total += omega_in_interval(n, i, N, t);
        // covered primes: N^{1/2^{imax+1}} <= p <= N
        std::uint32_t covered = 0;
        for (const auto& [p, a] : t.factorize(n))
            if (pow_at_least(p, 1ull << (imax + 1), N) && p <= N) ++covered;
        REQUIRE(total == covered);
        // and no prime lands in two intervals
        for (const auto& [p, a] : t.factorize(n)) {
            int hits = 0;
            for (std::uint32_t i = 0; i <= imax; ++i)
                if (in_superdyadic(p, i, N)) ++hits;
            REQUIRE(hits <= 1);
        }
    }
}

TEST_CASE("shared endpoints go to the wider interval") {
    // N = 256: I_1 = [4, 16], I_2 = [2, 4]; p = 2: 2^4 = 16 < 256 so 2 is below I_1.
    // p = 2 sits exactly on N^{1/8} = 2 boundary of I_2: 2^8 = 256 >= N, 2^4 < N -> I_2.
    CHECK(in_superdyadic(2, 2, 256));
    CHECK(!in_superdyadic(2, 3, 256)); // 2^8 = 256 == N: tie goes to I_2, not I_3
    CHECK(in_superdyadic(4, 1, 256));  // 4^4 = 256 >= N and 4^2 = 16 < N
    CHECK(in_superdyadic(16, 0, 256)); // 16^2 = 256 >= N and 16 <= N
    CHECK(!in_superdyadic(16, 1, 256)); // 16^2 == N: tie goes to I_0
}

TEST_CASE("exact m0 ceiling") {
    CHECK(exact_m0(1, 8, 4).value() == 1);   // 0.25*8*(1+3-3)/100 = 0.02
    CHECK(exact_m0(50, 8, 4).value() == 1);  // 2*50/100 = 1 exactly
    CHECK(exact_m0(51, 8, 4).value() == 2);  // 2*51/100 = 1.02
    CHECK(exact_m0(100, 16, 2).value() == 8); // 8*(100+3-4)/100 = 7.92
    CHECK(!exact_m0(0, 16, 4).has_value());   // i + 3 - log2 s = -1
    CHECK(!exact_m0(1, 16, 4).has_value());   // i + 3 - log2 s = 0: still empty
    CHECK(exact_m0(2, 16, 4).value() == 1);
}

TEST_CASE("classifier: hypothesis is never satisfiable at desk scale") {
    const auto& t = tables_1e6();
    MajorantParams params;
    params.gamma_inv = 4;
    std::uint64_t applicable = 0;
    for (std::uint64_t n = 1; n <= 10000; ++n)
        for (std::uint64_t s : {9ull, 10ull, 12ull}) {
            Alternative alt = classify_excess_divisors(n, 10000, params, s, t);
            if (alt.kind != AlternativeKind::NotApplicable) {
                ++applicable;
                REQUIRE(alt.kind != AlternativeKind::None);
            }
        }
    // tau(n) >= 2^s g C(n) needs tau >= 2048: impossible below 2*10^9
    CHECK(applicable == 0);
}

TEST_CASE("classifier branches") {
    const auto& t = tables_1e6();
    MajorantParams params;
    params.gamma_inv = 4;
    params.c1 = 2.0;
    // rough: 2^10 = 1024 > log^2(10^4) ~ 84.9
    Alternative a = classify_alternatives(1024 * 3, 10000, params, 9, t);
    CHECK(a.kind == AlternativeKind::Rough);
    // smooth: 4 | n, n not rough
    Alternative b = classify_alternatives(4 * 3, 10000, params, 9, t);
    CHECK(b.kind == AlternativeKind::Smooth);
    // cluster: three primes in I_1 = [10, 100) at N = 10^4
    Alternative c = classify_alternatives(11 * 13 * 17, 10000, params, 8, t);
    CHECK(c.kind == AlternativeKind::Cluster);
    CHECK(c.interval == 1);
    CHECK(c.count == 3);
}

TEST_CASE("cluster ranges") {
    MajorantParams params;
    params.gamma_inv = 4;
    auto [slo, shi] = params.cluster_s_bounds(100000);
    CHECK(slo == 9);
    CHECK(shi == 14); // floor((log log 1e5)^3) = floor(14.59)
    auto [ilo, ihi] = params.cluster_i_bounds(100000, 9);
    CHECK(ilo == 2); // smallest i with 2^{i+2} >= 9
    CHECK(ihi == 5); // floor(6 log log log 1e5) = floor(5.36)

    params.s_range = ManualRange{8, 16};
    auto [mlo, mhi] = params.cluster_s_bounds(100000);
    CHECK(mlo == 9); // cluster levels stay strictly above 2/gamma
    CHECK(mhi == 16);
}

TEST_CASE("degenerate regimes are flagged") {
    MajorantParams params;
    params.gamma_inv = 4;
    CHECK(degenerate_regime(100, params));    // (log log N)^3 < 9
    CHECK(!degenerate_regime(100000, params));
    params.s_range = ManualRange{8, 16};
    params.i_range = ManualRange{1, 4};
    CHECK(!degenerate_regime(100000, params));
}
