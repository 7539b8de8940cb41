#include "doctest.h"

#include <cmath>
#include <random>

#include "divcorr/gowers.hpp"
#include "divcorr/errors.hpp"
#include "divcorr/factor_tables.hpp"
#include "divcorr/wtrick.hpp"

using namespace divcorr;

namespace {

// quadruple/octuple loop straight off the definition, test oracle only
double u2_naive(const std::vector<double>& f) {
    std::size_t N = f.size() - 1;
    long double S = 0;
    for (std::size_t x = 1; x <= N; ++x)
        for (std::size_t h1 = 1; h1 <= N; ++h1)
            for (std::size_t h2 = 1; h2 <= N; ++h2) {
                if (x + h1 + h2 > N) continue;
                S += static_cast<long double>(f[x]) * f[x + h1] * f[x + h2] * f[x + h1 + h2];
            }
    long double v = S / (static_cast<long double>(N) * N * N);
    if (v < 0) v = 0;
    return static_cast<double>(std::pow(static_cast<double>(v), 0.25));
}

double u3_naive(const std::vector<double>& f) {
    std::size_t N = f.size() - 1;
    long double S = 0;
    for (std::size_t x = 1; x <= N; ++x)
        for (std::size_t h1 = 1; h1 <= N; ++h1) {
            if (x + h1 > N) break;
            for (std::size_t h2 = 1; h2 <= N; ++h2) {
                if (x + h1 + h2 > N) break;
                for (std::size_t h3 = 1; h3 <= N; ++h3) {
                    if (x + h1 + h2 + h3 > N) break;
                    S += static_cast<long double>(f[x]) * f[x + h1] * f[x + h2] * f[x + h3] *
                         f[x + h1 + h2] * f[x + h1 + h3] * f[x + h2 + h3] * f[x + h1 + h2 + h3];
                }
            }
        }
    long double v = S / (static_cast<long double>(N) * N * N * N);
    if (v < 0) v = 0;
    return static_cast<double>(std::pow(static_cast<double>(v), 0.125));
}

std::vector<double> tau_prime_centered(std::uint64_t N, double w) {
    FactorTables t = FactorTables::build(N);
    WContext ctx = make_context(N, 2.0, ManualW{w});
    std::vector<double> f(N + 1, 0.0);
    double mean = 0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        f[n] = tau_tilde_prime(n, ctx, N, t);
        mean += f[n];
    }
    mean /= static_cast<double>(N);
    for (std::uint64_t n = 1; n <= N; ++n) f[n] -= mean;
    return f;
}

} // namespace

TEST_CASE("zero function has zero norm") {
    std::vector<double> f(101, 0.0);
    CHECK(gowers_norm(f, 2) == 0.0);
    CHECK(gowers_norm(f, 3) == 0.0);
}

TEST_CASE("norm is invariant under negation") {
    std::mt19937_64 rng(11);
    std::vector<double> f(151, 0.0), g(151, 0.0);
    for (std::size_t n = 1; n <= 150; ++n) {
        f[n] = static_cast<double>(rng() % 1000) / 500.0 - 1.0;
        g[n] = -f[n];
    }
    CHECK(gowers_u2_fast(f) == gowers_u2_fast(g));
    CHECK(gowers_u3(f) == gowers_u3(g));
}

TEST_CASE("autocorrelation by FFT matches the direct sum") {
    std::mt19937_64 rng(12);
    std::vector<double> f(201, 0.0);
    for (std::size_t n = 1; n <= 200; ++n) f[n] = static_cast<double>(rng() % 997) / 997.0;
    std::vector<double> c = autocorrelation(f);
    for (std::size_t k = 0; k < c.size(); k += 17) {
        long double direct = 0;
        for (std::size_t x = 0; x + k < f.size(); ++x) direct += (long double)f[x] * f[x + k];
        REQUIRE(c[k] == doctest::Approx(static_cast<double>(direct)).epsilon(1e-11));
    }
}

TEST_CASE("fast U^2 path matches the direct definition to 1e-10 at N = 300") {
    std::vector<double> f = tau_prime_centered(300, 5.0);
    double fast = gowers_u2_fast(f);
    double direct = gowers_u2_direct(f);
    CHECK(std::fabs(fast - direct) < 1e-10);
    // and the cubic loop agrees with the naive quadruple loop on a short prefix
    std::vector<double> g(f.begin(), f.begin() + 81);
    CHECK(gowers_u2_direct(g) == doctest::Approx(u2_naive(g)).epsilon(1e-12));
    std::mt19937_64 rng(13);
    for (int it = 0; it < 3; ++it) {
        std::vector<double> r(121, 0.0);
        for (std::size_t n = 1; n <= 120; ++n)
            r[n] = static_cast<double>(rng() % 1999) / 999.5 - 1.0;
        REQUIRE(std::fabs(gowers_u2_fast(r) - gowers_u2_direct(r)) < 1e-10);
    }
}

TEST_CASE("U^3 agrees with the naive octuple loop") {
    std::mt19937_64 rng(14);
    std::vector<double> f(41, 0.0);
    for (std::size_t n = 1; n <= 40; ++n) f[n] = static_cast<double>(rng() % 1999) / 999.5 - 1.0;
    CHECK(gowers_u3(f) == doctest::Approx(u3_naive(f)).epsilon(1e-9));
    std::vector<double> g = tau_prime_centered(50, 3.0);
    CHECK(gowers_u3(g) == doctest::Approx(u3_naive(g)).epsilon(1e-9));
}

TEST_CASE("size caps are enforced") {
    std::vector<double> f(2102, 0.0);
    CHECK_THROWS_AS(gowers_u2_direct(f), CapacityError);
    CHECK_THROWS_AS(gowers_u3(f), CapacityError);
    CHECK_THROWS_AS(gowers_norm(f, 4), ConfigError);
}
