#include "doctest.h"

#include <random>
#include <set>

#include "divcorr/affine.hpp"
#include "divcorr/local_densities.hpp"

using namespace divcorr;

namespace {

AffineSystem sys(std::vector<AffineForm> forms) { return AffineSystem::create(std::move(forms)); }

ExactRational rat(long n, long d = 1) { return make_rational(n, d); }

} // namespace

TEST_CASE("form evaluation") {
    AffineForm f1{{1, 0}, 0};
    CHECK(f1.evaluate({5, 7}) == 5);
    AffineForm f2{{1, 1}, 0};
    CHECK(f2.evaluate({5, 7}) == 12);
    AffineForm f3{{2, -3}, 4};
    CHECK(f3.evaluate({1, 1}) == 3);
    CHECK_THROWS_AS(f3.evaluate({1}), RangeError);
}

TEST_CASE("system validation") {
    CHECK_THROWS_AS(sys({{{0, 0}, 5}}), ConfigError);                // constant form
    CHECK_THROWS_AS(sys({{{1, 0}, 0}, {{2, 0}, 1}}), ConfigError);   // variable 2 unused
    CHECK_THROWS_AS(sys({{{1}, 0}, {{2}, 0}}), ConfigError);         // n and 2n proportional
    CHECK_THROWS_AS(sys({{{2, 4}, 6}, {{1, 2}, 3}}), ConfigError);   // affine rational multiples
    CHECK_NOTHROW(sys({{{1}, 0}, {{1}, 1}}));                        // n, n+1 is fine
    CHECK_NOTHROW(sys({{{1}, 0}, {{2}, 1}}));                        // n, 2n+1 is fine
}

TEST_CASE("finite complexity") {
    CHECK(sys({{{1, 0}, 0}, {{0, 1}, 0}, {{1, 1}, 0}}).finite_complexity());
    CHECK(!sys({{{1}, 1}, {{1}, 2}}).finite_complexity()); // single free parameter
    // pair (1,0) and (3,0) is dependent
    CHECK(!sys({{{1, 0}, 1}, {{2, 1}, 0}, {{3, 0}, 0}}).finite_complexity());
}

TEST_CASE("finite complexity is stable under order and scaling") {
    auto a = sys({{{1, 0}, 0}, {{0, 1}, 0}, {{1, 1}, 0}});
    auto b = sys({{{1, 1}, 0}, {{0, 1}, 0}, {{1, 0}, 0}});
    CHECK(a.finite_complexity() == b.finite_complexity());
    // scale one form by 3 and another by -2 (cleared rationals)
    auto c = sys({{{3, 0}, 0}, {{0, -2}, 0}, {{1, 1}, 0}});
    CHECK(c.finite_complexity() == a.finite_complexity());
    auto d = sys({{{1}, 1}, {{-3}, -6}});
    CHECK(!d.finite_complexity());
}

TEST_CASE("exceptional primes") {
    auto s1 = sys({{{1, 1}, 0}, {{1, -1}, 0}});
    CHECK(exceptional_primes(s1, 50) == std::vector<std::uint64_t>{2});
    auto s2 = sys({{{1, 0}, 0}, {{0, 1}, 0}});
    CHECK(exceptional_primes(s2, 50).empty());
    auto s3 = sys({{{3, 0}, 0}, {{0, 1}, 0}});
    CHECK(exceptional_primes(s3, 50) == std::vector<std::uint64_t>{3});
    // d = 1: every prime is exceptional for a pair of forms
    auto s4 = sys({{{1}, 0}, {{1}, 1}});
    CHECK(exceptional_primes(s4, 13) == std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13});
    CHECK(is_exceptional_prime(s4, 97));
}

TEST_CASE("exceptional primes divide a nonzero minor") {
    std::mt19937_64 rng(4242);
    int tested = 0;
    while (tested < 60) {
        std::size_t d = 2 + rng() % 2, t = 2 + rng() % 2;
        std::vector<AffineForm> forms;
        for (std::size_t i = 0; i < t; ++i) {
            AffineForm f;
            for (std::size_t k = 0; k < d; ++k)
                f.coeffs.push_back(static_cast<std::int64_t>(rng() % 19) - 9);
            f.constant = static_cast<std::int64_t>(rng() % 9) - 4;
            forms.push_back(std::move(f));
        }
        AffineSystem s = [&]() -> AffineSystem {
            try {
                return AffineSystem::create(forms);
            } catch (const ConfigError&) {
                return AffineSystem::create({{{1, 0}, 0}, {{0, 1}, 0}});
            }
        }();
        if (!s.finite_complexity()) continue;
        ++tested;
        std::uint64_t bound = max_pair_minor(s);
        for (std::uint64_t p : exceptional_primes(s, 200)) REQUIRE(p <= bound);
    }
}

TEST_CASE("box lattice enumeration") {
    ConvexBody b = ConvexBody::box({1, 1}, {3, 2});
    std::vector<std::vector<std::int64_t>> pts;
    lattice_points(b, [&](const std::vector<std::int64_t>& p) { pts.push_back(p); });
    REQUIRE(pts.size() == 6);
    CHECK(pts.front() == std::vector<std::int64_t>{1, 1});
    CHECK(pts.back() == std::vector<std::int64_t>{3, 2});
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1] < pts[i]); // lex order
    CHECK(b.bounding_count() == 6);
}

TEST_CASE("polytope lattice enumeration") {
    // x1 + x2 <= 2, x1 >= 1, x2 >= 1
    Polytope p;
    p.rows = {{rat(1), rat(1)}, {rat(-1), rat(0)}, {rat(0), rat(-1)}};
    p.rhs = {rat(2), rat(-1), rat(-1)};
    ConvexBody b = ConvexBody::polytope(p, 100);
    std::vector<std::vector<std::int64_t>> pts;
    lattice_points(b, [&](const std::vector<std::int64_t>& q) { pts.push_back(q); });
    REQUIRE(pts.size() == 1);
    CHECK(pts[0] == std::vector<std::int64_t>{1, 1});
}

TEST_CASE("polytope counts match bounding-box rejection") {
    std::mt19937_64 rng(999);
    for (int it = 0; it < 40; ++it) {
        // random half-space cuts of a small box
        Polytope p;
        std::int64_t M = 6 + static_cast<std::int64_t>(rng() % 10);
        p.rows = {{rat(-1), rat(0)}, {rat(0), rat(-1)}};
        p.rhs = {rat(0), rat(0)};
        for (int r = 0; r < 2; ++r) {
            long a = static_cast<long>(rng() % 5) - 2, b2 = static_cast<long>(rng() % 5) - 2;
            if (a == 0 && b2 == 0) a = 1;
            p.rows.push_back({rat(a), rat(b2)});
            p.rhs.push_back(rat(static_cast<long>(rng() % (2 * M)) + 1));
        }
        p.rows.push_back({rat(1), rat(0)});
        p.rhs.push_back(rat(M));
        p.rows.push_back({rat(0), rat(1)});
        p.rhs.push_back(rat(M));
        ConvexBody body = ConvexBody::polytope(p, 1000);
        // oracle: scan the box [0, M]^2 with rational checks
        std::uint64_t expect = 0;
        for (std::int64_t x = 0; x <= M; ++x)
            for (std::int64_t y = 0; y <= M; ++y) {
                bool ok = true;
                for (std::size_t r = 0; r < p.rows.size() && ok; ++r) {
                    ExactRational acc = p.rows[r][0] * rat(x) + p.rows[r][1] * rat(y);
                    ok = acc <= p.rhs[r];
                }
                if (ok) ++expect;
            }
        REQUIRE(body.lattice_count() == expect);
    }
}

TEST_CASE("range checking") {
    auto s = sys({{{1, 0}, 0}, {{0, 1}, 0}, {{1, 1}, 0}});
    std::int64_t M = 50;
    ConvexBody box = ConvexBody::box({1, 1}, {M, M});
    CHECK(check_range(s, box, 2 * M));
    CHECK(!check_range(s, box, M));
    ConvexBody empty = ConvexBody::box({5, 5}, {4, 4});
    CHECK(empty.empty());
    CHECK(check_range(s, empty, 1));
}

TEST_CASE("volumes") {
    CHECK(ConvexBody::box({0, 0}, {10, 5}).volume().value == doctest::Approx(50.0));
    CHECK(ConvexBody::box({0}, {1}).volume().value == doctest::Approx(1.0));
    // simplex x1, x2 >= 0, x1 + x2 <= M, lattice proxy near M^2/2
    Polytope p;
    p.rows = {{rat(-1), rat(0)}, {rat(0), rat(-1)}, {rat(1), rat(1)}};
    p.rhs = {rat(0), rat(0), rat(1000)};
    VolumeEstimate v = ConvexBody::polytope(p, 5000).volume();
    CHECK(!v.exact);
    CHECK(v.value == doctest::Approx(500000.0).epsilon(0.01));
    CHECK(v.uncertainty > 0);
}

TEST_CASE("volume packing: counts track vol times alpha") {
    std::mt19937_64 rng(31337);
    double worst = 0;
    for (int it = 0; it < 30; ++it) {
        std::int64_t B = 15 + static_cast<std::int64_t>(rng() % 25);
        std::int64_t a = 1 + static_cast<std::int64_t>(rng() % 4);
        std::int64_t b = 1 + static_cast<std::int64_t>(rng() % 4);
        std::int64_t c = static_cast<std::int64_t>(rng() % 7);
        AffineSystem s = sys({{{a, b}, c}});
        std::uint64_t dmod = 2 + rng() % 5;
        ConvexBody box = ConvexBody::box({0, 0}, {B, B});
        std::uint64_t count = 0;
        lattice_points(box, [&](const std::vector<std::int64_t>& pt) {
            std::int64_t v = s.form(0).evaluate(pt);
            std::int64_t r = v % static_cast<std::int64_t>(dmod);
            if (r < 0) r += static_cast<std::int64_t>(dmod);
            if (r == 0) ++count;
        });
        double vol = static_cast<double>(B) * B;
        double al = to_double(alpha(s, {dmod}));
        double err = std::fabs(static_cast<double>(count) - vol * al);
        double scale = static_cast<double>(B) * static_cast<double>(dmod);
        worst = std::max(worst, err / scale);
        REQUIRE(err <= 8.0 * scale);
    }
    MESSAGE("volume packing worst err / (B d): ", worst);
}
