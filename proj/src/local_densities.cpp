#include "divcorr/local_densities.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace divcorr {

namespace {

// Solution count of B x == rhs over (Z/M)^d, M = p^A, by p-adic row/column
// reduction.  Row scaling by units and integer row/column eliminations keep
// the count invariant; a pivot of valuation v fixes its variable up to p^v
// choices.
BigInt count_congruence_solutions(std::vector<std::vector<BigInt>> B, std::vector<BigInt> rhs,
                                  const BigInt& p, std::uint32_t A) {
    BigInt M = pow_big(p, A);
    std::size_t rows = B.size();
    std::size_t cols = rows ? B[0].size() : 0;
    auto norm = [&](const BigInt& x) -> BigInt {
        BigInt r = x % M;
        if (r < 0) r += M;
        return r;
    };
    auto vmod = [&](const BigInt& x) -> std::uint32_t {
        BigInt r = norm(x);
        if (r == 0) return A;
        return std::min<std::uint32_t>(A, valuation(r, p));
    };
    for (auto& row : B)
        for (auto& e : row) e = norm(e);
    for (auto& e : rhs) e = norm(e);

    BigInt count = 1;
    std::size_t r0 = 0, c0 = 0;
    while (r0 < rows && c0 < cols) {
        // pivot with minimal valuation
        std::uint32_t best = A;
        std::size_t pr = r0, pc = c0;
        for (std::size_t r = r0; r < rows; ++r)
            for (std::size_t c = c0; c < cols; ++c) {
                std::uint32_t v = vmod(B[r][c]);
                if (v < best) {
                    best = v;
                    pr = r;
                    pc = c;
                }
            }
        if (best >= A) break; // remaining block is 0 mod M
        std::swap(B[r0], B[pr]);
        std::swap(rhs[r0], rhs[pr]);
        for (std::size_t r = 0; r < rows; ++r) std::swap(B[r][c0], B[r][pc]);

        // scale row by a unit so the pivot becomes exactly p^best
        BigInt pv = pow_big(p, best);
        BigInt unit = norm(B[r0][c0] / pv);
        BigInt unit_inv;
        if (mpz_invert(unit_inv.get_mpz_t(), unit.get_mpz_t(), M.get_mpz_t()) == 0)
            throw DegeneracyError("internal: pivot unit not invertible");
        for (std::size_t c = c0; c < cols; ++c) B[r0][c] = norm(B[r0][c] * unit_inv);
        rhs[r0] = norm(rhs[r0] * unit_inv);

        // row elimination below the pivot (all entries have valuation >= best)
        for (std::size_t r = r0 + 1; r < rows; ++r) {
            BigInt q = B[r][c0] / pv;
            if (q != 0) {
                for (std::size_t c = c0; c < cols; ++c) B[r][c] = norm(B[r][c] - q * B[r0][c]);
                rhs[r] = norm(rhs[r] - q * rhs[r0]);
            }
        }
        // column elimination: substituting x_{c0} -> x_{c0} - q x_c zeroes the
        // rest of the pivot row; lower rows already have 0 in column c0
        for (std::size_t c = c0 + 1; c < cols; ++c) B[r0][c] = 0;

        // pivot equation p^best * y == rhs[r0] (mod M) has p^best solutions
        if (vmod(rhs[r0]) < best) return 0;
        count *= pv;
        ++r0;
        ++c0;
    }
    // leftover rows demand 0 == rhs (mod M)
    for (std::size_t r = r0; r < rows; ++r)
        if (norm(rhs[r]) != 0) return 0;
    // free variables
    for (std::size_t c = c0; c < cols; ++c) count *= M;
    return count;
}

} // namespace

ExactRational alpha_prime_power(const AffineSystem& system, std::uint64_t p,
                                const std::vector<std::uint32_t>& exponents) {
    if (exponents.size() != system.size())
        throw ConfigError("exponent tuple size must match the number of forms");
    std::uint32_t A = 0;
    for (auto a : exponents) A = std::max(A, a);
    if (A == 0) return ExactRational(1);

    BigInt bp(static_cast<unsigned long>(p));
    BigInt M = pow_big(bp, A);
    std::vector<std::vector<BigInt>> B;
    std::vector<BigInt> rhs;
    for (std::size_t i = 0; i < system.size(); ++i) {
        if (exponents[i] == 0) continue;
        BigInt lift = pow_big(bp, A - exponents[i]);
        std::vector<BigInt> row(system.dimension());
        for (std::size_t k = 0; k < system.dimension(); ++k)
            row[k] = lift * system.form(i).coeffs[k];
        B.push_back(std::move(row));
        rhs.push_back((-lift * system.form(i).constant) % M);
    }
    BigInt cnt = count_congruence_solutions(std::move(B), std::move(rhs), bp, A);
    BigInt denom = pow_big(M, static_cast<unsigned long>(system.dimension()));
    return make_rational(cnt, denom);
}

ExactRational alpha_prime_power_brute(const AffineSystem& system, std::uint64_t p,
                                      const std::vector<std::uint32_t>& exponents,
                                      std::uint64_t work_cap) {
    if (exponents.size() != system.size())
        throw ConfigError("exponent tuple size must match the number of forms");
    std::uint32_t A = 0;
    for (auto a : exponents) A = std::max(A, a);
    if (A == 0) return ExactRational(1);
    std::size_t d = system.dimension();

    unsigned __int128 M = 1;
    for (std::uint32_t k = 0; k < A; ++k) M *= p;
    unsigned __int128 total = 1;
    for (std::size_t k = 0; k < d; ++k) {
        total *= M;
        if (total > work_cap)
            throw WorkCapError("brute-force alpha enumeration of p^(A d) > cap points");
    }
    std::uint64_t Mu = static_cast<std::uint64_t>(M);
    std::vector<std::uint64_t> pmod(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        std::uint64_t m = 1;
        for (std::uint32_t k = 0; k < exponents[i]; ++k) m *= p;
        pmod[i] = m;
    }

    std::vector<std::uint64_t> x(d, 0);
    std::uint64_t count = 0;
    std::uint64_t points = static_cast<std::uint64_t>(total);
    for (std::uint64_t idx = 0; idx < points; ++idx) {
        std::uint64_t t = idx;
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = t % Mu;
            t /= Mu;
        }
        bool ok = true;
        for (std::size_t i = 0; i < system.size() && ok; ++i) {
            if (exponents[i] == 0) continue;
            __int128 acc = system.form(i).constant;
            for (std::size_t k = 0; k < d; ++k)
                acc += static_cast<__int128>(system.form(i).coeffs[k]) * x[k];
            std::int64_t m = static_cast<std::int64_t>(pmod[i]);
            std::int64_t r = static_cast<std::int64_t>(acc % m);
            if (r < 0) r += m;
            ok = (r == 0);
        }
        if (ok) ++count;
    }
    BigInt denom = pow_big(Mu, static_cast<unsigned long>(d));
    return make_rational(BigInt(static_cast<unsigned long>(count)), denom);
}

ExactRational alpha(const AffineSystem& system, const std::vector<std::uint64_t>& moduli) {
    if (moduli.size() != system.size())
        throw ConfigError("modulus tuple size must match the number of forms");
    for (auto d : moduli)
        if (d == 0) throw ConfigError("moduli must be positive");
    // prime support of lcm via trial division
    std::vector<std::uint64_t> rest = moduli;
    ExactRational result(1);
    for (std::uint64_t p = 2;; ++p) {
        std::uint64_t remaining = 1;
        for (auto r : rest) remaining = std::max(remaining, r);
        if (remaining == 1) break;
        if (p * p > remaining) {
            // remaining entries are prime
            std::vector<std::uint64_t> leftover;
            for (auto r : rest)
                if (r > 1) leftover.push_back(r);
            std::sort(leftover.begin(), leftover.end());
            leftover.erase(std::unique(leftover.begin(), leftover.end()), leftover.end());
            for (std::uint64_t q : leftover) {
                std::vector<std::uint32_t> exps(moduli.size(), 0);
                for (std::size_t i = 0; i < rest.size(); ++i)
                    while (rest[i] % q == 0) {
                        rest[i] /= q;
                        ++exps[i];
                    }
                result *= alpha_prime_power(system, q, exps);
            }
            break;
        }
        bool divides = false;
        for (auto r : rest) divides = divides || (r % p == 0);
        if (!divides) continue;
        std::vector<std::uint32_t> exps(moduli.size(), 0);
        for (std::size_t i = 0; i < rest.size(); ++i)
            while (rest[i] % p == 0) {
                rest[i] /= p;
                ++exps[i];
            }
        result *= alpha_prime_power(system, p, exps);
    }
    return result;
}

// ---------------------------------------------------------------------------
// beta_p
// ---------------------------------------------------------------------------

namespace {

// Exact density of psi == 0 mod p^j over (Z/p^j)^d for a single form.
ExactRational single_form_density(const AffineForm& f, const BigInt& p, std::uint32_t j) {
    if (j == 0) return ExactRational(1);
    unsigned v = UINT32_MAX;
    for (std::int64_t c : f.coeffs)
        if (c != 0) v = std::min(v, valuation(BigInt(static_cast<long>(c)), p));
    unsigned vc = f.constant == 0 ? UINT32_MAX : valuation(BigInt(static_cast<long>(f.constant)), p);
    unsigned need = std::min<unsigned>(v, j);
    if (vc < need) return ExactRational(0);
    // p^{min(v,j) - j} of the residues satisfy the congruence
    return make_rational(pow_big(p, need), pow_big(p, j));
}

// sum_{j >= J} j^m x^j for exact rational 0 < x < 1, via Eulerian polynomials.
ExactRational power_tail(unsigned m, unsigned long J, const ExactRational& x) {
    // S_m(x) = sum_{i>=0} i^m x^i
    auto S = [&x](unsigned mm) -> ExactRational {
        if (mm == 0) return ExactRational(1) / (1 - x);
        // Eulerian triangle
        std::vector<std::vector<BigInt>> A(mm + 1);
        A[0] = {BigInt(1)};
        for (unsigned r = 1; r <= mm; ++r) {
            A[r].assign(r, 0);
            for (unsigned l = 0; l < r; ++l) {
                BigInt left = (l < A[r - 1].size()) ? A[r - 1][l] * (l + 1) : BigInt(0);
                BigInt right = (l >= 1 && l - 1 < A[r - 1].size()) ? A[r - 1][l - 1] * (r - l) : BigInt(0);
                A[r][l] = left + right;
            }
        }
        ExactRational num(0), xp = x;
        for (unsigned l = 0; l < mm; ++l) {
            num += ExactRational(A[mm][l]) * xp;
            xp *= x;
        }
        ExactRational den(1);
        for (unsigned k = 0; k <= mm; ++k) den *= (1 - x);
        return num / den;
    };
    // sum_{j>=J} j^m x^j = x^J sum_{i>=0} (i+J)^m x^i
    ExactRational xJ(1);
    for (unsigned long k = 0; k < J; ++k) xJ *= x;
    ExactRational out(0);
    BigInt binom(1);
    // sum over i of sum_m' C(m, m') J^{m-m'} i^{m'} x^i
    for (unsigned mp = 0; mp <= m; ++mp) {
        BigInt c;
        mpz_bin_uiui(c.get_mpz_t(), m, mp);
        BigInt Jpow = pow_big(BigInt(static_cast<unsigned long>(J)), m - mp);
        out += ExactRational(c * Jpow) * S(mp);
    }
    return xJ * out;
}

// sum_{j >= J} (j+1)^{t-1} x^j, exact.
ExactRational shifted_power_tail(unsigned tm1, unsigned long J, const ExactRational& x) {
    ExactRational out(0);
    for (unsigned m = 0; m <= tm1; ++m) {
        BigInt c;
        mpz_bin_uiui(c.get_mpz_t(), tm1, m);
        out += ExactRational(c) * power_tail(m, J, x);
    }
    return out;
}

} // namespace

std::uint32_t default_truncation(std::uint64_t p, std::uint64_t N) {
    double a = std::ceil(std::log(static_cast<double>(N)) / std::log(static_cast<double>(p)));
    return std::max<std::uint32_t>(10, static_cast<std::uint32_t>(a));
}

BetaP beta_p(const AffineSystem& system, std::uint64_t p, std::uint32_t A) {
    if (A < 1) throw ConfigError("beta_p truncation must be >= 1");
    if (p < 2) throw ConfigError("beta_p needs a prime");
    for (std::uint64_t q = 2; q * q <= p; ++q)
        if (p % q == 0) throw ConfigError("beta_p needs a prime, got " + std::to_string(p));
    std::size_t t = system.size();
    BigInt bp(static_cast<unsigned long>(p));

    ExactRational total(0);
    std::vector<std::uint32_t> exps(t, 0);
    while (true) {
        total += alpha_prime_power(system, p, exps);
        std::size_t k = 0;
        while (k < t && exps[k] == A) exps[k++] = 0;
        if (k == t) break;
        ++exps[k];
    }
    ExactRational euler = make_rational(BigInt(static_cast<long>(p - 1)), bp);
    ExactRational euler_t(1);
    for (std::size_t i = 0; i < t; ++i) euler_t *= euler;

    // Tail over tuples with max exponent j > A: at most t (j+1)^{t-1} tuples,
    // each alpha bounded by the best single-form density at level j.
    unsigned maxv = 0;
    ExactRational kappa(0);
    for (const auto& f : system.forms()) {
        unsigned v = UINT32_MAX;
        for (std::int64_t c : f.coeffs)
            if (c != 0) v = std::min(v, valuation(BigInt(static_cast<long>(c)), bp));
        maxv = std::max(maxv, v);
        unsigned vc = f.constant == 0 ? UINT32_MAX
                                      : valuation(BigInt(static_cast<long>(f.constant)), bp);
        if (vc >= v) kappa = std::max(kappa, ExactRational(pow_big(bp, v)));
    }
    std::uint32_t jstar = std::max<std::uint32_t>(A + 1, maxv + 1);
    ExactRational tail(0);
    for (std::uint32_t j = A + 1; j < jstar; ++j) {
        ExactRational Dj(0);
        for (const auto& f : system.forms()) Dj = std::max(Dj, single_form_density(f, bp, j));
        ExactRational mult(1);
        for (std::size_t i = 0; i + 1 < t; ++i) mult *= ExactRational(static_cast<long>(j + 1));
        tail += mult * Dj;
    }
    ExactRational x = make_rational(BigInt(1), bp);
    tail += kappa * shifted_power_tail(static_cast<unsigned>(t - 1), jstar, x);
    tail *= ExactRational(static_cast<long>(t));

    BetaP out;
    out.p = p;
    out.truncation = A;
    out.value = euler_t * total;
    out.tail_bound = euler_t * tail;
    out.exceptional = is_exceptional_prime(system, p);
    return out;
}

BetaCache& BetaCache::instance() {
    static BetaCache cache;
    return cache;
}

BetaP BetaCache::get(const AffineSystem& system, std::uint64_t p, std::uint32_t A) {
    auto key = std::make_tuple(system.cache_key(), p, A);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
    }
    BetaP b = beta_p(system, p, A);
    std::lock_guard<std::mutex> lk(mu_);
    map_.emplace(key, b); // idempotent: identical recomputation
    return b;
}

void BetaCache::clear() {
    std::lock_guard<std::mutex> lk(mu_);
    map_.clear();
}

SingularProduct singular_product(const AffineSystem& system, std::uint64_t p_max,
                                 std::uint32_t trunc, std::uint64_t N, unsigned workers) {
    if (p_max < 2) throw ConfigError("p_max must be >= 2");
    // Convergence of the product needs pairwise non-proportional affine
    // forms; system construction enforces that, but recheck in case a caller
    // bypassed validation.
    for (std::size_t i = 0; i < system.size(); ++i)
        for (std::size_t j = i + 1; j < system.size(); ++j) {
            std::vector<std::int64_t> a = system.form(i).coeffs, b = system.form(j).coeffs;
            a.push_back(system.form(i).constant);
            b.push_back(system.form(j).constant);
            bool prop = true;
            for (std::size_t u = 0; u + 1 < a.size() && prop; ++u)
                for (std::size_t v = u + 1; v < a.size(); ++v)
                    if (static_cast<__int128>(a[u]) * b[v] != static_cast<__int128>(a[v]) * b[u]) {
                        prop = false;
                        break;
                    }
            if (prop)
                throw InfiniteComplexityError("affinely dependent forms: product need not converge");
        }

    std::vector<std::uint64_t> primes;
    {
        std::vector<bool> comp(p_max + 1, false);
        for (std::uint64_t p = 2; p <= p_max; ++p) {
            if (comp[p]) continue;
            primes.push_back(p);
            for (std::uint64_t m = p * p; m <= p_max; m += p) comp[m] = true;
        }
    }

    std::vector<BetaP> betas(primes.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            std::size_t k = next.fetch_add(1);
            if (k >= primes.size()) break;
            std::uint32_t A = trunc > 0 ? trunc : default_truncation(primes[k], N);
            betas[k] = BetaCache::instance().get(system, primes[k], A);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    SingularProduct out;
    long double lo = 1, hi = 1, mid = 1;
    for (const auto& b : betas) {
        long double v = static_cast<long double>(to_double(b.value));
        long double tb = static_cast<long double>(to_double(b.tail_bound));
        mid *= v;
        lo *= v;
        hi *= (v + tb);
        out.partial_products.push_back(static_cast<double>(mid));
        if (b.exceptional) out.largest_exceptional = std::max(out.largest_exceptional, b.p);
        double dev = std::fabs(to_double(b.value) - 1.0);
        if (!b.exceptional)
            out.fitted_p2_constant =
                std::max(out.fitted_p2_constant, dev * static_cast<double>(b.p) * b.p);
    }
    out.per_prime = std::move(betas);
    out.value = static_cast<double>(mid);
    out.lower = static_cast<double>(lo);
    out.upper = static_cast<double>(hi);
    return out;
}

} // namespace divcorr
