#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace divcorr {

// Arbitrary-precision rational, always stored reduced with positive
// denominator.  mpq_class keeps values canonical, which is exactly the
// invariant we need for exact local-density arithmetic.
using ExactRational = mpq_class;
using BigInt        = mpz_class;

inline ExactRational make_rational(long num, long den = 1) {
    ExactRational q(num, den);
    q.canonicalize();
    return q;
}

inline ExactRational make_rational(const BigInt& num, const BigInt& den) {
    ExactRational q(num, den);
    q.canonicalize();
    return q;
}

inline std::string fraction_string(const ExactRational& q) {
    return q.get_str();
}

inline double to_double(const ExactRational& q) {
    return q.get_d();
}

inline BigInt pow_big(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline BigInt pow_big(std::uint64_t base, unsigned long e) {
    BigInt b;
    mpz_import(b.get_mpz_t(), 1, 1, sizeof(base), 0, 0, &base);
    return pow_big(b, e);
}

inline std::uint64_t to_u64(const BigInt& z) {
    std::uint64_t lo = mpz_get_ui(z.get_mpz_t());
    if (mpz_sizeinbase(z.get_mpz_t(), 2) > 64) return UINT64_MAX;
    if (mpz_sizeinbase(z.get_mpz_t(), 2) > 32) {
        // mpz_get_ui truncates to an unsigned long, which is 64-bit here.
        return lo;
    }
    return lo;
}

// p-adic valuation of a nonzero integer.
inline unsigned valuation(BigInt n, const BigInt& p) {
    unsigned v = 0;
    if (n == 0) return 0;
    if (n < 0) n = -n;
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
        n /= p;
        ++v;
    }
    return v;
}

} // namespace divcorr
