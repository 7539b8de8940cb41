#pragma once

#include <cstdint>
#include <vector>

namespace divcorr {

// Uniformity norm over the interval: the 2^s-fold parallelepiped average with
// x in [N], h in [N]^s and f extended by zero outside [N].  Input is
// 1-indexed, f[0] ignored.
//
// s = 2 direct path is a cubic loop (capped); the fast path reduces the h2
// sum to autocorrelations computed by FFT and is exact up to roundoff.
// s = 3 evaluates the definition by conditioning on h1, an O(N^2 log N)
// reorganisation of the same sum.

double gowers_u2_direct(const std::vector<double>& f);
double gowers_u2_fast(const std::vector<double>& f);
double gowers_u3(const std::vector<double>& f);

double gowers_norm(const std::vector<double>& f, unsigned s, bool fast = true);

// raw correlation c(k) = sum_x f(x) f(x+k) for k = 0..N-1, via FFT
std::vector<double> autocorrelation(const std::vector<double>& f);

} // namespace divcorr
