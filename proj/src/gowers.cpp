#include "divcorr/gowers.hpp"

#include <cmath>
#include <complex>

#include "divcorr/errors.hpp"

namespace divcorr {

namespace {

using cd = std::complex<double>;

void fft(std::vector<cd>& a, bool invert) {
    std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2 * M_PI / static_cast<double>(len) * (invert ? -1 : 1);
        cd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cd u = a[i + j], v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (invert)
        for (auto& x : a) x /= static_cast<double>(n);
}

// one-sided sum over h >= 1 of the U^2 kernel of g:
//   sum_{h>=1} sum_x g(x)g(x+h)g(y)g(y+h) summed over h2 as well reduces to
//   1/2 sum_{h>=1} (c_g(h)^2 - q_g(h)) with q the autocorrelation of g^2.
double u2_kernel(const std::vector<double>& g) {
    std::vector<double> g2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) g2[i] = g[i] * g[i];
    std::vector<double> c = autocorrelation(g);
    std::vector<double> q = autocorrelation(g2);
    double s = 0;
    for (std::size_t h = 1; h < c.size(); ++h) s += c[h] * c[h] - q[h];
    return 0.5 * s;
}

} // namespace

std::vector<double> autocorrelation(const std::vector<double>& f) {
    std::size_t n = f.size(); // f[0] unused, values at 1..n-1
    std::size_t L = 1;
    while (L < 2 * n + 1) L <<= 1;
    std::vector<cd> a(L, cd(0, 0));
    for (std::size_t i = 0; i < n; ++i) a[i] = cd(f[i], 0);
    fft(a, false);
    for (auto& x : a) x = x * std::conj(x);
    fft(a, true);
    std::vector<double> c(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) c[k] = a[k].real();
    return c;
}

double gowers_u2_direct(const std::vector<double>& f) {
    std::size_t N = f.size() - 1;
    if (N > 2000) throw CapacityError("direct U^2 path capped at N = 2000");
    long double S = 0;
    for (std::size_t h1 = 1; h1 <= N; ++h1) {
        for (std::size_t h2 = 1; h2 <= N; ++h2) {
            if (h1 + h2 > N) break;
            long double inner = 0;
            for (std::size_t x = 1; x + h1 + h2 <= N; ++x)
                inner += static_cast<long double>(f[x]) * f[x + h1] * f[x + h2] * f[x + h1 + h2];
            S += inner;
        }
    }
    long double denom = static_cast<long double>(N) * N * N;
    long double v = S / denom;
    if (v < 0) v = 0;
    return static_cast<double>(std::pow(static_cast<double>(v), 0.25));
}

double gowers_u2_fast(const std::vector<double>& f) {
    std::size_t N = f.size() - 1;
    std::vector<double> g = f;
    g[0] = 0; // index 0 is outside [N]
    double S = u2_kernel(g);
    double denom = static_cast<double>(N) * N * N;
    double v = S / denom;
    if (v < 0) v = 0;
    return std::pow(v, 0.25);
}

double gowers_u3(const std::vector<double>& f) {
    std::size_t N = f.size() - 1;
    if (N > 2000) throw CapacityError("U^3 path capped at N = 2000");
    std::vector<double> base = f;
    base[0] = 0;
    long double S = 0;
    std::vector<double> g(base.size(), 0.0);
    for (std::size_t h1 = 1; h1 <= N; ++h1) {
        for (std::size_t x = 0; x + h1 < base.size(); ++x) g[x] = base[x] * base[x + h1];
        for (std::size_t x = base.size() - h1; x < base.size(); ++x) g[x] = 0;
        S += u2_kernel(g);
    }
    long double denom = static_cast<long double>(N) * N * N * N;
    long double v = S / denom;
    if (v < 0) v = 0;
    return static_cast<double>(std::pow(static_cast<double>(v), 0.125));
}

double gowers_norm(const std::vector<double>& f, unsigned s, bool fast) {
    std::size_t N = f.size() - 1;
    if (N < 1) throw ConfigError("gowers_norm needs at least one sample");
    if (s == 2) {
        if (!fast) return gowers_u2_direct(f);
        if (N > 200000) throw CapacityError("U^2 fast path capped at N = 200000");
        return gowers_u2_fast(f);
    }
    if (s == 3) return gowers_u3(f);
    throw ConfigError("s must be 2 or 3");
}

} // namespace divcorr
