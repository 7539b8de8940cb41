#include "divcorr/affine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace divcorr {

std::int64_t AffineForm::evaluate(const std::vector<std::int64_t>& n) const {
    if (n.size() != coeffs.size()) throw RangeError("affine form dimension mismatch");
    __int128 acc = constant;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        acc += static_cast<__int128>(coeffs[k]) * n[k];
    if (acc > INT64_MAX || acc < INT64_MIN) throw CapacityError("affine form value overflow");
    return static_cast<std::int64_t>(acc);
}

namespace {

bool all_zero(const std::vector<std::int64_t>& v) {
    return std::all_of(v.begin(), v.end(), [](std::int64_t c) { return c == 0; });
}

// gcd of all 2x2 minors of the two stacked vectors; nullopt when every minor
// vanishes (proportional over Q, or fewer than 2 columns).
std::optional<std::uint64_t> minor_gcd(const std::vector<std::int64_t>& a,
                                       const std::vector<std::int64_t>& b) {
    std::uint64_t g = 0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            __int128 m = static_cast<__int128>(a[i]) * b[j] - static_cast<__int128>(a[j]) * b[i];
            std::uint64_t av = static_cast<std::uint64_t>(m < 0 ? -m : m);
            g = std::gcd(g, av);
        }
    if (g == 0) return std::nullopt;
    return g;
}

bool proportional_over_q(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    return !minor_gcd(a, b).has_value();
}

} // namespace

AffineSystem AffineSystem::create(std::vector<AffineForm> forms) {
    if (forms.empty()) throw ConfigError("system needs at least one form");
    std::size_t d = forms[0].coeffs.size();
    if (d == 0) throw ConfigError("forms must have at least one variable");
    for (const auto& f : forms) {
        if (f.coeffs.size() != d) throw ConfigError("inconsistent form dimensions");
        if (all_zero(f.coeffs)) throw ConfigError("constant form is not allowed");
    }
    for (std::size_t k = 0; k < d; ++k) {
        bool used = false;
        for (const auto& f : forms) used = used || f.coeffs[k] != 0;
        if (!used) throw ConfigError("variable " + std::to_string(k + 1) + " unused by all forms");
    }
    for (std::size_t i = 0; i < forms.size(); ++i)
        for (std::size_t j = i + 1; j < forms.size(); ++j) {
            // rational multiples as affine forms: compare (coeffs | constant)
            std::vector<std::int64_t> a = forms[i].coeffs, b = forms[j].coeffs;
            a.push_back(forms[i].constant);
            b.push_back(forms[j].constant);
            if (proportional_over_q(a, b))
                throw ConfigError("forms " + std::to_string(i + 1) + " and " +
                                  std::to_string(j + 1) + " are rational multiples");
        }

    AffineSystem s;
    s.d_ = d;
    s.forms_ = std::move(forms);
    for (const auto& f : s.forms_)
        for (std::int64_t c : f.coeffs)
            s.L_ = std::max<std::int64_t>(s.L_, c < 0 ? -c : c);

    s.finite_complexity_ = true;
    for (std::size_t i = 0; i < s.forms_.size() && s.finite_complexity_; ++i)
        for (std::size_t j = i + 1; j < s.forms_.size(); ++j)
            if (proportional_over_q(s.forms_[i].coeffs, s.forms_[j].coeffs)) {
                s.finite_complexity_ = false;
                break;
            }

    std::vector<std::string> keys;
    for (const auto& f : s.forms_) {
        std::ostringstream os;
        for (std::int64_t c : f.coeffs) os << c << " ";
        os << "| " << f.constant;
        keys.push_back(os.str());
    }
    std::sort(keys.begin(), keys.end());
    std::ostringstream os;
    os << "d" << d << ":";
    for (const auto& k : keys) os << " [" << k << "]";
    s.cache_key_ = os.str();
    return s;
}

bool check_finite_complexity(const AffineSystem& system) { return system.finite_complexity(); }

namespace {

struct ExceptionalCriterion {
    bool universal = false;            // every prime exceptional
    std::vector<std::uint64_t> gcds;   // p exceptional iff p divides one of these
};

ExceptionalCriterion exceptional_criterion(const AffineSystem& system) {
    ExceptionalCriterion crit;
    const auto& forms = system.forms();
    for (std::size_t i = 0; i < forms.size(); ++i) {
        std::uint64_t content = 0;
        for (std::int64_t c : forms[i].coeffs)
            content = std::gcd(content, static_cast<std::uint64_t>(std::llabs(c)));
        if (content > 1) crit.gcds.push_back(content);
        for (std::size_t j = i + 1; j < forms.size(); ++j) {
            auto g = minor_gcd(forms[i].coeffs, forms[j].coeffs);
            if (!g) {
                crit.universal = true; // proportional mod every prime
                return crit;
            }
            if (*g > 1) crit.gcds.push_back(*g);
        }
    }
    return crit;
}

} // namespace

std::vector<std::uint64_t> exceptional_primes(const AffineSystem& system, std::uint64_t p_max) {
    if (p_max < 2) throw ConfigError("p_max must be >= 2");
    std::vector<std::uint64_t> primes;
    std::vector<bool> comp(p_max + 1, false);
    for (std::uint64_t p = 2; p <= p_max; ++p) {
        if (comp[p]) continue;
        primes.push_back(p);
        for (std::uint64_t m = p * p; m <= p_max; m += p) comp[m] = true;
    }

    ExceptionalCriterion crit = exceptional_criterion(system);
    if (crit.universal) return primes;
    std::vector<std::uint64_t> out;
    for (std::uint64_t p : primes)
        for (std::uint64_t g : crit.gcds)
            if (g % p == 0) {
                out.push_back(p);
                break;
            }
    return out;
}

bool is_exceptional_prime(const AffineSystem& system, std::uint64_t p) {
    ExceptionalCriterion crit = exceptional_criterion(system);
    if (crit.universal) return true;
    for (std::uint64_t g : crit.gcds)
        if (g % p == 0) return true;
    return false;
}

std::uint64_t max_pair_minor(const AffineSystem& system) {
    std::uint64_t best = 0;
    const auto& forms = system.forms();
    for (std::size_t i = 0; i < forms.size(); ++i)
        for (std::size_t j = i + 1; j < forms.size(); ++j)
            for (std::size_t a = 0; a + 1 < system.dimension(); ++a)
                for (std::size_t b = a + 1; b < system.dimension(); ++b) {
                    __int128 m = static_cast<__int128>(forms[i].coeffs[a]) * forms[j].coeffs[b] -
                                 static_cast<__int128>(forms[i].coeffs[b]) * forms[j].coeffs[a];
                    std::uint64_t av = static_cast<std::uint64_t>(m < 0 ? -m : m);
                    best = std::max(best, av);
                }
    return best;
}

// ---------------------------------------------------------------------------
// ConvexBody
// ---------------------------------------------------------------------------

ConvexBody ConvexBody::box(std::vector<std::int64_t> lo, std::vector<std::int64_t> hi) {
    if (lo.size() != hi.size() || lo.empty()) throw ConfigError("box bounds dimension mismatch");
    ConvexBody b;
    b.d_ = lo.size();
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (lo[k] > hi[k]) b.empty_ = true;
    b.box_ = Box{std::move(lo), std::move(hi)};
    return b;
}

ConvexBody ConvexBody::polytope(Polytope poly, std::int64_t bound_cap) {
    if (poly.rows.empty()) throw ConfigError("polytope needs at least one constraint");
    std::size_t d = poly.rows[0].size();
    if (d == 0 || poly.rows.size() != poly.rhs.size())
        throw ConfigError("polytope constraint shape mismatch");
    ConvexBody b;
    b.d_ = d;

    // clear denominators row by row
    for (std::size_t r = 0; r < poly.rows.size(); ++r) {
        if (poly.rows[r].size() != d) throw ConfigError("polytope row dimension mismatch");
        BigInt l = 1;
        for (const auto& q : poly.rows[r]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den().get_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), poly.rhs[r].get_den().get_mpz_t());
        std::vector<std::int64_t> irow(d);
        for (std::size_t k = 0; k < d; ++k) {
            BigInt v = poly.rows[r][k].get_num() * (l / poly.rows[r][k].get_den());
            if (!v.fits_slong_p()) throw CapacityError("polytope coefficient overflow");
            irow[k] = v.get_si();
        }
        BigInt rv = poly.rhs[r].get_num() * (l / poly.rhs[r].get_den());
        if (!rv.fits_slong_p()) throw CapacityError("polytope rhs overflow");
        b.irows_.push_back(std::move(irow));
        b.irhs_.push_back(rv.get_si());
    }
    b.poly_ = std::make_shared<Polytope>(std::move(poly));

    // bounding box by interval constraint propagation from [-cap, cap]^d
    std::vector<std::int64_t> lo(d, -bound_cap), hi(d, bound_cap);
    for (std::size_t round = 0; round < 2 * d + 2; ++round) {
        for (std::size_t r = 0; r < b.irows_.size(); ++r) {
            for (std::size_t j = 0; j < d; ++j) {
                std::int64_t aj = b.irows_[r][j];
                if (aj == 0) continue;
                __int128 rest = 0; // min over box of sum_{k != j} a_k x_k
                for (std::size_t k = 0; k < d; ++k) {
                    if (k == j) continue;
                    std::int64_t a = b.irows_[r][k];
                    rest += static_cast<__int128>(a) * (a >= 0 ? lo[k] : hi[k]);
                }
                __int128 room = static_cast<__int128>(b.irhs_[r]) - rest;
                if (aj > 0) {
                    // x_j <= floor(room / aj)
                    __int128 q = room >= 0 ? room / aj : -((-room + aj - 1) / aj);
                    hi[j] = std::min<std::int64_t>(hi[j], static_cast<std::int64_t>(q));
                } else {
                    // x_j >= ceil(room / aj), aj < 0
                    __int128 na = -static_cast<__int128>(aj);
                    __int128 q = room >= 0 ? -(room / na) : (-room + na - 1) / na;
                    lo[j] = std::max<std::int64_t>(lo[j], static_cast<std::int64_t>(q));
                }
            }
        }
    }
    for (std::size_t k = 0; k < d; ++k)
        if (lo[k] > hi[k]) b.empty_ = true;
    b.box_ = Box{std::move(lo), std::move(hi)};
    return b;
}

std::uint64_t ConvexBody::bounding_count() const {
    if (empty_) return 0;
    unsigned __int128 c = 1;
    for (std::size_t k = 0; k < d_; ++k) {
        c *= static_cast<std::uint64_t>(box_.hi[k] - box_.lo[k] + 1);
        if (c > (static_cast<unsigned __int128>(1) << 62))
            throw CapacityError("bounding box too large to enumerate");
    }
    return static_cast<std::uint64_t>(c);
}

void ConvexBody::decode(std::uint64_t index, std::vector<std::int64_t>& point) const {
    point.resize(d_);
    for (std::size_t k = d_; k-- > 0;) {
        std::uint64_t w = static_cast<std::uint64_t>(box_.hi[k] - box_.lo[k] + 1);
        point[k] = box_.lo[k] + static_cast<std::int64_t>(index % w);
        index /= w;
    }
}

bool ConvexBody::contains(const std::vector<std::int64_t>& point) const {
    if (empty_) return false;
    for (std::size_t k = 0; k < d_; ++k)
        if (point[k] < box_.lo[k] || point[k] > box_.hi[k]) return false;
    for (std::size_t r = 0; r < irows_.size(); ++r) {
        __int128 acc = 0;
        for (std::size_t k = 0; k < d_; ++k)
            acc += static_cast<__int128>(irows_[r][k]) * point[k];
        if (acc > irhs_[r]) return false;
    }
    return true;
}

std::uint64_t ConvexBody::lattice_count() const {
    std::uint64_t c = 0;
    lattice_points(*this, [&c](const std::vector<std::int64_t>&) { ++c; });
    return c;
}

VolumeEstimate ConvexBody::volume() const {
    if (empty_) return {0.0, true, 0.0};
    if (is_box()) {
        double v = 1;
        for (std::size_t k = 0; k < d_; ++k)
            v *= static_cast<double>(box_.hi[k] - box_.lo[k]);
        return {v, true, 0.0};
    }
    // lattice-count proxy; boundary layer contributes O(B^{d-1}) either way
    double B = 1;
    for (std::size_t k = 0; k < d_; ++k)
        B = std::max(B, static_cast<double>(box_.hi[k] - box_.lo[k] + 1));
    double unc = 2.0 * static_cast<double>(d_) * std::pow(B, static_cast<double>(d_) - 1.0);
    return {static_cast<double>(lattice_count()), false, unc};
}

void lattice_points(const ConvexBody& body,
                    const std::function<void(const std::vector<std::int64_t>&)>& visit) {
    if (body.empty()) return;
    std::uint64_t total = body.bounding_count();
    std::vector<std::int64_t> pt(body.dimension());
    if (body.is_box()) {
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            body.decode(idx, pt);
            visit(pt);
        }
    } else {
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            body.decode(idx, pt);
            if (body.contains(pt)) visit(pt);
        }
    }
}

bool check_range(const AffineSystem& system, const ConvexBody& body, std::uint64_t N) {
    if (system.dimension() != body.dimension())
        throw ConfigError("system/body dimension mismatch");
    if (body.empty()) return true;
    if (body.is_box()) {
        const Box& b = body.bounding_box();
        for (const auto& f : system.forms()) {
            __int128 mn = f.constant, mx = f.constant;
            for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
                std::int64_t c = f.coeffs[k];
                mn += static_cast<__int128>(c) * (c >= 0 ? b.lo[k] : b.hi[k]);
                mx += static_cast<__int128>(c) * (c >= 0 ? b.hi[k] : b.lo[k]);
            }
            if (mn < 1 || mx > static_cast<__int128>(N)) return false;
        }
        return true;
    }
    bool ok = true;
    lattice_points(body, [&](const std::vector<std::int64_t>& pt) {
        if (!ok) return;
        for (const auto& f : system.forms()) {
            std::int64_t v = f.evaluate(pt);
            if (v < 1 || static_cast<std::uint64_t>(v) > N) {
                ok = false;
                return;
            }
        }
    });
    return ok;
}

} // namespace divcorr
