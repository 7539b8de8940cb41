#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "divcorr/errors.hpp"
#include "divcorr/rational.hpp"

namespace divcorr {

// psi(n) = coeffs . n + constant, with a nonzero linear part.
struct AffineForm {
    std::vector<std::int64_t> coeffs;
    std::int64_t constant = 0;

    std::int64_t evaluate(const std::vector<std::int64_t>& n) const;
};

// Nondegenerate system of affine-linear forms on Z^d: no form constant, every
// coordinate used by some form, no two forms rational multiples of each other.
class AffineSystem {
  public:
    static AffineSystem create(std::vector<AffineForm> forms);

    std::size_t dimension() const { return d_; }
    std::size_t size() const { return forms_.size(); }
    const std::vector<AffineForm>& forms() const { return forms_; }
    const AffineForm& form(std::size_t i) const { return forms_[i]; }
    std::int64_t max_coefficient() const { return L_; }
    bool finite_complexity() const { return finite_complexity_; }

    // Sorted-forms key for density caches.  Local densities are invariant
    // under reordering the forms but not under rescaling them, so the key
    // keeps coefficients verbatim.
    const std::string& cache_key() const { return cache_key_; }

  private:
    AffineSystem() = default;
    std::size_t d_ = 0;
    std::vector<AffineForm> forms_;
    std::int64_t L_ = 0;
    bool finite_complexity_ = false;
    std::string cache_key_;
};

bool check_finite_complexity(const AffineSystem& system);

// Primes p <= p_max modulo which some pair of linear parts becomes
// proportional (all 2x2 minors of the stacked pair divisible by p, a zero
// row mod p counting as proportional).  For d = 1 there are no 2x2 minors,
// so every prime is exceptional there.
std::vector<std::uint64_t> exceptional_primes(const AffineSystem& system, std::uint64_t p_max);

// Same criterion for one prime, without sieving.
bool is_exceptional_prime(const AffineSystem& system, std::uint64_t p);

// Largest absolute 2x2 minor over all form pairs; 0 when d == 1.
std::uint64_t max_pair_minor(const AffineSystem& system);

// ---------------------------------------------------------------------------
// Convex bodies
// ---------------------------------------------------------------------------

struct Box {
    std::vector<std::int64_t> lo;
    std::vector<std::int64_t> hi; // inclusive lattice bounds
};

// {x : sum_k A[r][k] x_k <= b[r]} with rational data.
struct Polytope {
    std::vector<std::vector<ExactRational>> rows;
    std::vector<ExactRational> rhs;
};

struct VolumeEstimate {
    double value = 0;
    bool exact = true;
    double uncertainty = 0; // O(B^{d-1}) boundary bound for lattice proxies
};

class ConvexBody {
  public:
    static ConvexBody box(std::vector<std::int64_t> lo, std::vector<std::int64_t> hi);
    // bound_cap clips the derived bounding box to [-bound_cap, bound_cap]^d
    // on axes the constraints leave unbounded.
    static ConvexBody polytope(Polytope poly, std::int64_t bound_cap);

    std::size_t dimension() const { return d_; }
    bool is_box() const { return poly_ == nullptr; }
    const Box& bounding_box() const { return box_; }
    const Polytope* polytope_data() const { return poly_.get(); }

    bool empty() const { return empty_; }

    // Lattice points of the bounding box, counted in lexicographic order.
    std::uint64_t bounding_count() const;
    // Decode flattened bounding-box index (lexicographic, mixed radix).
    void decode(std::uint64_t index, std::vector<std::int64_t>& point) const;

    bool contains(const std::vector<std::int64_t>& point) const;

    // Exact |K cap Z^d| by sweep over the bounding box.
    std::uint64_t lattice_count() const;

    VolumeEstimate volume() const;

  private:
    std::size_t d_ = 0;
    Box box_;
    std::shared_ptr<const Polytope> poly_;
    // integer-cleared rows for fast membership: irow . x <= irhs
    std::vector<std::vector<std::int64_t>> irows_;
    std::vector<std::int64_t> irhs_;
    bool empty_ = false;
};

// Stream K cap Z^d in deterministic lexicographic order.
void lattice_points(const ConvexBody& body,
                    const std::function<void(const std::vector<std::int64_t>&)>& visit);

// True iff every form maps every point of the body into [1, N]; exact
// interval arithmetic for boxes, exhaustive lattice evaluation for polytopes.
// Empty bodies pass vacuously.
bool check_range(const AffineSystem& system, const ConvexBody& body, std::uint64_t N);

} // namespace divcorr
