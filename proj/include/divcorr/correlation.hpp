#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "divcorr/affine.hpp"
#include "divcorr/local_densities.hpp"
#include "divcorr/weights.hpp"

namespace divcorr {

struct CorrelationReport {
    std::string system_key;
    std::string body_desc;
    std::uint64_t N = 0;
    WeightId weight = WeightId::One;

    double raw = 0;                 // integer accumulations mirrored exactly below
    std::string raw_exact;          // decimal string for integral weights
    std::uint64_t lattice_count = 0;
    double volume = 0;
    bool volume_exact = true;
    double normalized = 0;          // raw / volume

    std::optional<double> reference;       // e.g. prod beta_p
    std::optional<double> reference_lower; // certified truncation interval
    std::optional<double> reference_upper;
    std::optional<double> deviation;       // |normalized/reference - 1|

    std::optional<double> exceptional_fraction; // share of raw from S1 u S2 hits

    double runtime_ms = 0; // manifest only, never serialised into CSV rows
    bool degenerate_regime = false;
    bool manual_w = false;
    bool manual_ranges = false;
};

// Exact lattice sweep of prod_i weight(psi_i(n)) over K cap Z^d.
// Deterministic for any worker count: fixed blocks, pairwise combination.
// When exceptional_mask is given, also accumulates the sub-sum over points
// where some form lands in the masked set.
CorrelationReport correlate(const AffineSystem& system, const ConvexBody& body, std::uint64_t N,
                            const WeightArray& weight, unsigned workers = 1,
                            const std::vector<std::uint8_t>* exceptional_mask = nullptr);

// Naive reference: direct loops, trial-division weights, no shared tables.
// Integral weights only.
CorrelationReport correlate_oracle(const AffineSystem& system, const ConvexBody& body,
                                   std::uint64_t N, WeightId weight);

struct MainTheoremRun {
    std::vector<CorrelationReport> reports;
    SingularProduct reference;
};

// Boxes per grid point come from the caller (bounds may depend on N).
MainTheoremRun verify_main_theorem(const AffineSystem& system,
                                   const std::function<ConvexBody(std::uint64_t)>& body_for_n,
                                   const std::vector<std::uint64_t>& grid, std::uint64_t p_max,
                                   std::uint32_t trunc, const FactorTables& tables,
                                   unsigned workers = 1);

struct InghamResult {
    std::uint64_t N = 0;
    std::uint64_t a = 0;
    std::string raw_exact; // sum tau(n) tau(n+a), exact
    double sigma_minus1 = 0;
    double ratio = 0; // raw / ((6/pi^2) sigma_{-1}(a) N log^2 N)
};

InghamResult ingham(std::uint64_t a, std::uint64_t N, const FactorTables& tables);
ExactRational sigma_minus_one(std::uint64_t a);

struct LinearFormsReport {
    std::vector<double> c_primes; // measured one-form normalisations
    double mean = 0;              // lattice mean of the nu' product
    double deviation = 0;         // |mean / prod c_primes - 1|
    std::uint64_t bigW = 1;
    std::uint64_t sample_points = 0;
};

LinearFormsReport linear_forms_check(const AffineSystem& system, const ConvexBody& body,
                                     std::uint64_t N, const MajorantParams& params,
                                     const WContext& ctx, const std::vector<std::uint64_t>& b,
                                     const FactorTables& tables, unsigned workers = 1);

struct CorrelationConditionReport {
    double lhs = 0;       // normalised mean of the shifted nu' product
    double rhs = 0;       // sum of sigma at the configured c_sigma
    bool applicable = true; // m >= 2
    bool holds = false;
    double min_c_sigma = 0; // smallest c making the inequality hold (sigma0 fixed)
};

CorrelationConditionReport correlation_condition_check(
    const std::vector<std::int64_t>& shifts, const std::vector<std::uint64_t>& b,
    std::uint64_t interval_lo, std::uint64_t interval_hi, std::uint64_t N,
    const MajorantParams& params, const WContext& ctx, const SigmaParams& sigma,
    const FactorTables& tables);

// E prod_i tau^k(psi_i(n)) over the body.
double kth_moment(const AffineSystem& system, const ConvexBody& body, std::uint64_t N,
                  std::uint32_t k, const FactorTables& tables, unsigned workers = 1);

} // namespace divcorr
