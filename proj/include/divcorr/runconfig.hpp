#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divcorr/affine.hpp"
#include "divcorr/arith_core.hpp"

namespace divcorr {

inline constexpr const char* kVersion = "0.1.0";

struct BodySpec {
    std::string type = "box"; // "box" | "polytope"
    std::vector<std::string> lo, hi; // box bounds: integers or expressions in N
    std::vector<std::vector<std::string>> rows; // polytope coefficients (rationals)
    std::vector<std::string> rhs;
    std::int64_t bound_cap = 0; // 0: use N
};

struct RunConfig {
    std::string command;

    std::uint64_t n = 0;
    std::vector<std::uint64_t> grid;

    std::optional<std::vector<AffineForm>> forms;
    std::optional<BodySpec> body;

    std::uint64_t gamma_inv = 4;
    double c1 = 2.0;
    std::optional<double> w; // manual w cutoff; unset = asymptotic
    std::vector<double> w_schedule; // per grid entry, for grid commands
    std::optional<std::pair<std::int64_t, std::int64_t>> s_range;
    std::optional<std::pair<std::int64_t, std::int64_t>> i_range;

    std::uint32_t trunc = 0; // 0: per-prime default
    std::uint64_t pmax = 100000;
    std::string weight = "tau-tilde";
    std::uint64_t a = 1;      // ingham shift
    std::uint32_t k = 2;      // moment order
    std::uint32_t s = 2;      // gowers order
    std::vector<std::int64_t> shifts;
    std::vector<std::uint64_t> b;
    std::uint32_t tuples = 50;
    std::uint64_t interval_lo = 1, interval_hi = 0;
    double c_sigma = 1.0;
    double sigma0 = 0.0;
    std::vector<std::uint64_t> moduli;
    std::uint64_t p = 2;

    unsigned workers = 1;
    std::uint64_t seed = 20240801;
    std::string out = "";

    // Parse a JSON config file; unknown keys are rejected.
    static RunConfig from_json_file(const std::string& path);
    void merge_json_file(const std::string& path);

    MajorantParams majorant_params() const;
    WMode w_mode() const;
    // Evaluate a box bound expression ("12", "N", "N-1", "N/2", "N/2-3") at N.
    static std::int64_t eval_bound(const std::string& expr, std::uint64_t N);
    ConvexBody make_body(std::uint64_t N) const;
    AffineSystem make_system() const;
};

// Execute one command: writes <out>.csv and <out>.manifest.json.
void run(const RunConfig& config);

} // namespace divcorr
