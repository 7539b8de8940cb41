#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divcorr/majorant.hpp"

namespace divcorr {

enum class WeightId {
    One,
    Tau,
    TauTilde,
    TauGammaTilde,
    TauTildePrime,
    TauTildePrimeGamma,
    TauBar,
    NuRaw,
    NuPrimeRaw,
};

std::string weight_name(WeightId id);
WeightId weight_from_name(const std::string& name);
bool weight_is_integral(WeightId id);

// Dense weight table over [1, N]: lattice sweeps are pure lookups.
struct WeightArray {
    WeightId id = WeightId::One;
    std::uint64_t N = 0;
    std::vector<std::uint64_t> ints;  // valid when integral
    std::vector<double> reals;        // valid otherwise

    bool integral() const { return !ints.empty(); }
    std::uint64_t at_int(std::uint64_t n) const { return ints[n]; }
    double at_real(std::uint64_t n) const { return reals[n]; }
};

// Builds the table by sieved sweeps; matches the pointwise module functions
// value for value (same accumulation order for the real-valued weights).
WeightArray build_weight_array(WeightId id, std::uint64_t N, const FactorTables& tables,
                               const MajorantParams& params,
                               const std::optional<WContext>& wctx);

// 1 where n lies in S1 u S2.
std::vector<std::uint8_t> build_exceptional_mask(std::uint64_t N, const MajorantParams& params,
                                                 const FactorTables& tables);

// Distinct primes of n in I_i for every i up to max_superdyadic_index(N).
std::vector<std::vector<std::uint8_t>> build_omega_tables(std::uint64_t N,
                                                          const FactorTables& tables);

} // namespace divcorr
