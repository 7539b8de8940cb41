#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace divcorr {

// Deterministic sum machinery for the lattice sweeps.  Work is cut into
// fixed-size blocks in enumeration order; workers claim blocks by index and
// write partials into a slot vector, so the final combination sees the same
// operands in the same shape no matter how many threads ran.

inline constexpr std::uint64_t kReductionBlock = 4096;

// Fixed-shape pairwise tree over the block partials.
double pairwise_sum(std::span<const double> values);

// Neumaier-compensated sequential sum; used inside a block.
class CompensatedAccumulator {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

// Runs fn(block_index, begin, end) over [0, total) cut into kReductionBlock
// chunks, on `workers` threads.  fn must only write to its own block's slots.
void for_each_block(std::uint64_t total, unsigned workers,
                    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn);

} // namespace divcorr
