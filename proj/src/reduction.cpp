#include "divcorr/reduction.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace divcorr {

double pairwise_sum(std::span<const double> values) {
    if (values.empty()) return 0.0;
    if (values.size() == 1) return values[0];
    std::size_t half = values.size() / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

void for_each_block(std::uint64_t total, unsigned workers,
                    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
    std::uint64_t blocks = (total + kReductionBlock - 1) / kReductionBlock;
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b)
            fn(b, b * kReductionBlock, std::min(total, (b + 1) * kReductionBlock));
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::uint64_t b = next.fetch_add(1);
            if (b >= blocks) break;
            fn(b, b * kReductionBlock, std::min(total, (b + 1) * kReductionBlock));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace divcorr
