#include "cascadelab/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace cascade {

double exact_moment_by_enumeration(const EnumeratedSpace<double>& space,
                                   const std::vector<double>& alpha, double q,
                                   unsigned threads) {
    if (!(q > 0.0)) throw ConfigError("enumeration: q must be positive");
    if (alpha.size() != space.shape().vertex_count())
        throw ConfigError("enumeration: coefficient count does not match vertex count");
    const std::uint64_t n = space.outcome_count();

    constexpr std::uint64_t kChunk = 1 << 14;
    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(begin + kChunk, n);
        CompensatedSum sum;
        for (std::uint64_t o = begin; o < end; ++o) {
            const double theta = space.theta_value(alpha, o);
            const double powed = theta == 0.0 ? 0.0 : std::pow(theta, q);
            sum.add(space.outcome_probability(o) * powed);
        }
        partial[c] = sum.value();
    };

    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (workers == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t c = next.fetch_add(1); c < chunks;
                     c = next.fetch_add(1))
                    run_chunk(c);
            });
        for (auto& t : pool) t.join();
    }
    // Chunk boundaries and the combination order are fixed, so the result
    // does not depend on the worker count.
    CompensatedSum total;
    for (double p : partial) total.add(p);
    return total.value();
}

} // namespace cascade
