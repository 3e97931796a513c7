#pragma once

#include <cstdint>
#include <string>

#include "cascadelab/distribution.hpp"

namespace cascade {

// Stateless counter-based random streams: every (seed, sample, node) triple
// maps to one uniform deviate through an integer mixing function, so any
// scheduler produces the same draws and pruned subtrees never perturb the
// rest of the sample.
namespace rng {

inline std::uint64_t mix64(std::uint64_t h) {
    h ^= h >> 30;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 27;
    h *= 0x94D049BB133111EBull;
    h ^= h >> 31;
    return h;
}

// Uniform in [0, 1) for the given node of the given sample.
inline double uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t node) {
    std::uint64_t h = mix64(seed ^ (0x9E3779B97F4A7C15ull * (sample + 1)));
    h = mix64(h ^ (0xD1B54A32D192ED03ull * (node + 1)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace rng

inline constexpr std::uint64_t kNodeCap = std::uint64_t(1) << 20;

struct McConfig {
    unsigned branching;
    WeightDistribution dist;
    unsigned depth;
    double q;
    std::uint64_t seed;
    std::uint64_t samples;
    unsigned batches = 32;
};

struct McEstimate {
    double mean;
    double stderr_;           // batch-means standard error
    double ci_lo;             // mean -/+ 1.96 * stderr
    double ci_hi;
    double max_share;         // largest single sample's share of the sum
    std::uint64_t samples_used;
    bool heavy_tail;          // max_share > 0.1: confidence interval suspect
};

// One realization of the depth-n cascade average: depth-first walk of the
// b-ary tree carrying the running weight product, accumulating
// b^{-n} * product at each leaf.  Subtrees under a zero factor are skipped
// entirely (their leaves contribute nothing), which makes sparse laws cheap.
// Refuses when b^depth exceeds the node cap.
double sample_Yn(unsigned branching, const WeightDistribution& dist, unsigned depth,
                 std::uint64_t seed, std::uint64_t sample_index);

// Mean of Y_n^q over cfg.samples draws with batch-means error bars.  Batches
// partition the sample indices by fixed arithmetic on (samples, batches) and
// are combined in batch order, so results are bit-identical for any number
// of worker threads.
McEstimate estimate_moment(const McConfig& cfg, unsigned threads = 1);

std::string mc_csv_header();
std::string mc_csv_row(const McConfig& cfg, const McEstimate& est);

} // namespace cascade
