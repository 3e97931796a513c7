#include "cascadelab/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "cascadelab/errors.hpp"
#include "cascadelab/numeric.hpp"

namespace cascade {

namespace {

struct Sampler {
    unsigned branching;
    unsigned depth;
    double leaf_scale;                 // b^{-depth}
    std::vector<double> atoms;
    std::vector<double> cum_probs;
    std::uint64_t seed;

    double pick_atom(double u) const {
        for (std::size_t i = 0; i + 1 < cum_probs.size(); ++i)
            if (u < cum_probs[i]) return atoms[i];
        return atoms.back();
    }

    // Sum of weight products over surviving leaves below `node`, whose own
    // path product is `product`.  Children of node v are v*b + 1 + j, a
    // numbering that never collides within the tree.
    double walk(std::uint64_t sample, std::uint64_t node, unsigned depth_left,
                double product) const {
        if (depth_left == 0) return product;
        double sum = 0.0;
        for (unsigned j = 0; j < branching; ++j) {
            const std::uint64_t child = node * branching + 1 + j;
            const double atom = pick_atom(rng::uniform(seed, sample, child));
            if (atom == 0.0) continue;
            sum += walk(sample, child, depth_left - 1, product * atom);
        }
        return sum;
    }

    double one_sample(std::uint64_t sample) const {
        return leaf_scale * walk(sample, 0, depth, 1.0);
    }
};

Sampler make_sampler(unsigned branching, const WeightDistribution& dist,
                     unsigned depth, std::uint64_t seed) {
    if (branching < 2) throw ConfigError("monte carlo: branching must be >= 2");
    if (checked_pow_u64(branching, depth) > kNodeCap)
        throw ResourceError("monte carlo: b^depth exceeds the node cap of 2^20");
    Sampler s;
    s.branching = branching;
    s.depth = depth;
    s.leaf_scale = std::pow(static_cast<double>(branching), -static_cast<double>(depth));
    s.atoms = dist.atoms();
    s.cum_probs.resize(dist.probs().size());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.cum_probs.size(); ++i) {
        acc += dist.probs()[i];
        s.cum_probs[i] = acc;
    }
    s.seed = seed;
    return s;
}

} // namespace

double sample_Yn(unsigned branching, const WeightDistribution& dist, unsigned depth,
                 std::uint64_t seed, std::uint64_t sample_index) {
    return make_sampler(branching, dist, depth, seed).one_sample(sample_index);
}

McEstimate estimate_moment(const McConfig& cfg, unsigned threads) {
    if (cfg.samples < 1) throw ConfigError("monte carlo: need at least one sample");
    if (cfg.batches < 2) throw ConfigError("monte carlo: need at least two batches");
    if (cfg.batches > cfg.samples)
        throw ConfigError("monte carlo: more batches than samples");
    if (!(cfg.q > 0.0)) throw ConfigError("monte carlo: q must be positive");
    const Sampler sampler = make_sampler(cfg.branching, cfg.dist, cfg.depth, cfg.seed);

    const std::uint64_t S = cfg.samples;
    const unsigned B = cfg.batches;
    std::vector<double> batch_sum(B, 0.0);
    std::vector<double> batch_max(B, 0.0);
    std::vector<std::uint64_t> batch_count(B, 0);

    auto run_batch = [&](unsigned i) {
        // Fixed partition: batch i covers [i*S/B, (i+1)*S/B).
        const std::uint64_t begin = S * i / B;
        const std::uint64_t end = S * (i + 1) / B;
        CompensatedSum sum;
        double peak = 0.0;
        for (std::uint64_t s = begin; s < end; ++s) {
            const double y = sampler.one_sample(s);
            const double t = y == 0.0 ? 0.0 : std::pow(y, cfg.q);
            sum.add(t);
            peak = std::max(peak, t);
        }
        batch_sum[i] = sum.value();
        batch_max[i] = peak;
        batch_count[i] = end - begin;
    };

    const unsigned workers = std::max(1u, std::min(threads, B));
    if (workers == 1) {
        for (unsigned i = 0; i < B; ++i) run_batch(i);
    } else {
        std::atomic<unsigned> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (unsigned i = next.fetch_add(1); i < B; i = next.fetch_add(1))
                    run_batch(i);
            });
        for (auto& t : pool) t.join();
    }

    CompensatedSum total;
    for (unsigned i = 0; i < B; ++i) total.add(batch_sum[i]);
    const double mean = total.value() / static_cast<double>(S);

    // Batch means around their own average; batch sizes differ by at most 1.
    std::vector<double> means(B);
    double mbar = 0.0;
    for (unsigned i = 0; i < B; ++i) {
        means[i] = batch_sum[i] / static_cast<double>(batch_count[i]);
        mbar += means[i];
    }
    mbar /= B;
    double ss = 0.0;
    for (unsigned i = 0; i < B; ++i) {
        const double d = means[i] - mbar;
        ss += d * d;
    }
    const double stderr_ = std::sqrt(ss / (static_cast<double>(B) * (B - 1)));

    const double peak = *std::max_element(batch_max.begin(), batch_max.end());
    const double max_share = total.value() > 0.0 ? peak / total.value() : 0.0;

    McEstimate est{};
    est.mean = mean;
    est.stderr_ = stderr_;
    est.ci_lo = mean - 1.96 * stderr_;
    est.ci_hi = mean + 1.96 * stderr_;
    est.max_share = max_share;
    est.samples_used = S;
    est.heavy_tail = max_share > 0.1;
    return est;
}

std::string mc_csv_header() { return "n,q,mean,stderr,ci_lo,ci_hi,max_share,samples,seed\n"; }

std::string mc_csv_row(const McConfig& cfg, const McEstimate& est) {
    std::string out;
    out += std::to_string(cfg.depth);
    out += ',';
    out += format_double(cfg.q);
    out += ',';
    out += format_double(est.mean);
    out += ',';
    out += format_double(est.stderr_);
    out += ',';
    out += format_double(est.ci_lo);
    out += ',';
    out += format_double(est.ci_hi);
    out += ',';
    out += format_double(est.max_share);
    out += ',';
    out += std::to_string(est.samples_used);
    out += ',';
    out += std::to_string(cfg.seed);
    out += '\n';
    return out;
}

} // namespace cascade
