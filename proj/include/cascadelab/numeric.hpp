#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace cascade {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; -inf encodes zero.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

inline double log_add(const std::vector<double>& terms) {
    double acc = kNegInf;
    for (double t : terms) acc = log_add(acc, t);
    return acc;
}

// Neumaier variant of Kahan summation. Used wherever a fixed summation
// order must give bit-identical totals regardless of thread count.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// x^n for integer n >= 0 by squaring; exact for the scalar types we use.
template <class T>
T ipow(T x, std::uint64_t n) {
    T result(1);
    T base = x;
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

// b^e as a saturating count, for resource-cap checks (returns UINT64_MAX
// on overflow instead of wrapping).
inline std::uint64_t checked_pow_u64(std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        if (b != 0 && r > std::numeric_limits<std::uint64_t>::max() / b)
            return std::numeric_limits<std::uint64_t>::max();
        r *= b;
    }
    return r;
}

// Shortest round-trip decimal for a double. All file output goes through
// this so artifacts are byte-stable across runs and platforms with the
// same floating-point results.
std::string format_double(double x);

} // namespace cascade
