#include "cascadelab/numeric.hpp"

#include <charconv>
#include <cmath>

namespace cascade {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (x == kPosInf) return "inf";
    if (x == kNegInf) return "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace cascade
