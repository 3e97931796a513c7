#include "cascadelab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cascadelab/errors.hpp"
#include "cascadelab/numeric.hpp"

namespace cascade {

WeightDistribution::WeightDistribution(std::vector<double> atoms,
                                       std::vector<double> probs)
    : WeightDistribution(std::move(atoms), std::move(probs), true) {}

WeightDistribution WeightDistribution::relaxed(std::vector<double> atoms,
                                               std::vector<double> probs) {
    return WeightDistribution(std::move(atoms), std::move(probs), false);
}

WeightDistribution::WeightDistribution(std::vector<double> atoms,
                                       std::vector<double> probs,
                                       bool require_mean_one) {
    if (atoms.empty()) throw ConfigError("distribution: no atoms given");
    if (atoms.size() != probs.size())
        throw ConfigError("distribution: atoms and probs have different lengths");

    // Merge exact duplicates, keep atoms sorted ascending.
    std::map<double, double> merged;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i] >= 0.0) || !std::isfinite(atoms[i]))
            throw ConfigError("distribution: atom " + format_double(atoms[i]) +
                              " is not a finite non-negative number");
        if (!(probs[i] > 0.0) || probs[i] > 1.0)
            throw ConfigError("distribution: probability " + format_double(probs[i]) +
                              " outside (0, 1]");
        merged[atoms[i]] += probs[i];
    }
    double psum = 0.0;
    for (auto& [a, p] : merged) {
        atoms_.push_back(a);
        probs_.push_back(p);
        psum += p;
    }
    if (std::abs(psum - 1.0) > kProbSumTol)
        throw ConfigError("distribution: probabilities sum to " +
                          format_double(psum) + ", expected 1");

    const double mu = mean();
    mean_is_one_ = std::abs(mu - 1.0) <= kMeanTol;
    if (require_mean_one && !mean_is_one_)
        throw ConfigError("distribution: mean is " + format_double(mu) +
                          ", expected 1 (inputs are rejected, not rescaled)");
}

double WeightDistribution::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) s += atoms_[i] * probs_[i];
    return s;
}

double WeightDistribution::variance() const {
    const double mu = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const double d = atoms_[i] - mu;
        s += d * d * probs_[i];
    }
    return s;
}

double WeightDistribution::moment(double q) const {
    if (q < 0.0) throw ConfigError("moment: q must be >= 0");
    if (q == 0.0) return 1.0;
    double s = 0.0;
    bool overflow = false;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i] == 0.0) continue;
        const double t = std::pow(atoms_[i], q) * probs_[i];
        if (!std::isfinite(t)) {
            overflow = true;
            break;
        }
        s += t;
    }
    if (!overflow) return s;
    return std::exp(log_moment(q));
}

double WeightDistribution::log_moment(double q) const {
    if (q < 0.0) throw ConfigError("moment: q must be >= 0");
    if (q == 0.0) return 0.0;
    double acc = kNegInf;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i] == 0.0) continue;
        acc = log_add(acc, q * std::log(atoms_[i]) + std::log(probs_[i]));
    }
    return acc;
}

double WeightDistribution::mean_w_log_w() const {
    double s = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i] == 0.0) continue;
        s += atoms_[i] * std::log(atoms_[i]) * probs_[i];
    }
    return s;
}

double WeightDistribution::centered_norm_ratio(double q) const {
    const double v = variance();
    if (v == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double mu = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        s += std::pow(std::abs(atoms_[i] - mu), q) * probs_[i];
    return std::pow(s, 1.0 / q) / std::sqrt(v);
}

WeightDistribution WeightDistribution::power_law(unsigned e) const {
    if (e == 0) throw ConfigError("power_law: exponent must be >= 1");
    std::vector<double> a(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) a[i] = ipow(atoms_[i], e);
    return relaxed(std::move(a), probs_);
}

std::string WeightDistribution::to_literal() const {
    std::ostringstream os;
    os << "atoms=";
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        os << (i ? "," : "") << format_double(atoms_[i]);
    os << ";probs=";
    for (std::size_t i = 0; i < probs_.size(); ++i)
        os << (i ? "," : "") << format_double(probs_[i]);
    return os.str();
}

std::string WeightDistribution::to_json() const {
    nlohmann::ordered_json j;
    j["atoms"] = atoms_;
    j["probs"] = probs_;
    return j.dump();
}

namespace {

[[noreturn]] void literal_fail(const std::string& text, std::size_t pos,
                               const std::string& what) {
    throw ConfigError("distribution literal: " + what + " at position " +
                      std::to_string(pos) + " in \"" + text + "\"");
}

std::vector<double> parse_number_list(const std::string& text, std::size_t& pos,
                                      char terminator) {
    std::vector<double> out;
    while (true) {
        double value{};
        auto res = std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (res.ec != std::errc())
            literal_fail(text, pos, "expected a number");
        pos = static_cast<std::size_t>(res.ptr - text.data());
        out.push_back(value);
        if (pos == text.size() || text[pos] == terminator) return out;
        if (text[pos] != ',') {
            if (terminator == '\0')
                literal_fail(text, pos,
                             "expected ',' or end of input (trailing characters "
                             "are not allowed)");
            literal_fail(text, pos, std::string("expected ',' or '") + terminator + "'");
        }
        ++pos;
    }
}

} // namespace

WeightDistribution WeightDistribution::parse_literal(const std::string& text,
                                                     bool require_mean_one) {
    std::size_t pos = 0;
    const std::string atoms_key = "atoms=";
    if (text.compare(0, atoms_key.size(), atoms_key) != 0)
        literal_fail(text, pos, "expected 'atoms='");
    pos += atoms_key.size();
    std::vector<double> atoms = parse_number_list(text, pos, ';');
    if (pos == text.size() || text[pos] != ';')
        literal_fail(text, pos, "expected ';' after atom list");
    ++pos;
    const std::string probs_key = "probs=";
    if (text.compare(pos, probs_key.size(), probs_key) != 0)
        literal_fail(text, pos, "expected 'probs='");
    pos += probs_key.size();
    std::vector<double> probs = parse_number_list(text, pos, '\0');
    if (pos != text.size())
        literal_fail(text, pos, "trailing characters after probability list");
    return WeightDistribution(std::move(atoms), std::move(probs), require_mean_one);
}

WeightDistribution WeightDistribution::parse_json(const std::string& text,
                                                  bool require_mean_one) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("distribution json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("atoms") || !j.contains("probs"))
        throw ConfigError("distribution json: expected {\"atoms\":[...],\"probs\":[...]}");
    std::vector<double> atoms = j.at("atoms").get<std::vector<double>>();
    std::vector<double> probs = j.at("probs").get<std::vector<double>>();
    return WeightDistribution(std::move(atoms), std::move(probs), require_mean_one);
}

} // namespace cascade
