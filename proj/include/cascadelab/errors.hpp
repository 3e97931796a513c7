#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

// Bad user input: malformed literals, invalid parameter combinations.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation exceeds a hard resource cap (node counts,
// enumeration size, table dimensions). Distinct from ConfigError so the
// CLI can map it to its own exit code.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// An operation's mathematical precondition fails (e.g. a reduction step
// applied where its validity condition does not hold).
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cascade
