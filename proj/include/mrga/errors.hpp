#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mrga {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid parameters, dimension mismatches, unknown objective names.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
public:
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

/// Population too small to evolve (cannot keep >=2 survivors and breed).
class DegeneratePopulationError : public Error {
public:
    explicit DegeneratePopulationError(const std::string& msg) : Error(msg) {}
};

/// File and format failures: unreadable paths, bad magic, truncated records.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// A map or reduce task failed; the job is aborted fail-fast.
class JobError : public Error {
public:
    explicit JobError(const std::string& msg) : Error(msg) {}
};

/// Estimated memory footprint exceeds a configured limit.
class ResourceLimitError : public Error {
public:
    ResourceLimitError(const std::string& msg, std::uint64_t estimated_bytes,
                       std::uint64_t limit_bytes)
        : Error(msg), estimated_bytes(estimated_bytes), limit_bytes(limit_bytes) {}

    std::uint64_t estimated_bytes;
    std::uint64_t limit_bytes;
};

}  // namespace mrga
