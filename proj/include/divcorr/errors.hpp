#pragma once

#include <stdexcept>
#include <string>

namespace divcorr {

// Exit-code taxonomy used by the CLI: 0 ok, 2 config, 3 range, 4 capacity,
// 5 math degeneracy.
enum class ErrorCategory : int {
    config     = 2,
    range      = 3,
    capacity   = 4,
    degeneracy = 5,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

  private:
    ErrorCategory category_;
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCategory::config, msg) {}
};

class RangeError : public Error {
  public:
    explicit RangeError(const std::string& msg) : Error(ErrorCategory::range, msg) {}
};

class CapacityError : public Error {
  public:
    explicit CapacityError(const std::string& msg) : Error(ErrorCategory::capacity, msg) {}
};

// Brute-force enumeration exceeded its work cap.  Kept distinct from
// mathematical degeneracy so callers can tell "too expensive" from "undefined".
class WorkCapError : public CapacityError {
  public:
    explicit WorkCapError(const std::string& msg) : CapacityError(msg) {}
};

class DegeneracyError : public Error {
  public:
    explicit DegeneracyError(const std::string& msg) : Error(ErrorCategory::degeneracy, msg) {}
};

// Product over primes need not converge for such systems.
class InfiniteComplexityError : public DegeneracyError {
  public:
    explicit InfiniteComplexityError(const std::string& msg) : DegeneracyError(msg) {}
};

} // namespace divcorr
