#pragma once

#include <stdexcept>
#include <string>

namespace gossip_age {

/// Invalid user-facing configuration: topology parameters, simulation
/// settings, or malformed config files.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A request exceeds an enumeration or table-size cap.
class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

/// A precondition on an operation's arguments does not hold
/// (wrong topology kind, empty subset, out-of-range size, ...).
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

/// Internal consistency failure; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

[[noreturn]] void throw_internal(const char* file, int line, const std::string& msg);

}  // namespace gossip_age

#define GOSSIP_AGE_ASSERT(cond, msg)                               \
  do {                                                             \
    if (!(cond)) ::gossip_age::throw_internal(__FILE__, __LINE__, msg); \
  } while (0)
