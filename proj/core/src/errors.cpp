#include "gossip_age/errors.hpp"

#include <fmt/format.h>

namespace gossip_age {

void throw_internal(const char* file, int line, const std::string& msg) {
  throw InternalError(fmt::format("{}:{}: {}", file, line, msg));
}

}  // namespace gossip_age
