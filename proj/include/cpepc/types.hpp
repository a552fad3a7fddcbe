#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cpepc {

using NodeIndex = std::uint32_t;
using ContentId = std::uint32_t;  // catalog rank, 1-based
using CommunityId = std::uint32_t;

inline constexpr NodeIndex kNoNode = static_cast<NodeIndex>(-1);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cpepc
