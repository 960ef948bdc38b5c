#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace glmb {

/// Track label: (birth time, birth index). Ordering is lexicographic, so
/// labels born earlier always sort first.
struct Label {
  std::int32_t birth_time = 0;
  std::int32_t birth_index = 0;

  auto operator<=>(const Label&) const = default;
};

inline std::string to_string(const Label& l) {
  return std::to_string(l.birth_time) + ":" + std::to_string(l.birth_index);
}

struct LabelHash {
  std::size_t operator()(const Label& l) const {
    return std::hash<std::uint64_t>{}(
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l.birth_time)) << 32) |
        static_cast<std::uint32_t>(l.birth_index));
  }
};

}  // namespace glmb
