#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace verbsolve {

// Semantic verb classes that drive the solver arithmetic. Declaration order
// doubles as the tie-break order wherever a classifier has to pick between
// equally scored classes.
enum class VerbCategory {
  Observation = 0,   // states a quantity, no change
  Positive,          // quantity increases in place
  Negative,          // quantity decreases in place
  PositiveTransfer,  // quantity moves from the second container to the first
  NegativeTransfer,  // quantity moves from the first container to the second
  NA,                // no arithmetic meaning
};

inline constexpr std::size_t kCategoryCount = 6;

inline constexpr std::array<VerbCategory, kCategoryCount> kAllCategories = {
    VerbCategory::Observation,      VerbCategory::Positive,
    VerbCategory::Negative,         VerbCategory::PositiveTransfer,
    VerbCategory::NegativeTransfer, VerbCategory::NA,
};

inline constexpr std::string_view to_string_view(VerbCategory c) {
  switch (c) {
    case VerbCategory::Observation: return "Observation";
    case VerbCategory::Positive: return "Positive";
    case VerbCategory::Negative: return "Negative";
    case VerbCategory::PositiveTransfer: return "PositiveTransfer";
    case VerbCategory::NegativeTransfer: return "NegativeTransfer";
    case VerbCategory::NA: return "NA";
  }
  return "NA";
}

inline std::string to_string(VerbCategory c) { return std::string(to_string_view(c)); }

inline std::optional<VerbCategory> category_from_string(std::string_view name) {
  for (VerbCategory c : kAllCategories) {
    if (to_string_view(c) == name) return c;
  }
  return std::nullopt;
}

inline constexpr bool is_transfer(VerbCategory c) {
  return c == VerbCategory::PositiveTransfer || c == VerbCategory::NegativeTransfer;
}

}  // namespace verbsolve
