#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "verbsolve/category.hpp"

namespace verbsolve {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold occurrences of the class
};

using ConfusionMatrix = std::array<std::array<std::size_t, kCategoryCount>, kCategoryCount>;

struct F1Report {
  std::array<ClassMetrics, kCategoryCount> per_class{};
  double weighted_f1 = 0.0;  // support-weighted mean, the headline number
  double macro_f1 = 0.0;     // unweighted mean over classes seen in gold or predictions
  double accuracy = 0.0;
  ConfusionMatrix confusion{};  // [gold][predicted]
  std::size_t total = 0;
};

// Paired predictions and gold labels; both vectors must be the same,
// non-zero length. Classes absent from both sides score zero and are left
// out of the macro average.
F1Report evaluate_f1(const std::vector<VerbCategory>& predicted,
                     const std::vector<VerbCategory>& gold);

// Fleiss' kappa over an items x categories count matrix: counts[i][j] is the
// number of raters that put item i in category j. Every row must sum to the
// same rating count (>= 2). Expected agreement of exactly 1 makes kappa
// undefined and raises an error.
double fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts);

}  // namespace verbsolve
