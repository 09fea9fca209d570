#include "verbsolve/metrics.hpp"

#include <cmath>

#include "verbsolve/error.hpp"

namespace verbsolve {

F1Report evaluate_f1(const std::vector<VerbCategory>& predicted,
                     const std::vector<VerbCategory>& gold) {
  if (predicted.size() != gold.size()) {
    throw Error("evaluate_f1: predicted and gold lengths differ");
  }
  if (gold.empty()) throw Error("evaluate_f1: empty input");

  F1Report report;
  report.total = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = static_cast<std::size_t>(gold[i]);
    const auto p = static_cast<std::size_t>(predicted[i]);
    ++report.confusion[g][p];
  }

  double weighted_sum = 0.0;
  double macro_sum = 0.0;
  std::size_t macro_classes = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    std::size_t tp = report.confusion[c][c];
    std::size_t gold_count = 0, pred_count = 0;
    for (std::size_t o = 0; o < kCategoryCount; ++o) {
      gold_count += report.confusion[c][o];
      pred_count += report.confusion[o][c];
    }
    ClassMetrics& m = report.per_class[c];
    m.support = gold_count;
    m.precision = pred_count ? static_cast<double>(tp) / static_cast<double>(pred_count) : 0.0;
    m.recall = gold_count ? static_cast<double>(tp) / static_cast<double>(gold_count) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    weighted_sum += static_cast<double>(m.support) * m.f1;
    if (gold_count > 0 || pred_count > 0) {
      macro_sum += m.f1;
      ++macro_classes;
    }
  }
  report.weighted_f1 = weighted_sum / static_cast<double>(report.total);
  report.macro_f1 = macro_classes ? macro_sum / static_cast<double>(macro_classes) : 0.0;
  std::size_t diagonal = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) diagonal += report.confusion[c][c];
  report.accuracy = static_cast<double>(diagonal) / static_cast<double>(report.total);
  return report;
}

double fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts) {
  if (counts.empty()) throw Error("fleiss_kappa: no items");
  const std::size_t categories = counts[0].size();
  if (categories == 0) throw Error("fleiss_kappa: no categories");

  std::size_t raters = 0;
  for (const auto& row : counts) {
    if (row.size() != categories) throw Error("fleiss_kappa: ragged count matrix");
    std::size_t sum = 0;
    for (std::size_t v : row) sum += v;
    if (raters == 0) {
      raters = sum;
    } else if (sum != raters) {
      throw Error("fleiss_kappa: rows have different rating counts");
    }
  }
  if (raters < 2) throw Error("fleiss_kappa: need at least 2 ratings per item");

  const double n = static_cast<double>(raters);
  const double items = static_cast<double>(counts.size());
  double p_bar = 0.0;
  std::vector<double> pj(categories, 0.0);
  for (const auto& row : counts) {
    double agree = 0.0;
    for (std::size_t j = 0; j < categories; ++j) {
      const double nij = static_cast<double>(row[j]);
      agree += nij * nij;
      pj[j] += nij;
    }
    p_bar += (agree - n) / (n * (n - 1.0));
  }
  p_bar /= items;
  double p_e = 0.0;
  for (double& v : pj) {
    v /= items * n;
    p_e += v * v;
  }
  if (std::fabs(1.0 - p_e) < 1e-12) {
    throw Error("fleiss_kappa: expected agreement is 1, kappa undefined");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

}  // namespace verbsolve
