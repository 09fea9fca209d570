#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "verbsolve/corpus.hpp"
#include "verbsolve/metrics.hpp"
#include "verbsolve/solver.hpp"
#include "verbsolve/verbcat.hpp"

namespace verbsolve {

enum class CategorizerMethod { Lexicon, Knn, Linear };

const char* to_string(CategorizerMethod method);

// What gets shuffled into folds: whole problems (default, no verb of a test
// problem ever trains the fold) or individual verb occurrences.
enum class FoldUnit { ByProblem, BySample };

enum class FailureTag { Unsolvable, WrongAnswer };

const char* to_string(FailureTag tag);

struct SolverFailure {
  std::string problem_id;
  FailureTag tag = FailureTag::Unsolvable;
  std::string detail;
  Trace trace;
};

struct FoldScore {
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  std::size_t support = 0;
};

enum class ReportKind { Verbcat, Solver };

struct EvalReport {
  ReportKind kind = ReportKind::Verbcat;

  // verb categorization cross-validation
  std::string method;
  int k = 0;
  std::uint64_t seed = 0;
  std::string fold_unit;
  std::vector<FoldScore> folds;
  double mean_weighted_f1 = 0.0;
  double mean_macro_f1 = 0.0;
  ConfusionMatrix confusion{};  // pooled over folds
  std::size_t total_occurrences = 0;

  // solver accuracy
  std::size_t total_problems = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::vector<SolverFailure> failures;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

// k-fold cross-validation of verb categorization. Gold labels come from the
// lexicon (NA when absent); the lexicon also supplies training labels, but
// fold models never consult it at prediction time, so no test label leaks.
// Within a fold, predictions for out-of-coverage verbs fall back to
// Observation. Deterministic for a fixed seed.
EvalReport run_verbcat_cv(const std::vector<WordProblem>& problems, const VerbLexicon& lexicon,
                          const EmbeddingTable& embeddings, CategorizerMethod method, int k,
                          std::uint64_t seed, FoldUnit unit = FoldUnit::ByProblem,
                          const LinearHyperparams& hyper = {});

// Solves every problem and compares exactly (rational equality) against
// gold_answer, which every problem must carry. Failures keep their traces for
// inspection.
EvalReport run_solver_eval(const std::vector<WordProblem>& problems,
                           const VerbCategorizer& categorizer, const IndicatorLists& indicators);

}  // namespace verbsolve
