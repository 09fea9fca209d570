#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "verbsolve/category.hpp"
#include "verbsolve/rational.hpp"

namespace verbsolve {

// One annotated word. `number` is derived at load time for numeral tokens
// (POS tag QC), after Devanagari digit normalization; it is not serialized.
struct Token {
  int index = 0;
  std::string surface;
  std::string root;
  std::string pos;
  std::string dep;
  std::optional<Rational> number;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  bool is_question = false;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct WordProblem {
  std::string id;
  std::vector<Sentence> sentences;
  std::optional<Rational> gold_answer;
  std::optional<std::string> gold_equation;

  // Index of the question sentence, -1 when absent. Loaded problems always
  // have exactly one; hand-built ones may not.
  int question_index() const;
  const Sentence& question() const;  // throws Error when absent

  friend bool operator==(const WordProblem&, const WordProblem&) = default;
};

struct VerbLexicon {
  std::map<std::string, VerbCategory> entries;

  std::optional<VerbCategory> lookup(const std::string& root) const;
};

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::unordered_map<std::string, std::vector<float>> vectors;

  const std::vector<float>* lookup(const std::string& word) const;
};

struct LoadOptions {
  // When set, a problem with no question flag gets its last sentence that
  // carries a question cue (WQ tag, a question word, or "?") marked instead
  // of being rejected.
  bool auto_flag_question = false;
};

// JSON-lines loader. Every line is one problem:
//   {"id": ..., "sentences": [{"is_question": bool, "tokens": [
//       {"surface":..., "root":..., "pos":..., "dep":...}, ...]}],
//    "gold_answer"?: int|string, "gold_equation"?: string}
// Errors carry the offending line number. Exactly one question per problem.
std::vector<WordProblem> load_problems(const std::string& path, const LoadOptions& options = {});

std::string problem_to_json_line(const WordProblem& problem);
void save_problems(const std::string& path, const std::vector<WordProblem>& problems);

// TSV: root<TAB>category. Blank lines and lines starting with '#' are
// skipped. Duplicate roots must agree on the category.
VerbLexicon load_lexicon(const std::string& path);

// Text vectors, one "word v1 ... vd" per line. dimension == 0 infers the
// width from the first data row; a leading "<count> <dim>" header row is
// accepted and skipped. Later duplicates win and are reported via warnings.
EmbeddingTable load_embeddings(const std::string& path, std::size_t dimension = 0,
                               std::vector<std::string>* warnings = nullptr);

// Shuffles [0, count) with the given seed and cuts k folds whose sizes differ
// by at most one (larger folds first). Fold contents are sorted ascending.
std::vector<std::vector<std::size_t>> split_kfold(std::size_t count, int k, std::uint64_t seed);
std::vector<std::vector<std::size_t>> split_kfold(const std::vector<WordProblem>& problems,
                                                  int k, std::uint64_t seed);

}  // namespace verbsolve
