#pragma once

#include <array>
#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "verbsolve/category.hpp"
#include "verbsolve/corpus.hpp"

namespace verbsolve {

inline bool is_verb_pos(const std::string& pos) { return pos == "VM" || pos == "VAUX"; }

struct VerbOccurrence {
  std::string problem_id;
  int sentence_index = 0;
  int token_index = 0;
  std::string root;
  std::string surface;
};

// Every VM/VAUX token of the problem, question sentence included, in reading
// order.
std::vector<VerbOccurrence> find_verb_occurrences(const WordProblem& problem);

// ---- lexicon lookup --------------------------------------------------------

std::optional<VerbCategory> categorize_lexicon(const VerbOccurrence& occurrence,
                                               const VerbLexicon& lexicon);

// ---- nearest neighbour over embeddings -------------------------------------

// 1 - cos(a, b); 2.0 when either vector is all zeros.
double cosine_distance(const std::vector<float>& a, const std::vector<float>& b);

using LabeledRoot = std::pair<std::string, VerbCategory>;

// 1-NN by cosine distance over the training roots that have a vector. A query
// root that itself appears in the training set (and has a vector) returns its
// own label: distance zero beats everything regardless of scan order. Other
// ties go to the lowest training index. Throws OovError when the query has no
// vector; Error when the training set is empty or fully uncovered.
VerbCategory categorize_knn(const std::string& root, const EmbeddingTable& table,
                            const std::vector<LabeledRoot>& train);
VerbCategory categorize_knn(const VerbOccurrence& occurrence, const EmbeddingTable& table,
                            const std::vector<LabeledRoot>& train);

// Lexicon entries as training pairs, in root order.
std::vector<LabeledRoot> lexicon_train_pairs(const VerbLexicon& lexicon);

// ---- context-window features -----------------------------------------------

// Up to 3 tokens either side of the verb, clipped at sentence bounds.
struct ContextWindow {
  std::vector<Token> slots;
  int verb_slot = 0;  // index into slots
};

ContextWindow extract_window(const Sentence& sentence, int verb_index);  // std::out_of_range

enum class TokenField { Surface = 0, Root, Pos, Dep };

inline constexpr std::array<TokenField, 4> kAllTokenFields = {
    TokenField::Surface, TokenField::Root, TokenField::Pos, TokenField::Dep};

const char* token_field_name(TokenField field);
std::optional<TokenField> token_field_from_name(const std::string& name);

// One sparse binary feature: "the token at `offset` from the verb has this
// `field` value". Empty values produce no feature.
struct FeatureKey {
  int offset = 0;
  TokenField field = TokenField::Surface;
  std::string value;

  auto operator<=>(const FeatureKey&) const = default;
};

class FeatureVocabulary {
 public:
  // Indices are assigned in first-seen order, so the same window sequence
  // always yields the same vocabulary.
  void add_window(const ContextWindow& window);
  std::size_t size() const { return keys_.size(); }
  std::optional<std::size_t> index_of(const FeatureKey& key) const;
  const std::vector<FeatureKey>& keys() const { return keys_; }

 private:
  std::map<FeatureKey, std::size_t> index_;
  std::vector<FeatureKey> keys_;
};

struct FeatureVector {
  std::vector<std::size_t> indices;  // sorted, unique, all < vocabulary size
};

// Unseen features are dropped, so featurizing is total.
FeatureVector featurize(const ContextWindow& window, const FeatureVocabulary& vocabulary);

// ---- multinomial logistic regression ----------------------------------------

struct LinearHyperparams {
  double learning_rate = 0.1;
  int epochs = 200;
  double l2 = 1e-4;
};

struct LinearModel {
  std::size_t feature_count = 0;
  std::array<std::vector<double>, kCategoryCount> weights;
  std::array<double, kCategoryCount> bias{};
  LinearHyperparams hyper;
};

// Full-batch gradient descent from zero initialization: training is
// deterministic with no RNG involved. Mean cross-entropy plus L2 on the
// weights (biases unregularized). Requires at least two distinct labels.
// loss_history, when given, receives the loss at the start of each epoch.
LinearModel train_linear(const std::vector<std::pair<FeatureVector, VerbCategory>>& samples,
                         std::size_t feature_count, const LinearHyperparams& hyper = {},
                         std::vector<double>* loss_history = nullptr);

std::array<double, kCategoryCount> predict_proba(const LinearModel& model,
                                                 const FeatureVector& features);
// Argmax; exact ties resolve to the earliest declared category.
VerbCategory predict_linear(const LinearModel& model, const FeatureVector& features);

// Versioned flat-file round trip for the model plus its vocabulary.
void save_linear_model(const std::string& path, const LinearModel& model,
                       const FeatureVocabulary& vocabulary);
std::pair<LinearModel, FeatureVocabulary> load_linear_model(const std::string& path);

// ---- prefix samples ----------------------------------------------------------

enum class PrefixMode {
  RestartAtSentence,  // tokens from the verb's own sentence start (default)
  FullPrefix,         // tokens from the start of the problem
};

// One sample per verb occurrence: the token prefix ending at the verb, labeled
// by lexicon lookup (NA when absent).
struct PrefixSample {
  std::vector<Token> tokens;
  VerbCategory label = VerbCategory::NA;
  std::string problem_id;
  int sentence_index = 0;
  int token_index = 0;
};

std::vector<PrefixSample> extract_prefix_samples(const WordProblem& problem,
                                                 const VerbLexicon& lexicon,
                                                 PrefixMode mode = PrefixMode::RestartAtSentence);

// {"text": [surfaces...], "label": "<category>"}
std::string prefix_sample_to_json_line(const PrefixSample& sample);
void export_prefix_samples(const std::string& path, const std::vector<PrefixSample>& samples);

// ---- uniform categorizer interface -------------------------------------------

// Total by construction: every implementation answers for every verb token,
// marking `fallback` when it had to leave its primary signal.
class VerbCategorizer {
 public:
  struct Result {
    VerbCategory category = VerbCategory::Observation;
    bool fallback = false;
  };

  virtual ~VerbCategorizer() = default;
  virtual Result categorize(const WordProblem& problem, int sentence_index,
                            int token_index) const = 0;
  virtual std::string name() const = 0;
};

class LexiconCategorizer final : public VerbCategorizer {
 public:
  explicit LexiconCategorizer(const VerbLexicon& lexicon) : lexicon_(&lexicon) {}
  Result categorize(const WordProblem& problem, int sentence_index,
                    int token_index) const override;
  std::string name() const override { return "lexicon"; }

 private:
  const VerbLexicon* lexicon_;
};

// Fallback chain on OOV: lexicon (when supplied), then Observation.
class KnnCategorizer final : public VerbCategorizer {
 public:
  KnnCategorizer(const EmbeddingTable& table, std::vector<LabeledRoot> train,
                 const VerbLexicon* fallback_lexicon = nullptr)
      : table_(&table), train_(std::move(train)), lexicon_(fallback_lexicon) {}
  Result categorize(const WordProblem& problem, int sentence_index,
                    int token_index) const override;
  std::string name() const override { return "knn"; }

 private:
  const EmbeddingTable* table_;
  std::vector<LabeledRoot> train_;
  const VerbLexicon* lexicon_;
};

class LinearCategorizer final : public VerbCategorizer {
 public:
  LinearCategorizer(const LinearModel& model, const FeatureVocabulary& vocabulary)
      : model_(&model), vocabulary_(&vocabulary) {}
  Result categorize(const WordProblem& problem, int sentence_index,
                    int token_index) const override;
  std::string name() const override { return "linear"; }

 private:
  const LinearModel* model_;
  const FeatureVocabulary* vocabulary_;
};

}  // namespace verbsolve
