#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "verbsolve/category.hpp"
#include "verbsolve/corpus.hpp"
#include "verbsolve/rational.hpp"
#include "verbsolve/verbcat.hpp"

namespace verbsolve {

// All owner-or-amount bookkeeping the solver does is over these records.
// `container` is empty when the text never names an owner; `origin` is the
// sentence the state came from.
struct State {
  std::string container;
  std::string entity;
  std::optional<std::string> attribute;
  Rational quantity{0};
  int origin = 0;

  friend bool operator==(const State&, const State&) = default;
};

// A quantity moving between two containers. For PositiveTransfer the first
// container gains; for NegativeTransfer it loses. `quantity` is the sentence
// magnitude, never negated.
struct TransferEvent {
  std::string container_1;
  std::string container_2;
  std::string entity;
  Rational quantity{0};
  VerbCategory direction = VerbCategory::NegativeTransfer;

  friend bool operator==(const TransferEvent&, const TransferEvent&) = default;
};

struct QuestionTarget {
  std::string entity;  // empty when the question names none
  std::optional<std::string> attribute;
  std::optional<std::string> container;  // only set when a transfer occurred
};

enum class MainOperation { Transfer, Positive, Negative };

const char* to_string(MainOperation op);

// Cue words scanned in the question to pick addition vs subtraction when no
// transfer happened. The two sets must be disjoint.
struct IndicatorLists {
  std::set<std::string> positive;
  std::set<std::string> negative;
};

IndicatorLists load_indicators(const std::string& path);  // TSV: polarity<TAB>word
IndicatorLists default_indicators();

// ---- derivation trace ----------------------------------------------------

struct TraceStep {
  std::string rule;
  std::string inputs;
  std::vector<State> before;
  std::vector<State> after;
  std::string note;
};

struct Trace {
  std::vector<TraceStep> steps;
};

nlohmann::json state_to_json(const State& state);
nlohmann::json trace_to_json(const Trace& trace);
std::string trace_to_text(const Trace& trace);

// Final verdict for one problem. `value`, when present, is always >= 0; when
// absent, `failure` names the rule that gave up and the trace shows where.
struct Answer {
  std::optional<Rational> value;
  Trace trace;
  std::string failure;

  bool solved() const { return value.has_value(); }
};

// ---- mention extraction ----------------------------------------------------

// Containers are proper nouns (NNP), place adverbs (RBP) and resolvable
// pronouns. Entities are common nouns (NN) or the Rupee symbol; currency
// roots normalize to the symbol. A quantity binds to the latest container
// seen earlier in its sentence.
struct ContainerMention {
  int token_index = 0;
  std::string root;
  bool pronoun = false;
};

struct QuantityMention {
  int token_index = 0;
  Rational value{0};
  std::optional<std::string> container;
};

struct EntityMention {
  int token_index = 0;
  std::string root;
  std::optional<std::string> attribute;  // immediately preceding adjective
};

struct CqeExtraction {
  std::vector<ContainerMention> containers;
  std::vector<QuantityMention> quantities;
  std::vector<EntityMention> entities;
};

inline constexpr const char* kRupeeEntity = "₹";

bool is_container_pos(const std::string& pos);
bool is_entity_pos(const std::string& pos);
std::string normalize_entity_root(const std::string& root);

// Resolves each pronoun token of a problem to a container name, walking the
// problem once in reading order. A pronoun takes the first container
// reference of the nearest preceding sentence that has one, falling back to
// the first proper-noun container earlier in its own sentence. Resolved
// pronouns count as references for later pronouns.
class PronounResolver {
 public:
  explicit PronounResolver(const WordProblem& problem);

  std::optional<std::string> resolve(int sentence_index, int token_index) const;

 private:
  std::map<std::pair<int, int>, std::string> resolved_;
};

CqeExtraction extract_cqe(const Sentence& sentence);
CqeExtraction extract_cqe(const Sentence& sentence, const PronounResolver& pronouns,
                          int sentence_index);

// ---- rule pipeline ----------------------------------------------------------

// Category of each verb token, keyed by (sentence, token).
using CategoryMap = std::map<std::pair<int, int>, VerbCategory>;

// Runs the categorizer over every verb token of the body sentences.
CategoryMap categorize_problem(const WordProblem& problem, const VerbCategorizer& categorizer);

// States from the body sentences that carry no transfer verb, in narrative
// order. A state quantity is negated when the next verb after its entity is
// Negative. A quantity left without an entity inherits entity (and container,
// unless it bound one itself) from the last state.
std::vector<State> build_states(const WordProblem& problem, const CategoryMap& categories,
                                const PronounResolver* pronouns = nullptr, Trace* trace = nullptr);

struct TransferDetection {
  std::optional<TransferEvent> event;
  bool transfer_verb_present = false;
  std::string error;  // set when a transfer verb exists but no event could be built
};

TransferDetection detect_transfer(const Sentence& sentence, int sentence_index,
                                  const CqeExtraction& cqe, const CategoryMap& categories);

// Mutates the matching states (last match per container wins); a missing side
// gets a fresh state so the other container's books still balance. Returns
// false when neither container has a state with a relevant entity.
bool apply_transfer(std::vector<State>& states, const TransferEvent& event,
                    Trace* trace = nullptr, int origin_sentence = -1);

QuestionTarget parse_question(const Sentence& question, int sentence_index, bool transfer_seen,
                              const PronounResolver* pronouns = nullptr);

MainOperation determine_main_operation(const WordProblem& problem, bool transfer_seen,
                                       const IndicatorLists& indicators);

// Filters states relevant to the target (entity equality with one-sided
// attribute relaxation; first-state entity fallback when nothing matches) and
// combines them per the operation. Negative answers turn absolute.
std::optional<Rational> compute_answer(const std::vector<State>& states,
                                       const QuestionTarget& target, MainOperation op,
                                       Trace& trace, std::string* failure);

Answer solve(const WordProblem& problem, const VerbCategorizer& categorizer,
             const IndicatorLists& indicators);

}  // namespace verbsolve
