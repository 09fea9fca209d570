#include "verbsolve/solver.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "verbsolve/error.hpp"

namespace verbsolve {

const char* to_string(MainOperation op) {
  switch (op) {
    case MainOperation::Transfer: return "Transfer";
    case MainOperation::Positive: return "Positive";
    case MainOperation::Negative: return "Negative";
  }
  return "Positive";
}

bool is_container_pos(const std::string& pos) { return pos == "NNP" || pos == "RBP"; }

bool is_entity_pos(const std::string& pos) { return pos == "NN"; }

std::string normalize_entity_root(const std::string& root) {
  static const char* kCurrencyRoots[] = {"paisa", "keemat", "laagat", "rupay"};
  for (const char* r : kCurrencyRoots) {
    if (root == r) return kRupeeEntity;
  }
  return root;
}

namespace {

bool is_entity_token(const Token& token) {
  return is_entity_pos(token.pos) || token.root == kRupeeEntity || token.surface == kRupeeEntity;
}

std::string state_brief(const State& s) {
  std::string out = "(";
  out += s.container.empty() ? "-" : s.container;
  out += ", " + s.entity;
  if (s.attribute) out += "[" + *s.attribute + "]";
  out += ", " + to_string(s.quantity) + ")";
  return out;
}

void add_step(Trace* trace, std::string rule, std::string inputs, const std::vector<State>& before,
              const std::vector<State>& after, std::string note) {
  if (!trace) return;
  trace->steps.push_back({std::move(rule), std::move(inputs), before, after, std::move(note)});
}

// Entity identity with one-sided attribute relaxation: an attribute missing
// on either side does not block the match.
bool entity_relevant(const std::string& state_entity, const std::optional<std::string>& state_attr,
                     const std::string& target_entity,
                     const std::optional<std::string>& target_attr) {
  if (normalize_entity_root(state_entity) != normalize_entity_root(target_entity)) return false;
  if (state_attr && target_attr) return *state_attr == *target_attr;
  return true;
}

}  // namespace

// ---- pronoun resolution -----------------------------------------------------

PronounResolver::PronounResolver(const WordProblem& problem) {
  std::vector<std::optional<std::string>> sentence_ref(problem.sentences.size());
  for (std::size_t s = 0; s < problem.sentences.size(); ++s) {
    std::optional<std::string> current;    // first proper noun or resolved pronoun
    std::optional<std::string> first_nnp;  // same-sentence fallback antecedent
    const auto& tokens = problem.sentences[s].tokens;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const Token& tok = tokens[t];
      if (tok.pos == "NNP") {
        if (!first_nnp) first_nnp = tok.root;
        if (!current) current = tok.root;
      } else if (tok.pos == "PRP") {
        std::optional<std::string> antecedent;
        for (int prev = static_cast<int>(s) - 1; prev >= 0 && !antecedent; --prev) {
          antecedent = sentence_ref[static_cast<std::size_t>(prev)];
        }
        if (!antecedent) antecedent = first_nnp;
        if (antecedent) {
          resolved_[{static_cast<int>(s), static_cast<int>(t)}] = *antecedent;
          if (!current) current = *antecedent;
        }
      }
    }
    sentence_ref[s] = current;
  }
}

std::optional<std::string> PronounResolver::resolve(int sentence_index, int token_index) const {
  auto it = resolved_.find({sentence_index, token_index});
  if (it == resolved_.end()) return std::nullopt;
  return it->second;
}

// ---- mention extraction -----------------------------------------------------

namespace {

CqeExtraction extract_impl(const Sentence& sentence, const PronounResolver* pronouns,
                           int sentence_index) {
  CqeExtraction out;
  std::optional<std::string> last_container;
  const auto& tokens = sentence.tokens;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const Token& tok = tokens[t];
    if (is_container_pos(tok.pos)) {
      out.containers.push_back({static_cast<int>(t), tok.root, false});
      last_container = tok.root;
    } else if (tok.pos == "PRP" && pronouns) {
      if (auto target = pronouns->resolve(sentence_index, static_cast<int>(t))) {
        out.containers.push_back({static_cast<int>(t), *target, true});
        last_container = *target;
      }
    }
    if (tok.number) {
      out.quantities.push_back({static_cast<int>(t), *tok.number, last_container});
    }
    if (is_entity_token(tok)) {
      std::optional<std::string> attribute;
      if (t > 0 && tokens[t - 1].pos == "JJ") attribute = tokens[t - 1].root;
      out.entities.push_back({static_cast<int>(t), normalize_entity_root(tok.root), attribute});
    }
  }
  return out;
}

}  // namespace

CqeExtraction extract_cqe(const Sentence& sentence) { return extract_impl(sentence, nullptr, 0); }

CqeExtraction extract_cqe(const Sentence& sentence, const PronounResolver& pronouns,
                          int sentence_index) {
  return extract_impl(sentence, &pronouns, sentence_index);
}

// ---- indicators ---------------------------------------------------------------

IndicatorLists load_indicators(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open indicators file: " + path);
  IndicatorLists lists;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("indicators line " + std::to_string(lineno) + ": expected polarity<TAB>word");
    }
    const std::string polarity = line.substr(0, tab);
    const std::string word = line.substr(tab + 1);
    if (word.empty()) throw Error("indicators line " + std::to_string(lineno) + ": empty word");
    if (polarity == "positive") {
      lists.positive.insert(word);
    } else if (polarity == "negative") {
      lists.negative.insert(word);
    } else {
      throw Error("indicators line " + std::to_string(lineno) + ": unknown polarity '" + polarity +
                  "'");
    }
  }
  for (const std::string& w : lists.positive) {
    if (lists.negative.count(w)) {
      throw Error("indicator word '" + w + "' listed as both positive and negative");
    }
  }
  return lists;
}

IndicatorLists default_indicators() {
  IndicatorLists lists;
  lists.positive = {"kul", "milakar", "milkar"};
  lists.negative = {"mukable", "tulna", "pehle", "chahiye"};
  return lists;
}

// ---- category plumbing ---------------------------------------------------------

CategoryMap categorize_problem(const WordProblem& problem, const VerbCategorizer& categorizer) {
  CategoryMap map;
  for (std::size_t s = 0; s < problem.sentences.size(); ++s) {
    if (problem.sentences[s].is_question) continue;
    const auto& tokens = problem.sentences[s].tokens;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (is_verb_pos(tokens[t].pos)) {
        map[{static_cast<int>(s), static_cast<int>(t)}] =
            categorizer.categorize(problem, static_cast<int>(s), static_cast<int>(t)).category;
      }
    }
  }
  return map;
}

namespace {

// Category of the next verb strictly after `after_token`; Observation when
// the verb carries no category entry.
std::optional<VerbCategory> next_verb_category(const Sentence& sentence, int sentence_index,
                                               int after_token, const CategoryMap& categories) {
  const int n = static_cast<int>(sentence.tokens.size());
  for (int j = after_token + 1; j < n; ++j) {
    if (is_verb_pos(sentence.tokens[static_cast<std::size_t>(j)].pos)) {
      auto it = categories.find({sentence_index, j});
      return it != categories.end() ? it->second : VerbCategory::Observation;
    }
  }
  return std::nullopt;
}

bool sentence_has_transfer_verb(const Sentence& sentence, int sentence_index,
                                const CategoryMap& categories) {
  for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
    if (!is_verb_pos(sentence.tokens[t].pos)) continue;
    auto it = categories.find({sentence_index, static_cast<int>(t)});
    if (it != categories.end() && is_transfer(it->second)) return true;
  }
  return false;
}

// States from one transfer-free sentence. A quantity waits for the next
// entity; a second quantity (or the sentence end) flushes the one in flight
// through circumscription: it inherits entity and attribute from the last
// state, and the container too unless it bound one itself.
void accumulate_states(const Sentence& sentence, int sentence_index, const CqeExtraction& cqe,
                       const CategoryMap& categories, std::vector<State>& states, Trace* trace) {
  std::map<int, const QuantityMention*> quantity_at;
  std::map<int, const EntityMention*> entity_at;
  for (const auto& q : cqe.quantities) quantity_at[q.token_index] = &q;
  for (const auto& e : cqe.entities) entity_at[e.token_index] = &e;

  const std::string where = "sentence " + std::to_string(sentence_index);
  std::optional<QuantityMention> pending;

  auto signed_value = [&](int anchor_token, const Rational& value) {
    const auto cat = next_verb_category(sentence, sentence_index, anchor_token, categories);
    return (cat && *cat == VerbCategory::Negative) ? -value : value;
  };

  auto circumscribe = [&](const QuantityMention& q) {
    if (states.empty()) {
      add_step(trace, "circumscription", where, states, states,
               "quantity " + to_string(q.value) + " has no entity and no previous state; dropped");
      return;
    }
    const State last = states.back();  // by value: the push_back below may reallocate
    State st;
    st.container = q.container.value_or(last.container);
    st.entity = last.entity;
    st.attribute = last.attribute;
    st.quantity = signed_value(q.token_index, q.value);
    st.origin = sentence_index;
    const std::vector<State> before = states;
    states.push_back(st);
    add_step(trace, "circumscription", where, before, states,
             "quantity " + to_string(q.value) + " inherits entity from " + state_brief(last) +
                 ", stored " + state_brief(st));
  };

  const int n = static_cast<int>(sentence.tokens.size());
  for (int i = 0; i < n; ++i) {
    if (auto qit = quantity_at.find(i); qit != quantity_at.end()) {
      if (pending) circumscribe(*pending);
      pending = *qit->second;
      continue;
    }
    if (auto eit = entity_at.find(i); eit != entity_at.end()) {
      if (!pending) continue;  // entity with unknown quantity: nothing to track
      State st;
      st.container = pending->container.value_or("");
      st.entity = eit->second->root;
      st.attribute = eit->second->attribute;
      st.quantity = signed_value(i, pending->value);
      st.origin = sentence_index;
      const std::vector<State> before = states;
      states.push_back(st);
      add_step(trace, "store-state", where, before, states, "stored " + state_brief(st));
      pending.reset();
    }
  }
  if (pending) circumscribe(*pending);
}

}  // namespace

std::vector<State> build_states(const WordProblem& problem, const CategoryMap& categories,
                                const PronounResolver* pronouns, Trace* trace) {
  std::vector<State> states;
  for (std::size_t s = 0; s < problem.sentences.size(); ++s) {
    const Sentence& sentence = problem.sentences[s];
    if (sentence.is_question) continue;
    if (sentence_has_transfer_verb(sentence, static_cast<int>(s), categories)) continue;
    const CqeExtraction cqe = pronouns
                                  ? extract_cqe(sentence, *pronouns, static_cast<int>(s))
                                  : extract_cqe(sentence);
    accumulate_states(sentence, static_cast<int>(s), cqe, categories, states, trace);
  }
  return states;
}

// ---- transfers -----------------------------------------------------------------

namespace {

std::string event_inputs(const TransferEvent& e) {
  return "container_1=" + e.container_1 + " container_2=" + e.container_2 +
         " entity=" + e.entity + " quantity=" + to_string(e.quantity) +
         " direction=" + to_string(e.direction);
}

std::string event_movement(const TransferEvent& e) {
  const bool outgoing = e.direction == VerbCategory::NegativeTransfer;
  const std::string& src = outgoing ? e.container_1 : e.container_2;
  const std::string& dst = outgoing ? e.container_2 : e.container_1;
  return "moved " + to_string(e.quantity) + " " + e.entity + " from " + src + " to " + dst;
}

}  // namespace

TransferDetection detect_transfer(const Sentence& sentence, int sentence_index,
                                  const CqeExtraction& cqe, const CategoryMap& categories) {
  TransferDetection det;
  VerbCategory direction = VerbCategory::NA;
  for (std::size_t t = 0; t < sentence.tokens.size() && !det.transfer_verb_present; ++t) {
    if (!is_verb_pos(sentence.tokens[t].pos)) continue;
    auto it = categories.find({sentence_index, static_cast<int>(t)});
    if (it != categories.end() && is_transfer(it->second)) {
      det.transfer_verb_present = true;
      direction = it->second;
    }
  }
  if (!det.transfer_verb_present) return det;

  const ContainerMention* first = cqe.containers.empty() ? nullptr : &cqe.containers.front();
  const ContainerMention* second = nullptr;
  if (first) {
    for (std::size_t i = 1; i < cqe.containers.size(); ++i) {
      if (cqe.containers[i].root != first->root) {
        second = &cqe.containers[i];
        break;
      }
    }
  }
  if (!first || !second) {
    det.error = "transfer sentence names fewer than two containers";
    return det;
  }
  if (cqe.quantities.empty()) {
    det.error = "transfer sentence has no quantity";
    return det;
  }
  if (cqe.entities.empty()) {
    det.error = "transfer sentence has no entity";
    return det;
  }
  TransferEvent event;
  event.container_1 = first->root;
  event.container_2 = second->root;
  event.entity = cqe.entities.front().root;
  event.quantity = cqe.quantities.front().value;
  event.direction = direction;
  det.event = event;
  return det;
}

bool apply_transfer(std::vector<State>& states, const TransferEvent& event, Trace* trace,
                    int origin_sentence) {
  auto last_match = [&](const std::string& container) -> int {
    int found = -1;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i].container == container &&
          entity_relevant(states[i].entity, states[i].attribute, event.entity, std::nullopt)) {
        found = static_cast<int>(i);
      }
    }
    return found;
  };
  const int i1 = last_match(event.container_1);
  const int i2 = last_match(event.container_2);
  if (i1 < 0 && i2 < 0) {
    add_step(trace, "apply-transfer", event_inputs(event), states, states,
             "no state matches either container for entity '" + event.entity + "'; unsolvable");
    return false;
  }

  const std::vector<State> before = states;
  // Sign of the change on container_1; container_2 moves the opposite way.
  const Rational delta = event.direction == VerbCategory::PositiveTransfer ? event.quantity
                                                                           : -event.quantity;
  std::string created;
  auto adjust = [&](int index, const std::string& container, const Rational& change) {
    if (index >= 0) {
      states[static_cast<std::size_t>(index)].quantity += change;
    } else {
      states.push_back({container, event.entity, std::nullopt, change, origin_sentence});
      created += (created.empty() ? "; created state for " : " and ") + container;
    }
  };
  adjust(i1, event.container_1, delta);
  adjust(i2, event.container_2, -delta);
  add_step(trace, "apply-transfer", event_inputs(event), before, states,
           event_movement(event) + created);
  return true;
}

// ---- question, operation, answer -------------------------------------------------

QuestionTarget parse_question(const Sentence& question, int sentence_index, bool transfer_seen,
                              const PronounResolver* pronouns) {
  const CqeExtraction cqe = pronouns ? extract_cqe(question, *pronouns, sentence_index)
                                     : extract_cqe(question);
  QuestionTarget target;
  if (!cqe.entities.empty()) {
    target.entity = cqe.entities.front().root;
    target.attribute = cqe.entities.front().attribute;
  }
  if (transfer_seen && !cqe.containers.empty()) {
    target.container = cqe.containers.front().root;
  }
  return target;
}

MainOperation determine_main_operation(const WordProblem& problem, bool transfer_seen,
                                       const IndicatorLists& indicators) {
  if (transfer_seen) return MainOperation::Transfer;
  const Sentence& question = problem.question();
  auto contains = [&](const std::set<std::string>& words) {
    for (const Token& t : question.tokens) {
      if (words.count(t.surface) || words.count(t.root)) return true;
    }
    return false;
  };
  if (contains(indicators.negative)) return MainOperation::Negative;
  if (contains(indicators.positive)) return MainOperation::Positive;
  return MainOperation::Positive;  // addition is the default reading
}

std::optional<Rational> compute_answer(const std::vector<State>& states,
                                       const QuestionTarget& target, MainOperation op,
                                       Trace& trace, std::string* failure) {
  auto fail = [&](const std::string& why) -> std::optional<Rational> {
    if (failure) *failure = why;
    add_step(&trace, "answer", to_string(op), states, states, "unsolvable: " + why);
    return std::nullopt;
  };
  if (states.empty()) return fail("no states to answer from");

  QuestionTarget effective = target;
  bool matched = false;
  for (const State& s : states) {
    if (entity_relevant(s.entity, s.attribute, effective.entity, effective.attribute)) {
      matched = true;
      break;
    }
  }
  if (!matched) {
    const std::string original = effective.entity.empty() ? "-" : effective.entity;
    effective.entity = states.front().entity;
    effective.attribute = std::nullopt;
    add_step(&trace, "question-entity-fallback", "question entity '" + original + "'", states,
             states, "no state matches; assuming first state entity '" + effective.entity + "'");
  }

  std::vector<const State*> relevant;
  for (const State& s : states) {
    if (entity_relevant(s.entity, s.attribute, effective.entity, effective.attribute)) {
      relevant.push_back(&s);
    }
  }

  Rational value;
  switch (op) {
    case MainOperation::Transfer: {
      const State* chosen = nullptr;
      for (const State* s : relevant) {
        if (!effective.container || s->container == *effective.container) chosen = s;
      }
      if (!chosen) {
        return fail("no state for container '" + effective.container.value_or("-") +
                    "' and entity '" + effective.entity + "'");
      }
      value = chosen->quantity;
      add_step(&trace, "select-state", "container=" + effective.container.value_or("-") +
                                           " entity=" + effective.entity,
               states, states, "selected " + state_brief(*chosen));
      break;
    }
    case MainOperation::Positive: {
      value = Rational(0);
      for (const State* s : relevant) value += s->quantity;
      add_step(&trace, "combine-positive", "entity=" + effective.entity, states, states,
               "sum over " + std::to_string(relevant.size()) + " states = " + to_string(value));
      break;
    }
    case MainOperation::Negative: {
      value = relevant.front()->quantity;
      for (std::size_t i = 1; i < relevant.size(); ++i) value -= boost::abs(relevant[i]->quantity);
      add_step(&trace, "combine-negative", "entity=" + effective.entity, states, states,
               "first quantity minus later magnitudes over " + std::to_string(relevant.size()) +
                   " states = " + to_string(value));
      break;
    }
  }

  if (value < Rational(0)) {
    add_step(&trace, "absolute-value", to_string(value), states, states,
             "negative result " + to_string(value) + " reported as its magnitude");
    value = -value;
  }
  add_step(&trace, "answer", to_string(op), states, states, to_string(value));
  return value;
}

Answer solve(const WordProblem& problem, const VerbCategorizer& categorizer,
             const IndicatorLists& indicators) {
  Answer answer;
  Trace& trace = answer.trace;
  const int qi = problem.question_index();
  if (qi < 0) {
    answer.failure = "no question sentence";
    add_step(&trace, "answer", "", {}, {}, "unsolvable: no question sentence");
    return answer;
  }

  const PronounResolver pronouns(problem);
  const CategoryMap categories = categorize_problem(problem, categorizer);

  std::vector<State> states;
  bool transfer_seen = false;
  for (std::size_t s = 0; s < problem.sentences.size(); ++s) {
    const Sentence& sentence = problem.sentences[s];
    if (sentence.is_question) continue;
    const CqeExtraction cqe = extract_cqe(sentence, pronouns, static_cast<int>(s));
    const TransferDetection det =
        detect_transfer(sentence, static_cast<int>(s), cqe, categories);
    if (det.transfer_verb_present) {
      transfer_seen = true;
      if (!det.event) {
        add_step(&trace, "detect-transfer", "sentence " + std::to_string(s), states, states,
                 "unsolvable: " + det.error);
        answer.failure = det.error;
        return answer;
      }
      add_step(&trace, "detect-transfer", event_inputs(*det.event), states, states,
               event_movement(*det.event));
      if (!apply_transfer(states, *det.event, &trace, static_cast<int>(s))) {
        answer.failure = "transfer matches no known state";
        return answer;
      }
    } else {
      accumulate_states(sentence, static_cast<int>(s), cqe, categories, states, &trace);
    }
  }

  if (states.empty()) {
    answer.failure = "no quantities found in body";
    add_step(&trace, "answer", "", states, states, "unsolvable: no quantities found in body");
    return answer;
  }

  const QuestionTarget target = parse_question(problem.sentences[static_cast<std::size_t>(qi)],
                                               qi, transfer_seen, &pronouns);
  add_step(&trace, "parse-question", "sentence " + std::to_string(qi), states, states,
           "entity='" + (target.entity.empty() ? "-" : target.entity) + "'" +
               (target.attribute ? " attribute='" + *target.attribute + "'" : "") +
               (target.container ? " container='" + *target.container + "'" : ""));
  const MainOperation op = determine_main_operation(problem, transfer_seen, indicators);
  add_step(&trace, "main-operation", transfer_seen ? "transfer seen" : "question indicators",
           states, states, to_string(op));

  std::string why;
  answer.value = compute_answer(states, target, op, trace, &why);
  if (!answer.value) answer.failure = why;
  return answer;
}

// ---- trace rendering ----------------------------------------------------------

nlohmann::json state_to_json(const State& state) {
  nlohmann::json doc;
  doc["container"] = state.container;
  doc["entity"] = state.entity;
  if (state.attribute) {
    doc["attribute"] = *state.attribute;
  } else {
    doc["attribute"] = nullptr;
  }
  if (state.quantity.denominator() == 1) {
    doc["quantity"] = state.quantity.numerator();
  } else {
    doc["quantity"] = to_string(state.quantity);
  }
  doc["origin"] = state.origin;
  return doc;
}

nlohmann::json trace_to_json(const Trace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& step : trace.steps) {
    nlohmann::json sj;
    sj["rule"] = step.rule;
    sj["inputs"] = step.inputs;
    sj["note"] = step.note;
    nlohmann::json before = nlohmann::json::array();
    for (const State& s : step.before) before.push_back(state_to_json(s));
    nlohmann::json after = nlohmann::json::array();
    for (const State& s : step.after) after.push_back(state_to_json(s));
    sj["before"] = std::move(before);
    sj["after"] = std::move(after);
    steps.push_back(std::move(sj));
  }
  return nlohmann::json{{"steps", std::move(steps)}};
}

std::string trace_to_text(const Trace& trace) {
  std::ostringstream out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& step = trace.steps[i];
    out << (i + 1) << ". " << step.rule << ": " << step.note;
    if (i + 1 < trace.steps.size()) out << '\n';
  }
  return out.str();
}

}  // namespace verbsolve
