#include "verbsolve/verbcat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "verbsolve/error.hpp"

namespace verbsolve {

std::vector<VerbOccurrence> find_verb_occurrences(const WordProblem& problem) {
  std::vector<VerbOccurrence> out;
  for (std::size_t s = 0; s < problem.sentences.size(); ++s) {
    const auto& tokens = problem.sentences[s].tokens;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (is_verb_pos(tokens[t].pos)) {
        out.push_back({problem.id, static_cast<int>(s), static_cast<int>(t), tokens[t].root,
                       tokens[t].surface});
      }
    }
  }
  return out;
}

std::optional<VerbCategory> categorize_lexicon(const VerbOccurrence& occurrence,
                                               const VerbLexicon& lexicon) {
  return lexicon.lookup(occurrence.root);
}

double cosine_distance(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size()) throw Error("cosine_distance: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 2.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

VerbCategory categorize_knn(const std::string& root, const EmbeddingTable& table,
                            const std::vector<LabeledRoot>& train) {
  if (train.empty()) throw Error("categorize_knn: empty training set");
  const std::vector<float>* query = table.lookup(root);
  if (query) {
    // Zero distance to its own training entry wins outright; scanning would
    // only tie it against other zero-distance vectors.
    for (const auto& [r, c] : train) {
      if (r == root) return c;
    }
  }
  if (!query) throw OovError(root);

  double best = std::numeric_limits<double>::infinity();
  const VerbCategory* best_cat = nullptr;
  for (const auto& [r, c] : train) {
    const std::vector<float>* vec = table.lookup(r);
    if (!vec) continue;
    const double d = cosine_distance(*query, *vec);
    if (d < best) {
      best = d;
      best_cat = &c;
    }
  }
  if (!best_cat) throw Error("categorize_knn: no training verb has an embedding");
  return *best_cat;
}

VerbCategory categorize_knn(const VerbOccurrence& occurrence, const EmbeddingTable& table,
                            const std::vector<LabeledRoot>& train) {
  return categorize_knn(occurrence.root, table, train);
}

std::vector<LabeledRoot> lexicon_train_pairs(const VerbLexicon& lexicon) {
  std::vector<LabeledRoot> pairs;
  pairs.reserve(lexicon.entries.size());
  for (const auto& [root, cat] : lexicon.entries) pairs.emplace_back(root, cat);
  return pairs;
}

ContextWindow extract_window(const Sentence& sentence, int verb_index) {
  const int n = static_cast<int>(sentence.tokens.size());
  if (verb_index < 0 || verb_index >= n) {
    throw std::out_of_range("extract_window: verb index " + std::to_string(verb_index) +
                            " outside sentence of " + std::to_string(n) + " tokens");
  }
  const int lo = std::max(0, verb_index - 3);
  const int hi = std::min(n - 1, verb_index + 3);
  ContextWindow window;
  for (int i = lo; i <= hi; ++i) window.slots.push_back(sentence.tokens[static_cast<std::size_t>(i)]);
  window.verb_slot = verb_index - lo;
  return window;
}

const char* token_field_name(TokenField field) {
  switch (field) {
    case TokenField::Surface: return "surface";
    case TokenField::Root: return "root";
    case TokenField::Pos: return "pos";
    case TokenField::Dep: return "dep";
  }
  return "surface";
}

std::optional<TokenField> token_field_from_name(const std::string& name) {
  for (TokenField f : kAllTokenFields) {
    if (name == token_field_name(f)) return f;
  }
  return std::nullopt;
}

namespace {

const std::string& field_value(const Token& token, TokenField field) {
  switch (field) {
    case TokenField::Surface: return token.surface;
    case TokenField::Root: return token.root;
    case TokenField::Pos: return token.pos;
    case TokenField::Dep: return token.dep;
  }
  return token.surface;
}

template <typename Fn>
void for_each_feature(const ContextWindow& window, Fn&& fn) {
  for (std::size_t i = 0; i < window.slots.size(); ++i) {
    const int offset = static_cast<int>(i) - window.verb_slot;
    for (TokenField field : kAllTokenFields) {
      const std::string& value = field_value(window.slots[i], field);
      if (!value.empty()) fn(FeatureKey{offset, field, value});
    }
  }
}

}  // namespace

void FeatureVocabulary::add_window(const ContextWindow& window) {
  for_each_feature(window, [&](FeatureKey key) {
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(key, keys_.size());
      keys_.push_back(std::move(key));
    }
  });
}

std::optional<std::size_t> FeatureVocabulary::index_of(const FeatureKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FeatureVector featurize(const ContextWindow& window, const FeatureVocabulary& vocabulary) {
  FeatureVector fv;
  for_each_feature(window, [&](const FeatureKey& key) {
    if (auto idx = vocabulary.index_of(key)) fv.indices.push_back(*idx);
  });
  std::sort(fv.indices.begin(), fv.indices.end());
  fv.indices.erase(std::unique(fv.indices.begin(), fv.indices.end()), fv.indices.end());
  return fv;
}

namespace {

std::array<double, kCategoryCount> softmax(const std::array<double, kCategoryCount>& scores) {
  double maxv = scores[0];
  for (double s : scores) maxv = std::max(maxv, s);
  std::array<double, kCategoryCount> out{};
  double sum = 0.0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    out[c] = std::exp(scores[c] - maxv);
    sum += out[c];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::array<double, kCategoryCount> scores_of(const LinearModel& model,
                                             const FeatureVector& features) {
  std::array<double, kCategoryCount> scores = model.bias;
  for (std::size_t idx : features.indices) {
    if (idx >= model.feature_count) {
      throw Error("feature index " + std::to_string(idx) + " out of range for model with " +
                  std::to_string(model.feature_count) + " features");
    }
    for (std::size_t c = 0; c < kCategoryCount; ++c) scores[c] += model.weights[c][idx];
  }
  return scores;
}

}  // namespace

LinearModel train_linear(const std::vector<std::pair<FeatureVector, VerbCategory>>& samples,
                         std::size_t feature_count, const LinearHyperparams& hyper,
                         std::vector<double>* loss_history) {
  if (samples.empty()) throw Error("train_linear: no samples");
  if (hyper.epochs < 1) throw Error("train_linear: epochs must be positive");
  bool multi_class = false;
  for (const auto& [fv, label] : samples) {
    for (std::size_t idx : fv.indices) {
      if (idx >= feature_count) throw Error("train_linear: feature index out of range");
    }
    if (label != samples.front().second) multi_class = true;
  }
  if (!multi_class) throw Error("train_linear: degenerate input, every sample has one label");

  LinearModel model;
  model.feature_count = feature_count;
  model.hyper = hyper;
  for (auto& w : model.weights) w.assign(feature_count, 0.0);

  const double n = static_cast<double>(samples.size());
  std::array<std::vector<double>, kCategoryCount> grad_w;
  for (auto& g : grad_w) g.assign(feature_count, 0.0);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
    std::array<double, kCategoryCount> grad_b{};
    double loss = 0.0;
    for (const auto& [fv, label] : samples) {
      const auto probs = softmax(scores_of(model, fv));
      const auto y = static_cast<std::size_t>(label);
      loss -= std::log(std::max(probs[y], 1e-300));
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        const double g = probs[c] - (c == y ? 1.0 : 0.0);
        grad_b[c] += g;
        for (std::size_t idx : fv.indices) grad_w[c][idx] += g;
      }
    }
    double weight_norm = 0.0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      for (std::size_t j = 0; j < feature_count; ++j) {
        const double w = model.weights[c][j];
        weight_norm += w * w;
        model.weights[c][j] -= hyper.learning_rate * (grad_w[c][j] / n + hyper.l2 * w);
      }
      model.bias[c] -= hyper.learning_rate * grad_b[c] / n;
    }
    if (loss_history) loss_history->push_back(loss / n + 0.5 * hyper.l2 * weight_norm);
  }
  return model;
}

std::array<double, kCategoryCount> predict_proba(const LinearModel& model,
                                                 const FeatureVector& features) {
  return softmax(scores_of(model, features));
}

VerbCategory predict_linear(const LinearModel& model, const FeatureVector& features) {
  const auto scores = scores_of(model, features);
  std::size_t best = 0;
  for (std::size_t c = 1; c < kCategoryCount; ++c) {
    if (scores[c] > scores[best]) best = c;  // strict: ties keep the earlier class
  }
  return static_cast<VerbCategory>(best);
}

// ---- model serialization ----------------------------------------------------

namespace {
constexpr const char* kModelMagic = "verbsolve-linear v1";
}

void save_linear_model(const std::string& path, const LinearModel& model,
                       const FeatureVocabulary& vocabulary) {
  if (vocabulary.size() != model.feature_count) {
    throw Error("save_linear_model: vocabulary size does not match model feature count");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open model file for writing: " + path);
  out << kModelMagic << '\n';
  out << std::setprecision(17);
  out << "hyper " << model.hyper.learning_rate << ' ' << model.hyper.epochs << ' '
      << model.hyper.l2 << '\n';
  out << "features " << model.feature_count << '\n';
  for (const FeatureKey& key : vocabulary.keys()) {
    if (key.value.find('\t') != std::string::npos || key.value.find('\n') != std::string::npos) {
      throw Error("save_linear_model: feature value contains tab or newline: '" + key.value + "'");
    }
    out << key.offset << '\t' << token_field_name(key.field) << '\t' << key.value << '\n';
  }
  out << "weights\n";
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    out << to_string(static_cast<VerbCategory>(c)) << ' ' << model.bias[c];
    for (double w : model.weights[c]) out << ' ' << w;
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

std::pair<LinearModel, FeatureVocabulary> load_linear_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kModelMagic) {
    throw Error("model file has unknown format or version: " + path);
  }

  LinearModel model;
  FeatureVocabulary vocab;
  {
    std::getline(in, line);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag >> model.hyper.learning_rate >> model.hyper.epochs >> model.hyper.l2) ||
        tag != "hyper") {
      throw Error("model file: bad hyper line");
    }
  }
  {
    std::getline(in, line);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag >> model.feature_count) || tag != "features") {
      throw Error("model file: bad features line");
    }
  }
  for (std::size_t i = 0; i < model.feature_count; ++i) {
    if (!std::getline(in, line)) throw Error("model file: truncated feature list");
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw Error("model file: bad feature line: " + line);
    FeatureKey key;
    key.offset = std::stoi(line.substr(0, tab1));
    const auto field = token_field_from_name(line.substr(tab1 + 1, tab2 - tab1 - 1));
    if (!field) throw Error("model file: unknown token field in: " + line);
    key.field = *field;
    key.value = line.substr(tab2 + 1);
    // Rebuild through a single-token window so indices stay in file order.
    ContextWindow w;
    Token t;
    switch (key.field) {
      case TokenField::Surface: t.surface = key.value; break;
      case TokenField::Root: t.root = key.value; break;
      case TokenField::Pos: t.pos = key.value; break;
      case TokenField::Dep: t.dep = key.value; break;
    }
    w.slots.push_back(t);
    w.verb_slot = -key.offset;  // places the lone slot at `offset`
    vocab.add_window(w);
    if (vocab.size() != i + 1) throw Error("model file: duplicate feature line: " + line);
  }
  if (!std::getline(in, line) || line != "weights") throw Error("model file: missing weights block");
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (!std::getline(in, line)) throw Error("model file: truncated weights block");
    std::istringstream ss(line);
    std::string name;
    ss >> name;
    if (category_from_string(name) != static_cast<VerbCategory>(c)) {
      throw Error("model file: weights out of order at '" + name + "'");
    }
    if (!(ss >> model.bias[c])) throw Error("model file: bad bias for " + name);
    model.weights[c].assign(model.feature_count, 0.0);
    for (std::size_t j = 0; j < model.feature_count; ++j) {
      if (!(ss >> model.weights[c][j])) throw Error("model file: bad weight row for " + name);
    }
  }
  return {std::move(model), std::move(vocab)};
}

// ---- prefix samples ----------------------------------------------------------

std::vector<PrefixSample> extract_prefix_samples(const WordProblem& problem,
                                                 const VerbLexicon& lexicon, PrefixMode mode) {
  std::vector<PrefixSample> samples;
  std::vector<Token> carried;  // everything before the current sentence
  for (std::size_t s = 0; s < problem.sentences.size(); ++s) {
    const auto& tokens = problem.sentences[s].tokens;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (!is_verb_pos(tokens[t].pos)) continue;
      PrefixSample sample;
      if (mode == PrefixMode::FullPrefix) sample.tokens = carried;
      sample.tokens.insert(sample.tokens.end(), tokens.begin(), tokens.begin() + t + 1);
      sample.label = lexicon.lookup(tokens[t].root).value_or(VerbCategory::NA);
      sample.problem_id = problem.id;
      sample.sentence_index = static_cast<int>(s);
      sample.token_index = static_cast<int>(t);
      samples.push_back(std::move(sample));
    }
    if (mode == PrefixMode::FullPrefix) {
      carried.insert(carried.end(), tokens.begin(), tokens.end());
    }
  }
  return samples;
}

std::string prefix_sample_to_json_line(const PrefixSample& sample) {
  nlohmann::json doc;
  nlohmann::json text = nlohmann::json::array();
  for (const Token& t : sample.tokens) text.push_back(t.surface);
  doc["text"] = std::move(text);
  doc["label"] = to_string(sample.label);
  return doc.dump();
}

void export_prefix_samples(const std::string& path, const std::vector<PrefixSample>& samples) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open prefix sample file for writing: " + path);
  for (const PrefixSample& s : samples) out << prefix_sample_to_json_line(s) << '\n';
  if (!out) throw Error("write failed: " + path);
}

// ---- categorizers -------------------------------------------------------------

namespace {

const Token& verb_token(const WordProblem& problem, int sentence_index, int token_index) {
  if (sentence_index < 0 || sentence_index >= static_cast<int>(problem.sentences.size())) {
    throw std::out_of_range("categorize: sentence index out of range");
  }
  const auto& tokens = problem.sentences[static_cast<std::size_t>(sentence_index)].tokens;
  if (token_index < 0 || token_index >= static_cast<int>(tokens.size())) {
    throw std::out_of_range("categorize: token index out of range");
  }
  return tokens[static_cast<std::size_t>(token_index)];
}

}  // namespace

VerbCategorizer::Result LexiconCategorizer::categorize(const WordProblem& problem,
                                                       int sentence_index,
                                                       int token_index) const {
  const Token& tok = verb_token(problem, sentence_index, token_index);
  if (auto cat = lexicon_->lookup(tok.root)) return {*cat, false};
  return {VerbCategory::Observation, true};
}

VerbCategorizer::Result KnnCategorizer::categorize(const WordProblem& problem, int sentence_index,
                                                   int token_index) const {
  const Token& tok = verb_token(problem, sentence_index, token_index);
  try {
    return {categorize_knn(tok.root, *table_, train_), false};
  } catch (const OovError&) {
    if (lexicon_) {
      if (auto cat = lexicon_->lookup(tok.root)) return {*cat, true};
    }
    return {VerbCategory::Observation, true};
  }
}

VerbCategorizer::Result LinearCategorizer::categorize(const WordProblem& problem,
                                                      int sentence_index, int token_index) const {
  verb_token(problem, sentence_index, token_index);  // bounds check
  const auto& sentence = problem.sentences[static_cast<std::size_t>(sentence_index)];
  const ContextWindow window = extract_window(sentence, token_index);
  return {predict_linear(*model_, featurize(window, *vocabulary_)), false};
}

}  // namespace verbsolve
