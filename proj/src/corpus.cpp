#include "verbsolve/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "verbsolve/error.hpp"

namespace verbsolve {

using nlohmann::json;

namespace {

// Surface forms that mark a sentence as the question when no explicit flag
// is present in the input.
bool is_question_word(const std::string& w) {
  static const char* kWords[] = {"kitana", "kitanaa", "kitane", "kitanee",
                                 "kitna",  "kitne",   "kitni",  "kya",
                                 "kaun",   "kaunsa"};
  for (const char* q : kWords) {
    if (w == q) return true;
  }
  return false;
}

bool has_question_cue(const Sentence& s) {
  for (const Token& t : s.tokens) {
    if (t.pos == "WQ" || t.surface == "?") return true;
    if (is_question_word(t.surface) || is_question_word(t.root)) return true;
  }
  return false;
}

std::string require_string(const json& obj, const char* key, int line) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw Error("problems line " + std::to_string(line) + ": missing string field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

Rational parse_gold(const json& value, int line) {
  if (value.is_number_integer()) return Rational(value.get<long long>());
  if (value.is_string()) {
    if (auto r = try_parse_rational(value.get<std::string>())) return *r;
    throw Error("problems line " + std::to_string(line) + ": unparseable gold_answer '" +
                value.get<std::string>() + "'");
  }
  throw Error("problems line " + std::to_string(line) + ": gold_answer must be int or string");
}

WordProblem problem_from_json(const json& doc, int line, const LoadOptions& options) {
  WordProblem p;
  p.id = require_string(doc, "id", line);
  if (!doc.contains("sentences") || !doc["sentences"].is_array() || doc["sentences"].empty()) {
    throw Error("problems line " + std::to_string(line) + ": 'sentences' must be a non-empty array");
  }
  for (const json& sj : doc["sentences"]) {
    Sentence s;
    s.is_question = sj.value("is_question", false);
    if (!sj.contains("tokens") || !sj["tokens"].is_array() || sj["tokens"].empty()) {
      throw Error("problems line " + std::to_string(line) + ": sentence with no tokens in '" +
                  p.id + "'");
    }
    int idx = 0;
    for (const json& tj : sj["tokens"]) {
      Token t;
      t.index = idx++;
      t.surface = require_string(tj, "surface", line);
      t.root = require_string(tj, "root", line);
      t.pos = tj.value("pos", "");
      t.dep = tj.value("dep", "");
      if (t.surface.empty() || t.root.empty()) {
        throw Error("problems line " + std::to_string(line) + ": empty surface or root in '" +
                    p.id + "'");
      }
      if (t.pos == "QC") {
        t.number = try_parse_rational(t.surface);
        if (!t.number) t.number = try_parse_rational(t.root);
      }
      s.tokens.push_back(std::move(t));
    }
    p.sentences.push_back(std::move(s));
  }
  if (doc.contains("gold_answer") && !doc["gold_answer"].is_null()) {
    p.gold_answer = parse_gold(doc["gold_answer"], line);
  }
  if (doc.contains("gold_equation") && !doc["gold_equation"].is_null()) {
    p.gold_equation = doc["gold_equation"].get<std::string>();
  }

  int questions = 0;
  for (const Sentence& s : p.sentences) questions += s.is_question ? 1 : 0;
  if (questions == 0 && options.auto_flag_question) {
    for (auto it = p.sentences.rbegin(); it != p.sentences.rend(); ++it) {
      if (has_question_cue(*it)) {
        it->is_question = true;
        ++questions;
        break;
      }
    }
  }
  if (questions == 0) {
    throw Error("problems line " + std::to_string(line) + ": problem '" + p.id +
                "' has no question sentence");
  }
  if (questions > 1) {
    throw Error("problems line " + std::to_string(line) + ": problem '" + p.id +
                "' has more than one question sentence");
  }
  return p;
}

}  // namespace

int WordProblem::question_index() const {
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].is_question) return static_cast<int>(i);
  }
  return -1;
}

const Sentence& WordProblem::question() const {
  const int qi = question_index();
  if (qi < 0) throw Error("problem '" + id + "' has no question sentence");
  return sentences[static_cast<std::size_t>(qi)];
}

std::optional<VerbCategory> VerbLexicon::lookup(const std::string& root) const {
  auto it = entries.find(root);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

const std::vector<float>* EmbeddingTable::lookup(const std::string& word) const {
  auto it = vectors.find(word);
  if (it == vectors.end()) return nullptr;
  return &it->second;
}

std::vector<WordProblem> load_problems(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problems file: " + path);
  std::vector<WordProblem> problems;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error("problems line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
    problems.push_back(problem_from_json(doc, lineno, options));
  }
  return problems;
}

std::string problem_to_json_line(const WordProblem& problem) {
  json doc;
  doc["id"] = problem.id;
  json sentences = json::array();
  for (const Sentence& s : problem.sentences) {
    json sj;
    sj["is_question"] = s.is_question;
    json tokens = json::array();
    for (const Token& t : s.tokens) {
      tokens.push_back({{"surface", t.surface}, {"root", t.root}, {"pos", t.pos}, {"dep", t.dep}});
    }
    sj["tokens"] = std::move(tokens);
    sentences.push_back(std::move(sj));
  }
  doc["sentences"] = std::move(sentences);
  if (problem.gold_answer) {
    if (problem.gold_answer->denominator() == 1) {
      doc["gold_answer"] = problem.gold_answer->numerator();
    } else {
      doc["gold_answer"] = to_string(*problem.gold_answer);
    }
  }
  if (problem.gold_equation) doc["gold_equation"] = *problem.gold_equation;
  return doc.dump();
}

void save_problems(const std::string& path, const std::vector<WordProblem>& problems) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open problems file for writing: " + path);
  for (const WordProblem& p : problems) out << problem_to_json_line(p) << '\n';
  if (!out) throw Error("write failed: " + path);
}

VerbLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file: " + path);
  VerbLexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw Error("lexicon line " + std::to_string(lineno) + ": expected root<TAB>category");
    }
    const std::string root = line.substr(0, tab);
    const std::string name = line.substr(tab + 1);
    if (root.empty()) throw Error("lexicon line " + std::to_string(lineno) + ": empty root");
    const auto cat = category_from_string(name);
    if (!cat) {
      throw Error("lexicon line " + std::to_string(lineno) + ": unknown category '" + name + "'");
    }
    auto [it, inserted] = lex.entries.emplace(root, *cat);
    if (!inserted && it->second != *cat) {
      throw Error("lexicon line " + std::to_string(lineno) + ": root '" + root +
                  "' already mapped to " + to_string(it->second));
    }
  }
  return lex;
}

EmbeddingTable load_embeddings(const std::string& path, std::size_t dimension,
                               std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file: " + path);
  EmbeddingTable table;
  table.dimension = dimension;
  std::string line;
  int lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string field;
    while (ss >> field) fields.push_back(field);
    if (fields.empty()) continue;

    if (first_content) {
      first_content = false;
      // fastText convention: "<word count> <dimension>" as the first row.
      if (fields.size() == 2 &&
          fields[0].find_first_not_of("0123456789") == std::string::npos &&
          fields[1].find_first_not_of("0123456789") == std::string::npos) {
        const std::size_t declared = std::stoul(fields[1]);
        if (table.dimension == 0 || table.dimension == declared) {
          table.dimension = declared;
          continue;
        }
      }
    }

    if (table.dimension == 0) {
      if (fields.size() < 2) {
        throw Error("embeddings line " + std::to_string(lineno) + ": cannot infer dimension");
      }
      table.dimension = fields.size() - 1;
    }
    if (fields.size() != table.dimension + 1) {
      throw Error("embeddings line " + std::to_string(lineno) + ": expected " +
                  std::to_string(table.dimension) + " values, got " +
                  std::to_string(fields.size() - 1));
    }
    std::vector<float> vec(table.dimension);
    for (std::size_t i = 0; i < table.dimension; ++i) {
      try {
        std::size_t used = 0;
        vec[i] = std::stof(fields[i + 1], &used);
        if (used != fields[i + 1].size()) throw std::invalid_argument(fields[i + 1]);
      } catch (const std::exception&) {
        throw Error("embeddings line " + std::to_string(lineno) + ": non-numeric value '" +
                    fields[i + 1] + "'");
      }
    }
    auto it = table.vectors.find(fields[0]);
    if (it != table.vectors.end()) {
      it->second = std::move(vec);
      if (warnings) {
        warnings->push_back("embeddings line " + std::to_string(lineno) + ": duplicate word '" +
                            fields[0] + "' replaces earlier vector");
      }
    } else {
      table.vectors.emplace(fields[0], std::move(vec));
    }
  }
  if (table.dimension == 0) {
    throw Error("embeddings file is empty and no dimension was given: " + path);
  }
  return table;
}

std::vector<std::vector<std::size_t>> split_kfold(std::size_t count, int k, std::uint64_t seed) {
  if (k < 2) throw Error("split_kfold: k must be at least 2");
  if (static_cast<std::size_t>(k) > count) {
    throw Error("split_kfold: k=" + std::to_string(k) + " exceeds dataset size " +
                std::to_string(count));
  }
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Hand-rolled Fisher-Yates: std::shuffle's output is implementation
  // defined, and fold assignment must be reproducible from the seed alone.
  std::mt19937_64 rng(seed);
  for (std::size_t i = count - 1; i > 0; --i) {
    std::swap(idx[i], idx[rng() % (i + 1)]);
  }
  const std::size_t base = count / static_cast<std::size_t>(k);
  const std::size_t extra = count % static_cast<std::size_t>(k);
  std::vector<std::vector<std::size_t>> folds;
  std::size_t at = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    std::vector<std::size_t> fold(idx.begin() + at, idx.begin() + at + size);
    std::sort(fold.begin(), fold.end());
    folds.push_back(std::move(fold));
    at += size;
  }
  return folds;
}

std::vector<std::vector<std::size_t>> split_kfold(const std::vector<WordProblem>& problems,
                                                  int k, std::uint64_t seed) {
  return split_kfold(problems.size(), k, seed);
}

}  // namespace verbsolve
