#include <cstdint>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "verbsolve/corpus.hpp"
#include "verbsolve/error.hpp"
#include "verbsolve/harness.hpp"
#include "verbsolve/solver.hpp"
#include "verbsolve/verbcat.hpp"

namespace {

using namespace verbsolve;

struct Options {
  std::string problems;
  std::string lexicon;
  std::string embeddings;
  std::string indicators;
  std::string model;
  std::string method = "lexicon";
  std::string format = "text";
  std::string task;
  std::string fold_unit = "problem";
  int k = 5;
  std::uint64_t seed = 42;
  bool explain = false;
  double learning_rate = 0.1;
  int epochs = 200;
  double l2 = 1e-4;
};

// Loaded inputs live behind one stable allocation because the categorizer
// keeps references into them.
struct Resources {
  std::vector<WordProblem> problems;
  VerbLexicon lexicon;
  EmbeddingTable embeddings;
  IndicatorLists indicators;
  LinearModel model;
  FeatureVocabulary vocabulary;
  std::unique_ptr<VerbCategorizer> categorizer;
};

std::unique_ptr<Resources> load_resources(const Options& opt, bool need_categorizer) {
  auto r = std::make_unique<Resources>();
  if (opt.problems.empty()) throw Error("--problems is required");
  r->problems = load_problems(opt.problems);
  if (!opt.lexicon.empty()) r->lexicon = load_lexicon(opt.lexicon);
  r->indicators = opt.indicators.empty() ? default_indicators() : load_indicators(opt.indicators);
  if (!opt.embeddings.empty()) {
    std::vector<std::string> warnings;
    r->embeddings = load_embeddings(opt.embeddings, 0, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
  }
  if (need_categorizer) {
    if (opt.method == "lexicon") {
      if (opt.lexicon.empty()) throw Error("--method lexicon requires --lexicon");
      r->categorizer = std::make_unique<LexiconCategorizer>(r->lexicon);
    } else if (opt.method == "knn") {
      if (opt.lexicon.empty()) throw Error("--method knn requires --lexicon for training labels");
      if (opt.embeddings.empty()) throw Error("--method knn requires --embeddings");
      r->categorizer = std::make_unique<KnnCategorizer>(
          r->embeddings, lexicon_train_pairs(r->lexicon), &r->lexicon);
    } else {
      if (opt.model.empty()) throw Error("--method linear requires --model");
      auto [model, vocabulary] = load_linear_model(opt.model);
      r->model = std::move(model);
      r->vocabulary = std::move(vocabulary);
      r->categorizer = std::make_unique<LinearCategorizer>(r->model, r->vocabulary);
    }
  }
  return r;
}

nlohmann::json rational_to_json(const Rational& value) {
  if (value.denominator() == 1) return value.numerator();
  return to_string(value);
}

int cmd_solve(const Options& opt) {
  const auto r = load_resources(opt, true);
  int unsolvable = 0;
  for (const WordProblem& p : r->problems) {
    const Answer answer = solve(p, *r->categorizer, r->indicators);
    if (!answer.solved()) ++unsolvable;
    if (opt.format == "json") {
      nlohmann::json doc;
      doc["id"] = p.id;
      if (answer.solved()) {
        doc["answer"] = rational_to_json(*answer.value);
      } else {
        doc["answer"] = nullptr;
        doc["failure"] = answer.failure;
      }
      if (opt.explain) doc["trace"] = trace_to_json(answer.trace);
      std::cout << doc.dump() << '\n';
    } else {
      std::cout << p.id << '\t'
                << (answer.solved() ? to_string(*answer.value) : "unsolvable: " + answer.failure)
                << '\n';
      if (opt.explain) {
        std::istringstream lines(trace_to_text(answer.trace));
        std::string line;
        while (std::getline(lines, line)) std::cout << "    " << line << '\n';
      }
    }
  }
  return unsolvable > 0 ? 2 : 0;
}

int cmd_categorize(const Options& opt) {
  const auto r = load_resources(opt, true);
  for (const WordProblem& p : r->problems) {
    for (const VerbOccurrence& occ : find_verb_occurrences(p)) {
      const auto result =
          r->categorizer->categorize(p, occ.sentence_index, occ.token_index);
      if (opt.format == "json") {
        nlohmann::json doc;
        doc["id"] = p.id;
        doc["sentence"] = occ.sentence_index;
        doc["token"] = occ.token_index;
        doc["root"] = occ.root;
        doc["category"] = to_string(result.category);
        doc["fallback"] = result.fallback;
        std::cout << doc.dump() << '\n';
      } else {
        std::cout << p.id << '\t' << occ.sentence_index << '\t' << occ.token_index << '\t'
                  << occ.root << '\t' << to_string(result.category)
                  << (result.fallback ? "\tfallback" : "") << '\n';
      }
    }
  }
  return 0;
}

int cmd_eval(const Options& opt) {
  EvalReport report;
  if (opt.task == "verbcat") {
    const auto r = load_resources(opt, false);
    if (opt.lexicon.empty()) throw Error("eval --task verbcat requires --lexicon");
    CategorizerMethod method = CategorizerMethod::Lexicon;
    if (opt.method == "knn") {
      if (opt.embeddings.empty()) throw Error("--method knn requires --embeddings");
      method = CategorizerMethod::Knn;
    } else if (opt.method == "linear") {
      method = CategorizerMethod::Linear;
    }
    const FoldUnit unit =
        opt.fold_unit == "sample" ? FoldUnit::BySample : FoldUnit::ByProblem;
    LinearHyperparams hyper;
    hyper.learning_rate = opt.learning_rate;
    hyper.epochs = opt.epochs;
    hyper.l2 = opt.l2;
    report = run_verbcat_cv(r->problems, r->lexicon, r->embeddings, method, opt.k, opt.seed,
                            unit, hyper);
  } else {
    const auto r = load_resources(opt, true);
    report = run_solver_eval(r->problems, *r->categorizer, r->indicators);
  }
  if (opt.format == "json") {
    std::cout << report.to_json().dump() << '\n';
  } else {
    std::cout << report.to_text();
  }
  return 0;
}

int cmd_train(const Options& opt) {
  const auto r = load_resources(opt, false);
  if (opt.lexicon.empty()) throw Error("train requires --lexicon for labels");
  if (opt.model.empty()) throw Error("train requires --model as the output path");
  FeatureVocabulary vocabulary;
  std::vector<std::pair<ContextWindow, VerbCategory>> windows;
  for (const WordProblem& p : r->problems) {
    for (const VerbOccurrence& occ : find_verb_occurrences(p)) {
      ContextWindow window = extract_window(
          p.sentences[static_cast<std::size_t>(occ.sentence_index)], occ.token_index);
      vocabulary.add_window(window);
      windows.emplace_back(std::move(window),
                           r->lexicon.lookup(occ.root).value_or(VerbCategory::NA));
    }
  }
  std::vector<std::pair<FeatureVector, VerbCategory>> samples;
  samples.reserve(windows.size());
  for (const auto& [window, label] : windows) {
    samples.emplace_back(featurize(window, vocabulary), label);
  }
  LinearHyperparams hyper;
  hyper.learning_rate = opt.learning_rate;
  hyper.epochs = opt.epochs;
  hyper.l2 = opt.l2;
  const LinearModel model = train_linear(samples, vocabulary.size(), hyper);
  save_linear_model(opt.model, model, vocabulary);
  std::cout << "trained on " << samples.size() << " verb occurrences, " << vocabulary.size()
            << " features -> " << opt.model << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rule-based Hindi arithmetic word-problem solver driven by verb categories"};
  app.require_subcommand(1);

  Options opt;
  app.set_config("--config")->envname("VERBSOLVE_CONFIG");
  app.add_option("--problems", opt.problems, "JSON-lines problem corpus")
      ->check(CLI::ExistingFile);
  app.add_option("--lexicon", opt.lexicon, "verb lexicon TSV: root<TAB>category")
      ->check(CLI::ExistingFile);
  app.add_option("--embeddings", opt.embeddings, "word vectors in text format")
      ->check(CLI::ExistingFile);
  app.add_option("--indicators", opt.indicators,
                 "question indicator TSV: polarity<TAB>word (built-in list when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--model", opt.model, "linear model file (output path for train)");
  app.add_option("--method", opt.method, "verb categorizer")
      ->check(CLI::IsMember({"lexicon", "knn", "linear"}));
  app.add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--k", opt.k, "cross-validation fold count");
  app.add_option("--seed", opt.seed, "fold shuffle seed");
  app.add_flag("--explain", opt.explain, "print derivation traces with answers");

  CLI::App* solve_cmd = app.add_subcommand("solve", "answer every problem in the corpus");
  CLI::App* categorize_cmd =
      app.add_subcommand("categorize", "print the category of every verb token");
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "cross-validate the categorizer or score the solver");
  eval_cmd->add_option("--task", opt.task, "what to evaluate")
      ->required()
      ->check(CLI::IsMember({"verbcat", "solver"}));
  eval_cmd->add_option("--fold-unit", opt.fold_unit, "shuffle whole problems or single samples")
      ->check(CLI::IsMember({"problem", "sample"}));
  CLI::App* train_cmd = app.add_subcommand("train", "fit the linear categorizer and save it");
  train_cmd->add_option("--lr", opt.learning_rate, "learning rate");
  train_cmd->add_option("--epochs", opt.epochs, "training epochs");
  train_cmd->add_option("--l2", opt.l2, "L2 regularization strength");

  for (CLI::App* sub : {solve_cmd, categorize_cmd, eval_cmd, train_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(opt);
    if (categorize_cmd->parsed()) return cmd_categorize(opt);
    if (eval_cmd->parsed()) return cmd_eval(opt);
    if (train_cmd->parsed()) return cmd_train(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
