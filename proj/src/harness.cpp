#include "verbsolve/harness.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "verbsolve/error.hpp"

namespace verbsolve {

const char* to_string(CategorizerMethod method) {
  switch (method) {
    case CategorizerMethod::Lexicon: return "lexicon";
    case CategorizerMethod::Knn: return "knn";
    case CategorizerMethod::Linear: return "linear";
  }
  return "lexicon";
}

const char* to_string(FailureTag tag) {
  switch (tag) {
    case FailureTag::Unsolvable: return "unsolvable";
    case FailureTag::WrongAnswer: return "wrong-answer";
  }
  return "unsolvable";
}

namespace {

struct FlatOccurrence {
  std::size_t problem_index = 0;
  VerbOccurrence occurrence;
  VerbCategory gold = VerbCategory::NA;
};

// Per-fold prediction for every test occurrence, trained only on the
// training occurrences.
std::vector<VerbCategory> predict_fold(const std::vector<WordProblem>& problems,
                                       const std::vector<FlatOccurrence>& train,
                                       const std::vector<FlatOccurrence>& test,
                                       const EmbeddingTable& embeddings,
                                       CategorizerMethod method,
                                       const LinearHyperparams& hyper) {
  std::vector<VerbCategory> preds;
  preds.reserve(test.size());

  switch (method) {
    case CategorizerMethod::Lexicon: {
      // The fold's "model" is the label table of its training verbs.
      std::map<std::string, VerbCategory> table;
      for (const FlatOccurrence& fo : train) table.emplace(fo.occurrence.root, fo.gold);
      for (const FlatOccurrence& fo : test) {
        auto it = table.find(fo.occurrence.root);
        preds.push_back(it != table.end() ? it->second : VerbCategory::NA);
      }
      break;
    }
    case CategorizerMethod::Knn: {
      std::vector<LabeledRoot> pairs;
      std::set<std::string> seen;
      for (const FlatOccurrence& fo : train) {
        if (seen.insert(fo.occurrence.root).second) {
          pairs.emplace_back(fo.occurrence.root, fo.gold);
        }
      }
      for (const FlatOccurrence& fo : test) {
        try {
          preds.push_back(categorize_knn(fo.occurrence.root, embeddings, pairs));
        } catch (const OovError&) {
          preds.push_back(VerbCategory::Observation);
        }
      }
      break;
    }
    case CategorizerMethod::Linear: {
      auto window_of = [&](const FlatOccurrence& fo) {
        const Sentence& sentence =
            problems[fo.problem_index].sentences[static_cast<std::size_t>(
                fo.occurrence.sentence_index)];
        return extract_window(sentence, fo.occurrence.token_index);
      };
      FeatureVocabulary vocab;
      std::vector<std::pair<FeatureVector, VerbCategory>> samples;
      std::vector<ContextWindow> windows;
      windows.reserve(train.size());
      for (const FlatOccurrence& fo : train) {
        windows.push_back(window_of(fo));
        vocab.add_window(windows.back());
      }
      samples.reserve(train.size());
      for (std::size_t i = 0; i < train.size(); ++i) {
        samples.emplace_back(featurize(windows[i], vocab), train[i].gold);
      }
      const LinearModel model = train_linear(samples, vocab.size(), hyper);
      for (const FlatOccurrence& fo : test) {
        preds.push_back(predict_linear(model, featurize(window_of(fo), vocab)));
      }
      break;
    }
  }
  return preds;
}

}  // namespace

EvalReport run_verbcat_cv(const std::vector<WordProblem>& problems, const VerbLexicon& lexicon,
                          const EmbeddingTable& embeddings, CategorizerMethod method, int k,
                          std::uint64_t seed, FoldUnit unit, const LinearHyperparams& hyper) {
  if (lexicon.entries.empty()) throw Error("run_verbcat_cv: lexicon supplies no labels");
  std::vector<FlatOccurrence> flat;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    for (VerbOccurrence& occ : find_verb_occurrences(problems[p])) {
      FlatOccurrence fo;
      fo.problem_index = p;
      fo.gold = lexicon.lookup(occ.root).value_or(VerbCategory::NA);
      fo.occurrence = std::move(occ);
      flat.push_back(std::move(fo));
    }
  }
  if (flat.empty()) throw Error("run_verbcat_cv: no verb occurrences in the corpus");

  EvalReport report;
  report.kind = ReportKind::Verbcat;
  report.method = to_string(method);
  report.k = k;
  report.seed = seed;
  report.fold_unit = unit == FoldUnit::ByProblem ? "problem" : "sample";
  report.total_occurrences = flat.size();

  std::vector<std::vector<std::size_t>> folds;
  if (unit == FoldUnit::ByProblem) {
    folds = split_kfold(problems.size(), k, seed);
  } else {
    folds = split_kfold(flat.size(), k, seed);
  }

  double weighted_sum = 0.0, macro_sum = 0.0;
  for (const auto& fold : folds) {
    std::vector<FlatOccurrence> train, test;
    if (unit == FoldUnit::ByProblem) {
      const std::set<std::size_t> held(fold.begin(), fold.end());
      for (const FlatOccurrence& fo : flat) {
        (held.count(fo.problem_index) ? test : train).push_back(fo);
      }
    } else {
      const std::set<std::size_t> held(fold.begin(), fold.end());
      for (std::size_t i = 0; i < flat.size(); ++i) {
        (held.count(i) ? test : train).push_back(flat[i]);
      }
    }
    if (test.empty() || train.empty()) {
      throw Error("run_verbcat_cv: fold with no test or no train occurrences; lower k");
    }
    const std::vector<VerbCategory> preds =
        predict_fold(problems, train, test, embeddings, method, hyper);
    std::vector<VerbCategory> golds;
    golds.reserve(test.size());
    for (const FlatOccurrence& fo : test) golds.push_back(fo.gold);

    const F1Report fold_report = evaluate_f1(preds, golds);
    report.folds.push_back({fold_report.weighted_f1, fold_report.macro_f1, fold_report.total});
    weighted_sum += fold_report.weighted_f1;
    macro_sum += fold_report.macro_f1;
    for (std::size_t g = 0; g < kCategoryCount; ++g) {
      for (std::size_t p = 0; p < kCategoryCount; ++p) {
        report.confusion[g][p] += fold_report.confusion[g][p];
      }
    }
  }
  report.mean_weighted_f1 = weighted_sum / static_cast<double>(folds.size());
  report.mean_macro_f1 = macro_sum / static_cast<double>(folds.size());
  return report;
}

EvalReport run_solver_eval(const std::vector<WordProblem>& problems,
                           const VerbCategorizer& categorizer,
                           const IndicatorLists& indicators) {
  if (problems.empty()) throw Error("run_solver_eval: no problems");
  EvalReport report;
  report.kind = ReportKind::Solver;
  report.method = categorizer.name();
  report.total_problems = problems.size();
  for (const WordProblem& p : problems) {
    if (!p.gold_answer) {
      throw Error("run_solver_eval: problem '" + p.id + "' has no gold_answer");
    }
    Answer answer = solve(p, categorizer, indicators);
    if (!answer.solved()) {
      report.failures.push_back(
          {p.id, FailureTag::Unsolvable, answer.failure, std::move(answer.trace)});
    } else if (*answer.value != *p.gold_answer) {
      report.failures.push_back({p.id, FailureTag::WrongAnswer,
                                 "predicted " + to_string(*answer.value) + ", gold " +
                                     to_string(*p.gold_answer),
                                 std::move(answer.trace)});
    } else {
      ++report.correct;
    }
  }
  report.accuracy =
      static_cast<double>(report.correct) / static_cast<double>(report.total_problems);
  return report;
}

// ---- rendering -----------------------------------------------------------------

namespace {
constexpr const char* kShortLabels[kCategoryCount] = {"Obs", "Pos", "Neg", "PTr", "NTr", "NA"};
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json doc;
  if (kind == ReportKind::Verbcat) {
    doc["task"] = "verbcat";
    doc["method"] = method;
    doc["k"] = k;
    doc["seed"] = seed;
    doc["fold_unit"] = fold_unit;
    nlohmann::json fold_rows = nlohmann::json::array();
    for (const FoldScore& f : folds) {
      fold_rows.push_back(
          {{"weighted_f1", f.weighted_f1}, {"macro_f1", f.macro_f1}, {"support", f.support}});
    }
    doc["folds"] = std::move(fold_rows);
    doc["mean_weighted_f1"] = mean_weighted_f1;
    doc["mean_macro_f1"] = mean_macro_f1;
    nlohmann::json labels = nlohmann::json::array();
    for (VerbCategory c : kAllCategories) labels.push_back(to_string(c));
    doc["labels"] = std::move(labels);
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto& row : confusion) {
      nlohmann::json r = nlohmann::json::array();
      for (std::size_t v : row) r.push_back(v);
      matrix.push_back(std::move(r));
    }
    doc["confusion"] = std::move(matrix);
    doc["total_occurrences"] = total_occurrences;
  } else {
    doc["task"] = "solver";
    doc["method"] = method;
    doc["total"] = total_problems;
    doc["correct"] = correct;
    doc["accuracy"] = accuracy;
    nlohmann::json fails = nlohmann::json::array();
    for (const SolverFailure& f : failures) {
      fails.push_back({{"id", f.problem_id},
                       {"tag", std::string(to_string(f.tag))},
                       {"detail", f.detail}});
    }
    doc["failures"] = std::move(fails);
  }
  return doc;
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  if (kind == ReportKind::Verbcat) {
    out << "verb categorization: method=" << method << " k=" << k << " seed=" << seed
        << " fold-unit=" << fold_unit << "\n\n";
    out << "  fold  weighted-F1  macro-F1  support\n";
    for (std::size_t i = 0; i < folds.size(); ++i) {
      out << std::setw(6) << (i + 1) << "  " << std::setw(11) << folds[i].weighted_f1 << "  "
          << std::setw(8) << folds[i].macro_f1 << "  " << std::setw(7) << folds[i].support
          << '\n';
    }
    out << "  mean  " << std::setw(11) << mean_weighted_f1 << "  " << std::setw(8)
        << mean_macro_f1 << '\n';
    out << "\nconfusion (rows gold, columns predicted):\n";
    out << "      ";
    for (const char* label : kShortLabels) out << std::setw(6) << label;
    out << '\n';
    for (std::size_t g = 0; g < kCategoryCount; ++g) {
      out << std::setw(6) << kShortLabels[g];
      for (std::size_t p = 0; p < kCategoryCount; ++p) out << std::setw(6) << confusion[g][p];
      out << '\n';
    }
    out << "\ntotal occurrences: " << total_occurrences << '\n';
  } else {
    out << "solver evaluation: method=" << method << ", " << correct << "/" << total_problems
        << " correct, accuracy " << accuracy << '\n';
    if (failures.empty()) {
      out << "no failures\n";
    } else {
      out << "failures:\n";
      for (const SolverFailure& f : failures) {
        out << "  " << f.problem_id << ": " << to_string(f.tag) << " (" << f.detail << ")\n";
      }
    }
  }
  return out.str();
}

}  // namespace verbsolve
