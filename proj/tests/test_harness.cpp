#include <doctest.h>

#include <string>
#include <vector>

#include "verbsolve/harness.hpp"

#include "verbsolve/error.hpp"

#include "helpers.hpp"

using namespace verbsolve;
using testutil::data_path;
using testutil::make_problem;
using testutil::sent;

namespace {

// Corpus where every problem uses the same three verb roots, so any
// problem-level split leaves full coverage in the training side. With that
// property, a method that learns the roots at all must hit F1 = 1.0.
struct CvFixture {
    std::vector<WordProblem> problems;
    VerbLexicon lexicon;
    EmbeddingTable embeddings;
};

CvFixture shared_root_corpus(int problem_count = 4) {
    CvFixture fx;
    fx.lexicon.entries["va"] = VerbCategory::Positive;
    fx.lexicon.entries["vb"] = VerbCategory::Negative;
    fx.lexicon.entries["vc"] = VerbCategory::Observation;

    fx.embeddings.dimension = 3;
    fx.embeddings.vectors["va"] = {1, 0, 0};
    fx.embeddings.vectors["vb"] = {0, 1, 0};
    fx.embeddings.vectors["vc"] = {0, 0, 1};

    for (int i = 0; i < problem_count; ++i) {
        auto p = make_problem(
            "p" + std::to_string(i),
            {sent("raam|raam|NNP ko|ko|PSP 2|2|QC seb|seb|NN paye|va|VM"),
             sent("usane|vah|PRP 1|1|QC seb|seb|NN gavaye|vb|VM"),
             sent("kitane|kitana|WQ seb|seb|NN hain|vc|VM ?|?|SYM", true)});
        p.gold_answer = Rational(1);
        fx.problems.push_back(std::move(p));
    }
    return fx;
}

std::size_t support_sum(const EvalReport& report) {
    std::size_t total = 0;
    for (const auto& f : report.folds) total += f.support;
    return total;
}

}  // namespace

TEST_CASE("cv: full root coverage scores 1.0 for every method") {
    CvFixture fx = shared_root_corpus();

    for (auto method :
         {CategorizerMethod::Lexicon, CategorizerMethod::Knn, CategorizerMethod::Linear}) {
        CAPTURE(to_string(method));
        EvalReport rep = run_verbcat_cv(fx.problems, fx.lexicon, fx.embeddings, method,
                                        /*k=*/2, /*seed=*/1);
        CHECK(rep.kind == ReportKind::Verbcat);
        CHECK(rep.method == to_string(method));
        CHECK(rep.k == 2);
        CHECK(rep.fold_unit == "problem");
        REQUIRE(rep.folds.size() == 2);
        CHECK(rep.mean_weighted_f1 == doctest::Approx(1.0));
        CHECK(rep.mean_macro_f1 == doctest::Approx(1.0));
        // 3 verbs per problem, 4 problems; every occurrence lands in exactly
        // one test fold.
        CHECK(rep.total_occurrences == 12);
        CHECK(support_sum(rep) == 12);
        // A perfect run leaves the pooled confusion purely diagonal.
        std::size_t off_diagonal = 0;
        for (std::size_t g = 0; g < kCategoryCount; ++g)
            for (std::size_t p = 0; p < kCategoryCount; ++p)
                if (g != p) off_diagonal += rep.confusion[g][p];
        CHECK(off_diagonal == 0);
    }
}

TEST_CASE("cv: held-out problems really are held out") {
    // "vd" occurs in exactly one problem. Whenever that problem is in the
    // test fold, its root is absent from training, so the lexicon method
    // must answer NA there (not peek at the global lexicon).
    CvFixture fx = shared_root_corpus();
    fx.lexicon.entries["vd"] = VerbCategory::PositiveTransfer;
    fx.problems[3].sentences.insert(
        fx.problems[3].sentences.begin() + 1,
        sent("shyaam|shyaam|NNP ne|ne|PSP 1|1|QC seb|seb|NN liye|vd|VM"));

    EvalReport rep = run_verbcat_cv(fx.problems, fx.lexicon, fx.embeddings,
                                    CategorizerMethod::Lexicon, 2, 1);
    CHECK(rep.total_occurrences == 13);
    CHECK(rep.mean_weighted_f1 < 1.0);
    const auto ptr = static_cast<std::size_t>(VerbCategory::PositiveTransfer);
    const auto na = static_cast<std::size_t>(VerbCategory::NA);
    CHECK(rep.confusion[ptr][na] == 1);
}

TEST_CASE("cv: deterministic for a fixed seed") {
    CvFixture fx = shared_root_corpus(6);
    EvalReport a = run_verbcat_cv(fx.problems, fx.lexicon, fx.embeddings,
                                  CategorizerMethod::Knn, 3, 42);
    EvalReport b = run_verbcat_cv(fx.problems, fx.lexicon, fx.embeddings,
                                  CategorizerMethod::Knn, 3, 42);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.to_text() == b.to_text());
}

TEST_CASE("cv: sample-level folding changes the unit, not the bookkeeping") {
    CvFixture fx = shared_root_corpus();
    EvalReport rep = run_verbcat_cv(fx.problems, fx.lexicon, fx.embeddings,
                                    CategorizerMethod::Lexicon, 2, 7, FoldUnit::BySample);
    CHECK(rep.fold_unit == "sample");
    REQUIRE(rep.folds.size() == 2);
    CHECK(rep.folds[0].support == 6);
    CHECK(rep.folds[1].support == 6);
    CHECK(support_sum(rep) == rep.total_occurrences);
    CHECK(rep.mean_weighted_f1 >= 0.0);
    CHECK(rep.mean_weighted_f1 <= 1.0);
}

TEST_CASE("cv: input validation") {
    CvFixture fx = shared_root_corpus();

    VerbLexicon empty;
    CHECK_THROWS_AS(run_verbcat_cv(fx.problems, empty, fx.embeddings,
                                   CategorizerMethod::Lexicon, 2, 1),
                    Error);

    // k beyond the number of problems cannot be split.
    CHECK_THROWS_AS(run_verbcat_cv(fx.problems, fx.lexicon, fx.embeddings,
                                   CategorizerMethod::Lexicon, 5, 1),
                    Error);
    CHECK_THROWS_AS(run_verbcat_cv(fx.problems, fx.lexicon, fx.embeddings,
                                   CategorizerMethod::Lexicon, 1, 1),
                    Error);

    // A verbless corpus yields no occurrences.
    std::vector<WordProblem> verbless = {
        make_problem("v0", {sent("raam|raam|NNP"), sent("kitane|kitana|WQ ?|?|SYM", true)}),
        make_problem("v1", {sent("shyaam|shyaam|NNP"), sent("kitane|kitana|WQ ?|?|SYM", true)})};
    CHECK_THROWS_AS(run_verbcat_cv(verbless, fx.lexicon, fx.embeddings,
                                   CategorizerMethod::Lexicon, 2, 1),
                    Error);

    // A fold whose problems carry no verbs leaves the fold without test
    // occurrences; that is an error, not a silent skip.
    auto mixed = fx.problems;
    mixed.push_back(
        make_problem("bare", {sent("raam|raam|NNP"), sent("kitane|kitana|WQ ?|?|SYM", true)}));
    CHECK_THROWS_AS(run_verbcat_cv(mixed, fx.lexicon, fx.embeddings,
                                   CategorizerMethod::Lexicon, 5, 1),
                    Error);
}

TEST_CASE("solver eval: bundled corpus accuracy and failure tags") {
    auto problems = load_problems(data_path("problems_mini.jsonl"));
    VerbLexicon lex = load_lexicon(data_path("lexicon.tsv"));
    LexiconCategorizer cat(lex);

    EvalReport rep = run_solver_eval(problems, cat, default_indicators());
    CHECK(rep.kind == ReportKind::Solver);
    CHECK(rep.method == "lexicon");
    CHECK(rep.total_problems == 9);
    CHECK(rep.correct == 7);
    CHECK(rep.accuracy == doctest::Approx(7.0 / 9.0));

    REQUIRE(rep.failures.size() == 2);
    for (const auto& f : rep.failures) {
        CHECK(f.tag == FailureTag::WrongAnswer);
        CHECK_FALSE(f.trace.steps.empty());
    }
    CHECK(rep.failures[0].problem_id == "ram-matches");
    CHECK(rep.failures[0].detail == "predicted 44, gold 28");
    CHECK(rep.failures[1].problem_id == "zoo-set-completion");
    CHECK(rep.failures[1].detail == "predicted 4, gold 9");
}

TEST_CASE("solver eval: unsolvable problems are tagged, gold is mandatory") {
    VerbLexicon lex;
    lex.entries["ho"] = VerbCategory::Observation;
    LexiconCategorizer cat(lex);

    auto good = make_problem("good", {sent("raam|raam|NNP ke|ka|PSP paas|paas|NST 5|5|QC "
                                           "seb|seb|NN hain|ho|VM"),
                                      sent("kitane|kitana|WQ seb|seb|NN hain|ho|VM ?|?|SYM", true)});
    good.gold_answer = Rational(5);
    auto wrong = good;
    wrong.id = "wrong";
    wrong.gold_answer = Rational(99);
    auto stuck = make_problem("stuck", {sent("raam|raam|NNP so|so|VM"),
                                        sent("kitane|kitana|WQ seb|seb|NN hain|ho|VM ?|?|SYM", true)});
    stuck.gold_answer = Rational(1);

    EvalReport rep = run_solver_eval({good, wrong, stuck}, cat, default_indicators());
    CHECK(rep.total_problems == 3);
    CHECK(rep.correct == 1);
    CHECK(rep.accuracy == doctest::Approx(1.0 / 3.0));
    REQUIRE(rep.failures.size() == 2);
    CHECK(rep.failures[0].problem_id == "wrong");
    CHECK(rep.failures[0].tag == FailureTag::WrongAnswer);
    CHECK(rep.failures[1].problem_id == "stuck");
    CHECK(rep.failures[1].tag == FailureTag::Unsolvable);
    CHECK(rep.failures[1].detail == "no quantities found in body");

    auto missing = good;
    missing.id = "no-gold";
    missing.gold_answer.reset();
    CHECK_THROWS_AS(run_solver_eval({missing}, cat, default_indicators()), Error);
    CHECK_THROWS_AS(run_solver_eval({}, cat, default_indicators()), Error);
}

TEST_CASE("report rendering covers both kinds") {
    CvFixture fx = shared_root_corpus();
    EvalReport cv = run_verbcat_cv(fx.problems, fx.lexicon, fx.embeddings,
                                   CategorizerMethod::Lexicon, 2, 1);

    auto doc = cv.to_json();
    CHECK(doc["task"] == "verbcat");
    CHECK(doc["method"] == "lexicon");
    CHECK(doc["k"] == 2);
    CHECK(doc["seed"] == 1);
    CHECK(doc["folds"].size() == 2);
    CHECK(doc["mean_weighted_f1"] == doctest::Approx(1.0));
    REQUIRE(doc["confusion"].size() == kCategoryCount);
    CHECK(doc["confusion"][0].size() == kCategoryCount);
    CHECK(doc["labels"][0] == "Observation");
    CHECK(doc["total_occurrences"] == 12);

    std::string text = cv.to_text();
    CHECK(text.find("verb categorization") != std::string::npos);
    CHECK(text.find("mean") != std::string::npos);
    CHECK(text.find("rows gold") != std::string::npos);

    VerbLexicon lex = load_lexicon(data_path("lexicon.tsv"));
    LexiconCategorizer cat(lex);
    EvalReport sv = run_solver_eval(load_problems(data_path("problems_mini.jsonl")), cat,
                                    default_indicators());
    auto sdoc = sv.to_json();
    CHECK(sdoc["task"] == "solver");
    CHECK(sdoc["total"] == 9);
    CHECK(sdoc["correct"] == 7);
    REQUIRE(sdoc["failures"].size() == 2);
    CHECK(sdoc["failures"][0]["id"] == "ram-matches");
    CHECK(sdoc["failures"][0]["tag"] == "wrong-answer");

    std::string stext = sv.to_text();
    CHECK(stext.find("7/9 correct") != std::string::npos);
    CHECK(stext.find("ram-matches: wrong-answer") != std::string::npos);
}
