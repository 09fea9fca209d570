#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "verbsolve/corpus.hpp"

namespace testutil {

inline std::string data_dir() {
  if (const char* env = std::getenv("VERBSOLVE_DATA")) return env;
  return "data";
}

inline std::string data_path(const std::string& name) { return data_dir() + "/" + name; }

// Self-deleting scratch file for loader tests.
class TempFile {
 public:
  explicit TempFile(const std::string& contents, const std::string& suffix = ".txt") {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("verbsolve_test_" + std::to_string(getpid()) + "_" + std::to_string(counter++) +
              suffix))
                .string();
    std::ofstream out(path_);
    out << contents;
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline verbsolve::Token tok(int index, std::string surface, std::string root, std::string pos,
                            std::string dep = "") {
  verbsolve::Token t;
  t.index = index;
  t.surface = std::move(surface);
  t.root = std::move(root);
  t.pos = std::move(pos);
  t.dep = std::move(dep);
  if (t.pos == "QC") t.number = verbsolve::try_parse_rational(t.surface);
  return t;
}

// Shorthand sentence builder: space-separated "surface|root|pos|dep" items
// (dep optional, root defaults to the surface).
inline verbsolve::Sentence sent(const std::string& spec, bool question = false) {
  verbsolve::Sentence s;
  s.is_question = question;
  std::istringstream ss(spec);
  std::string item;
  int index = 0;
  while (ss >> item) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto bar = item.find('|', start);
      if (bar == std::string::npos) {
        parts.push_back(item.substr(start));
        break;
      }
      parts.push_back(item.substr(start, bar - start));
      start = bar + 1;
    }
    while (parts.size() < 4) parts.emplace_back();
    s.tokens.push_back(
        tok(index++, parts[0], parts[1].empty() ? parts[0] : parts[1], parts[2], parts[3]));
  }
  return s;
}

inline verbsolve::WordProblem make_problem(std::string id,
                                           std::vector<verbsolve::Sentence> sentences) {
  verbsolve::WordProblem p;
  p.id = std::move(id);
  p.sentences = std::move(sentences);
  return p;
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI under test. Requires VERBSOLVE_BIN (set by ctest).
// `env_prefix` is prepended verbatim, e.g. "VERBSOLVE_CONFIG=/tmp/cfg".
inline CliResult run_cli(const std::string& args, bool merge_stderr = false,
                         const std::string& env_prefix = "") {
  const char* bin = std::getenv("VERBSOLVE_BIN");
  if (!bin) throw std::runtime_error("VERBSOLVE_BIN is not set; run through ctest");
  const std::string cmd = (env_prefix.empty() ? "" : env_prefix + " ") + std::string(bin) + " " +
                          args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
  CliResult result;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.output.append(buffer, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

}  // namespace testutil
