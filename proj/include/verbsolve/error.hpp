#pragma once

#include <stdexcept>
#include <string>

namespace verbsolve {

// Base error for load failures, format violations and broken preconditions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the embedding-based categorizer when the query verb has no
// vector and no fallback is configured.
class OovError : public Error {
 public:
  explicit OovError(const std::string& root)
      : Error("no embedding for verb root '" + root + "'"), root_(root) {}
  const std::string& root() const { return root_; }

 private:
  std::string root_;
};

}  // namespace verbsolve
