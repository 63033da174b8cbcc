#pragma once

#include <stdexcept>
#include <string>

namespace gas {

// File-format problem: names the file and (1-based) line when known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
  ParseError(const std::string& file, std::size_t line, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg) {}
};

// Data is well-formed but violates a semantic constraint.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor shape disagreement.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// A (lemma, pos) pair that has no trained classifier entry. Callers decide
// whether to back off or propagate.
class UnseenTargetError : public std::runtime_error {
 public:
  UnseenTargetError(const std::string& lemma, const std::string& pos)
      : std::runtime_error("no classifier entry for target '" + lemma + "' (" + pos + ")"),
        lemma_(lemma),
        pos_(pos) {}
  const std::string& lemma() const { return lemma_; }
  const std::string& pos() const { return pos_; }

 private:
  std::string lemma_;
  std::string pos_;
};

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf surfaced anywhere in a computation.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gas
