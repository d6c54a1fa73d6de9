#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace isos {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Term validation.
class UnknownOperator : public Error {
 public:
  using Error::Error;
};
class ArityMismatch : public Error {
 public:
  using Error::Error;
};
class UnexpectedHole : public Error {
 public:
  using Error::Error;
};
class OpenTerm : public Error {
 public:
  using Error::Error;
};

// A specification failed to provide exactly one rule for a trigger.
class RuleResolutionError : public Error {
 public:
  RuleResolutionError(std::string op, std::string trigger,
                      std::vector<std::string> labels, std::string what)
      : Error(std::move(what)),
        op_(std::move(op)),
        trigger_(std::move(trigger)),
        labels_(std::move(labels)) {}

  const std::string& op() const { return op_; }
  const std::string& trigger() const { return trigger_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Child-index path from the program root to the offending subterm.
  const std::vector<std::size_t>& path() const { return path_; }
  void set_path(std::vector<std::size_t> path) { path_ = std::move(path); }

  std::string describe() const {
    std::string out = what();
    out += " at path [";
    for (std::size_t i = 0; i < path_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(path_[i]);
    }
    out += "]";
    return out;
  }

 private:
  std::string op_;
  std::string trigger_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> path_;
};

class MissingRule : public RuleResolutionError {
 public:
  using RuleResolutionError::RuleResolutionError;
};

class AmbiguousRules : public RuleResolutionError {
 public:
  using RuleResolutionError::RuleResolutionError;
};

// A guard or opaque state expression read a variable it did not declare.
class ReadSetViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Feed-forward execution left the probe set of a resumption tree.
class ProbeMiss : public Error {
 public:
  explicit ProbeMiss(std::string state)
      : Error("state " + state + " is outside the probe set"),
        state_(std::move(state)) {}
  const std::string& state() const { return state_; }

 private:
  std::string state_;
};

class StuckConfiguration : public Error {
 public:
  using Error::Error;
};

}  // namespace isos
