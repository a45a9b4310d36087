#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace incinf {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class PreconditionViolation : public Error {
 public:
  PreconditionViolation(std::string change, std::string reason)
      : Error("PreconditionViolation", change + ": " + reason),
        change_(std::move(change)),
        reason_(std::move(reason)) {}

  const std::string& change() const noexcept { return change_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string change_;
  std::string reason_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("ParseError", "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidProbability : public Error {
 public:
  explicit InvalidProbability(const std::string& message)
      : Error("InvalidProbability", message) {}
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(std::size_t node)
      : Error("UnknownNode", "node " + std::to_string(node) + " is not in the graph") {}
};

class TooLarge : public Error {
 public:
  explicit TooLarge(const std::string& message) : Error("TooLarge", message) {}
};

class EmptyGraph : public Error {
 public:
  EmptyGraph() : Error("EmptyGraph", "graph has no nodes") {}
};

class InsufficientSeeds : public Error {
 public:
  InsufficientSeeds(std::size_t have, std::size_t want)
      : Error("InsufficientSeeds", "previous seed list has " + std::to_string(have) +
                                       " entries, " + std::to_string(want) + " requested") {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& message) : Error("InvalidConfig", message) {}
};

class ScenarioError : public Error {
 public:
  ScenarioError(std::string field, const std::string& message)
      : Error("ScenarioError", field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace incinf
