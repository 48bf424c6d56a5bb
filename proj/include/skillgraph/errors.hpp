#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skillgraph {

// Base class for every recoverable failure raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A data-file row that cannot be parsed: wrong arity, bad number, broken invariant.
struct MalformedRow : Error {
  std::size_t line_no;
  MalformedRow(std::size_t line, const std::string& detail)
      : Error("line " + std::to_string(line) + ": " + detail), line_no(line) {}
};

struct InconsistentDimension : Error {
  std::size_t line_no;
  InconsistentDimension(std::size_t line, std::size_t expected, std::size_t got)
      : Error("line " + std::to_string(line) + ": expected " + std::to_string(expected) +
              " vector components, got " + std::to_string(got)),
        line_no(line) {}
};

struct EmptyFile : Error {
  explicit EmptyFile(const std::string& path) : Error("empty file: " + path) {}
};

struct ZeroVector : Error {
  ZeroVector() : Error("cosine distance undefined for a zero vector") {}
};

struct SelfLoop : Error {
  explicit SelfLoop(const std::string& node) : Error("self loop rejected on node: " + node) {}
};

struct SchemaViolation : Error {
  explicit SchemaViolation(const std::string& detail) : Error("schema violation: " + detail) {}
};

struct IoFailure : Error {
  explicit IoFailure(const std::string& detail) : Error("io failure: " + detail) {}
};

struct EmptyCorpus : Error {
  EmptyCorpus() : Error("corpus contains no documents") {}
};

struct MissingGold : Error {
  MissingGold(const std::string& orphan, const std::string& resume_id)
      : Error("no gold label for orphan '" + orphan + "' in resume '" + resume_id + "'") {}
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace skillgraph
