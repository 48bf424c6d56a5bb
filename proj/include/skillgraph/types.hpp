#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace skillgraph {

// Stage identity and edge provenance share one tag. External is the post-cascade
// existence check; the other four are the orderable cascade stages.
enum class Provenance { FastPath, Concept, Association, Ner, External };

constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::FastPath:    return "fastpath";
    case Provenance::Concept:     return "concept";
    case Provenance::Association: return "association";
    case Provenance::Ner:         return "ner";
    case Provenance::External:    return "external";
  }
  return "unknown";
}

inline std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "fastpath")    return Provenance::FastPath;
  if (s == "concept")     return Provenance::Concept;
  if (s == "association") return Provenance::Association;
  if (s == "ner")         return Provenance::Ner;
  if (s == "external")    return Provenance::External;
  return std::nullopt;
}

// A surface form that lacks disambiguating structure, plus the resume it came from.
struct OrphanEntity {
  std::string surface;
  std::string resume_id;
};

struct ScoredCandidate {
  std::string word;
  double distance = 0.0;
};

// Accept/decline outcome of one allocator stage. When declined, `best` carries the
// closest rejected candidate if anything was scoreable at all.
struct ModuleVerdict {
  bool accepted = false;
  std::optional<ScoredCandidate> best;

  static ModuleVerdict accept(std::string word, double distance) {
    return {true, ScoredCandidate{std::move(word), distance}};
  }
  static ModuleVerdict decline(std::optional<ScoredCandidate> b = std::nullopt) {
    return {false, std::move(b)};
  }
};

// How a candidate is scored against a context word list.
enum class Aggregation { Centroid, PairwiseMin };

inline std::optional<Aggregation> aggregation_from_string(std::string_view s) {
  if (s == "centroid") return Aggregation::Centroid;
  if (s == "pairwise_min") return Aggregation::PairwiseMin;
  return std::nullopt;
}

constexpr std::string_view to_string(Aggregation a) {
  return a == Aggregation::Centroid ? "centroid" : "pairwise_min";
}

}  // namespace skillgraph
