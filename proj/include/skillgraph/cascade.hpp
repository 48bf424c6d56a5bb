#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "skillgraph/assoc_miner.hpp"
#include "skillgraph/concept_kb.hpp"
#include "skillgraph/concept_miner.hpp"
#include "skillgraph/embeddings.hpp"
#include "skillgraph/errors.hpp"
#include "skillgraph/external_linker.hpp"
#include "skillgraph/kgraph.hpp"
#include "skillgraph/ner.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

struct CascadeConfig {
  // Execution order of the four gated stages. The external existence check always
  // runs after them and is not orderable.
  std::vector<Provenance> stage_order{Provenance::FastPath, Provenance::Concept,
                                      Provenance::Association, Provenance::Ner};
  double threshold_fastpath = 0.50;
  double threshold_concept = 0.55;
  double threshold_association = 0.60;
  double threshold_ner = 0.50;
  std::size_t radius = 5;
  std::size_t concept_limit = 50;
  WordSet concept_relations;  // empty = every relation
  double min_support = 0.05;
  double min_confidence = 0.30;
  double min_lift = 1.0;
  std::size_t max_itemset_size = 3;
  bool external_overrides = true;
  Aggregation aggregation = Aggregation::Centroid;
  WordSet ner_labels;  // empty = every label

  void validate() const {
    if (stage_order.size() != 4) throw ConfigError("stage_order must name all four stages");
    std::vector<Provenance> seen;
    for (auto s : stage_order) {
      if (s == Provenance::External)
        throw ConfigError("external is not an orderable stage");
      if (std::find(seen.begin(), seen.end(), s) != seen.end())
        throw ConfigError("duplicate stage in stage_order");
      seen.push_back(s);
    }
    for (double t : {threshold_fastpath, threshold_concept, threshold_association, threshold_ner})
      if (t < 0.0 || t > 2.0) throw ConfigError("thresholds must lie in [0, 2]");
    if (radius == 0) throw ConfigError("radius must be >= 1");
    if (concept_limit == 0) throw ConfigError("concept_limit must be >= 1");
    if (min_support <= 0.0 || min_support > 1.0) throw ConfigError("min_support must lie in (0, 1]");
    if (min_confidence <= 0.0 || min_confidence > 1.0)
      throw ConfigError("min_confidence must lie in (0, 1]");
    if (min_lift < 0.0) throw ConfigError("min_lift must be >= 0");
  }

  AssocConfig assoc() const {
    return {radius, min_support, min_confidence, min_lift,
            max_itemset_size, threshold_association, aggregation};
  }
};

struct StageTrace {
  Provenance stage;
  ModuleVerdict verdict;
};

struct Allocated {
  std::string destination;
  Provenance module;
  double distance = 0.0;
};

struct AllocationResult {
  OrphanEntity orphan;
  std::optional<Allocated> outcome;  // nullopt = unallocated
  std::vector<StageTrace> trace;
};

// Read-only stores shared across one batch.
struct Resources {
  const EmbeddingStore& store;
  const ConceptKB& kb;
  const Tagger& tagger;
};

// Runs the gated stages in configured order until one accepts, then the mandatory
// external existence check. An external hit wins when nothing was accepted yet or
// when external_overrides is set. The winning allocation is committed to the graph,
// except fast-path hits, whose destination is already a neighbor.
inline AllocationResult allocate(const OrphanEntity& orphan, const PreprocessedDocument& doc,
                                 std::span<const PreprocessedDocument> corpus, KnowledgeGraph& kg,
                                 const Resources& res, const CascadeConfig& cfg) {
  cfg.validate();
  ContextWindow ctx = extract_context(doc, orphan.surface, cfg.radius);

  AllocationResult result{orphan, std::nullopt, {}};
  std::optional<std::pair<Provenance, ScoredCandidate>> winner;

  for (Provenance stage : cfg.stage_order) {
    ModuleVerdict verdict;
    switch (stage) {
      case Provenance::FastPath:
        verdict = fastpath_allocate(kg, orphan.surface, ctx, res.store, cfg.threshold_fastpath,
                                    cfg.aggregation);
        break;
      case Provenance::Concept:
        verdict = allocate_concept(orphan, ctx, res.kb, res.store, cfg.threshold_concept,
                                   {cfg.concept_limit, cfg.concept_relations, cfg.aggregation});
        break;
      case Provenance::Association:
        verdict = allocate_association(orphan, ctx, corpus, res.store, cfg.assoc());
        break;
      case Provenance::Ner:
        verdict = allocate_ner(orphan, doc, kg, res.store, res.tagger, cfg.threshold_ner,
                               cfg.ner_labels.empty() ? nullptr : &cfg.ner_labels);
        break;
      case Provenance::External:
        throw ConfigError("external is not an orderable stage");
    }
    bool accepted = verdict.accepted;
    if (accepted) winner = {stage, *verdict.best};
    result.trace.push_back({stage, std::move(verdict)});
    if (accepted) break;
  }

  ModuleVerdict ext = external_lookup(kg, orphan.surface);
  bool ext_accepted = ext.accepted;
  if (ext_accepted && (!winner || cfg.external_overrides))
    winner = {Provenance::External, *ext.best};
  result.trace.push_back({Provenance::External, std::move(ext)});

  if (winner) {
    result.outcome = Allocated{winner->second.word, winner->first, winner->second.distance};
    if (winner->first != Provenance::FastPath) {
      upsert_allocation(kg, {orphan.surface, winner->second.word, winner->first,
                             winner->second.distance, orphan.resume_id});
    }
  }
  return result;
}

// Sequential fold over the evolving graph: each orphan sees every earlier commit.
inline std::vector<AllocationResult> allocate_batch(std::span<const OrphanEntity> orphans,
                                                    std::span<const PreprocessedDocument> corpus,
                                                    KnowledgeGraph& kg, const Resources& res,
                                                    const CascadeConfig& cfg) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_id[corpus[i].id] = i;

  std::vector<AllocationResult> out;
  out.reserve(orphans.size());
  for (const auto& orphan : orphans) {
    auto it = by_id.find(orphan.resume_id);
    if (it == by_id.end())
      throw Error("orphan '" + orphan.surface + "' references unknown resume '" +
                  orphan.resume_id + "'");
    out.push_back(allocate(orphan, corpus[it->second], corpus, kg, res, cfg));
  }
  return out;
}

// --- results log (newline-delimited JSON, stable field order) ---

inline nlohmann::ordered_json to_json(const ModuleVerdict& v) {
  nlohmann::ordered_json j;
  j["accepted"] = v.accepted;
  if (v.best) {
    j["best"] = {{"word", v.best->word}, {"distance", v.best->distance}};
  } else {
    j["best"] = nullptr;
  }
  return j;
}

inline nlohmann::ordered_json to_json(const AllocationResult& r) {
  nlohmann::ordered_json j;
  j["orphan"] = r.orphan.surface;
  j["resume_id"] = r.orphan.resume_id;
  nlohmann::ordered_json outcome;
  outcome["allocated"] = r.outcome.has_value();
  if (r.outcome) {
    outcome["destination"] = r.outcome->destination;
    outcome["module"] = std::string(to_string(r.outcome->module));
    outcome["distance"] = r.outcome->distance;
  }
  j["outcome"] = std::move(outcome);
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const auto& t : r.trace) {
    nlohmann::ordered_json entry;
    entry["stage"] = std::string(to_string(t.stage));
    entry["accepted"] = t.verdict.accepted;
    entry["best"] = to_json(t.verdict)["best"];
    trace.push_back(std::move(entry));
  }
  j["trace"] = std::move(trace);
  return j;
}

inline AllocationResult result_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("orphan") || !j.contains("resume_id") ||
      !j.contains("outcome") || !j.contains("trace"))
    throw SchemaViolation("result document missing required fields");
  AllocationResult r;
  r.orphan.surface = j["orphan"].get<std::string>();
  r.orphan.resume_id = j["resume_id"].get<std::string>();
  const auto& outcome = j["outcome"];
  if (outcome["allocated"].get<bool>()) {
    auto prov = provenance_from_string(outcome["module"].get<std::string>());
    if (!prov) throw SchemaViolation("unknown module: " + outcome["module"].get<std::string>());
    r.outcome = Allocated{outcome["destination"].get<std::string>(), *prov,
                          outcome["distance"].get<double>()};
  }
  for (const auto& entry : j["trace"]) {
    auto stage = provenance_from_string(entry["stage"].get<std::string>());
    if (!stage) throw SchemaViolation("unknown stage: " + entry["stage"].get<std::string>());
    ModuleVerdict v;
    v.accepted = entry["accepted"].get<bool>();
    if (!entry["best"].is_null())
      v.best = ScoredCandidate{entry["best"]["word"].get<std::string>(),
                               entry["best"]["distance"].get<double>()};
    r.trace.push_back({*stage, std::move(v)});
  }
  return r;
}

inline void write_results(const std::filesystem::path& path,
                          std::span<const AllocationResult> results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path.string());
  for (const auto& r : results) out << to_json(r).dump() << '\n';
  if (!out) throw IoFailure("write failed: " + path.string());
}

inline std::vector<AllocationResult> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open results log: " + path.string());
  std::vector<AllocationResult> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(result_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRow(line_no, std::string("invalid result json: ") + e.what());
    }
  }
  return out;
}

}  // namespace skillgraph
