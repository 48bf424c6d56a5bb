#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "skillgraph/cascade.hpp"
#include "skillgraph/errors.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

struct LabeledOrphan {
  std::string orphan;
  std::string resume_id;
  std::string gold_destination;
};

// TSV orphan<TAB>resume_id<TAB>gold_destination, '#' comments.
inline std::vector<LabeledOrphan> load_gold(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open gold file: " + path.string());
  std::vector<LabeledOrphan> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw MalformedRow(line_no, "expected orphan<TAB>resume_id<TAB>gold_destination");
    LabeledOrphan g;
    g.orphan = to_lower(line.substr(0, t1));
    g.resume_id = line.substr(t1 + 1, t2 - t1 - 1);
    g.gold_destination = to_lower(line.substr(t2 + 1));
    if (g.orphan.empty() || g.resume_id.empty() || g.gold_destination.empty())
      throw MalformedRow(line_no, "empty field");
    out.push_back(std::move(g));
  }
  return out;
}

struct ModuleStats {
  std::size_t allocated = 0;
  std::size_t correct = 0;
};

struct AccuracyReport {
  std::size_t total = 0;
  std::size_t allocated = 0;
  std::size_t correct = 0;
  std::size_t unallocated = 0;
  // accuracy = 100 * correct / allocated; undefined (null) when nothing was allocated.
  std::optional<double> accuracy_percent;
  // coverage = 100 * allocated / total, reported separately from accuracy.
  std::optional<double> coverage_percent;
  std::map<Provenance, ModuleStats> per_module;
};

// An allocation counts as correct iff its destination string-matches the gold label.
// Every result must have exactly one gold entry keyed by (orphan, resume_id).
inline AccuracyReport evaluate(std::span<const AllocationResult> results,
                               std::span<const LabeledOrphan> gold) {
  std::map<std::pair<std::string, std::string>, std::string> by_key;
  for (const auto& g : gold) {
    auto [it, fresh] = by_key.emplace(std::make_pair(g.orphan, g.resume_id), g.gold_destination);
    if (!fresh)
      throw Error("duplicate gold entry for orphan '" + g.orphan + "' in resume '" +
                  g.resume_id + "'");
  }

  AccuracyReport report;
  report.total = results.size();
  for (const auto& r : results) {
    auto it = by_key.find({to_lower(r.orphan.surface), r.orphan.resume_id});
    if (it == by_key.end()) throw MissingGold(r.orphan.surface, r.orphan.resume_id);
    if (!r.outcome) {
      ++report.unallocated;
      continue;
    }
    ++report.allocated;
    auto& stats = report.per_module[r.outcome->module];
    ++stats.allocated;
    if (to_lower(r.outcome->destination) == it->second) {
      ++report.correct;
      ++stats.correct;
    }
  }
  if (report.allocated > 0)
    report.accuracy_percent = 100.0 * static_cast<double>(report.correct) /
                              static_cast<double>(report.allocated);
  if (report.total > 0)
    report.coverage_percent = 100.0 * static_cast<double>(report.allocated) /
                              static_cast<double>(report.total);
  return report;
}

inline nlohmann::ordered_json to_json(const AccuracyReport& r) {
  nlohmann::ordered_json j;
  j["total_orphans"] = r.total;
  j["total_allocated"] = r.allocated;
  j["correct"] = r.correct;
  j["unallocated"] = r.unallocated;
  if (r.accuracy_percent) j["accuracy_percent"] = *r.accuracy_percent;
  else j["accuracy_percent"] = nullptr;
  if (r.coverage_percent) j["coverage_percent"] = *r.coverage_percent;
  else j["coverage_percent"] = nullptr;
  nlohmann::ordered_json per_module;
  for (const auto& [module, stats] : r.per_module) {
    per_module[std::string(to_string(module))] = {{"allocated", stats.allocated},
                                                  {"correct", stats.correct}};
  }
  j["per_module"] = std::move(per_module);
  return j;
}

}  // namespace skillgraph
