#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skillgraph/errors.hpp"
#include "skillgraph/kgraph.hpp"
#include "skillgraph/porter.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

struct ExternalSkillRecord {
  std::string skill;
  std::string category;
  std::string source;
  std::string retrieved_at;  // ISO-8601 UTC
};

namespace detail {

// RFC-4180 field splitting: quoted fields may contain commas, doubled quotes and
// newlines. Returns one row per record.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (row.size() > 1 || !row[0].empty()) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field += c;
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw MalformedRow(rows.size() + 1, "unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

}  // namespace detail

// Snapshot CSV with the exact header skill,category,source,retrieved_at.
inline std::vector<ExternalSkillRecord> load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open snapshot: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto rows = detail::parse_csv(text);
  if (rows.empty()) throw EmptyFile(path.string());
  const std::vector<std::string> header = {"skill", "category", "source", "retrieved_at"};
  if (rows[0] != header)
    throw MalformedRow(1, "expected header skill,category,source,retrieved_at");

  std::vector<ExternalSkillRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 4) throw MalformedRow(i + 1, "expected 4 fields");
    out.push_back({rows[i][0], rows[i][1], rows[i][2], rows[i][3]});
  }
  return out;
}

struct IngestReport {
  std::size_t added_nodes = 0;
  std::size_t added_edges = 0;
  std::size_t skipped = 0;
  std::vector<std::string> skip_reasons;
};

// Ensures skill and category nodes plus a skill->category edge with External
// provenance per record. Idempotent: identical records are counted as skipped; a
// strictly newer retrieved_at refreshes the stored timestamp in place.
inline IngestReport ingest_external(KnowledgeGraph& kg,
                                    std::span<const ExternalSkillRecord> records) {
  IngestReport report;
  auto skip = [&](const std::string& reason) {
    ++report.skipped;
    report.skip_reasons.push_back(reason);
  };
  for (const auto& record : records) {
    std::string skill = to_lower(record.skill);
    std::string category = to_lower(record.category);
    if (skill.empty()) {
      skip("empty skill");
      continue;
    }
    if (category.empty()) {
      skip("empty category for skill '" + skill + "'");
      continue;
    }
    if (skill == category) {
      skip("skill equals category: '" + skill + "'");
      continue;
    }
    if (const auto* attr = kg.find_edge(skill, category, Provenance::External)) {
      // ISO-8601 UTC timestamps in one format compare correctly as strings.
      if (record.retrieved_at > attr->created_at) {
        kg.set_edge_created_at(skill, category, Provenance::External, record.retrieved_at);
        skip("refreshed '" + skill + "' -> '" + category + "'");
      } else {
        skip("duplicate '" + skill + "' -> '" + category + "'");
      }
      continue;
    }
    report.added_nodes += kg.has_node(skill) ? 0u : 1u;
    report.added_nodes += kg.has_node(category) ? 0u : 1u;
    GraphEdge e;
    e.source = skill;
    e.destination = category;
    e.provenance = Provenance::External;
    e.weight = 1.0;
    e.created_at = record.retrieved_at;
    kg.add_edge(e);
    ++report.added_edges;
  }
  return report;
}

// Stage-5 existence check: the orphan is matched against skill nodes introduced with
// External provenance, exact surface first, then Porter stem (single-word skills
// only). A hit attaches the orphan to the matched skill's category node at distance
// zero. All choices are lexicographic-first for determinism.
inline ModuleVerdict external_lookup(const KnowledgeGraph& kg, std::string_view orphan) {
  const std::string surface(orphan);
  std::optional<std::string> exact_category;
  for (const auto& [key, attr] : kg.edges()) {
    if (key.provenance != Provenance::External) continue;
    if (key.source == surface && key.destination != surface) {
      exact_category = key.destination;  // edges are sorted, first hit is smallest
      break;
    }
  }
  if (exact_category) return ModuleVerdict::accept(*exact_category, 0.0);

  const std::string orphan_stem = porter_stem(surface);
  for (const auto& [key, attr] : kg.edges()) {
    if (key.provenance != Provenance::External) continue;
    if (key.destination == surface) continue;
    if (key.source.find(' ') != std::string::npos) continue;
    if (porter_stem(key.source) == orphan_stem)
      return ModuleVerdict::accept(key.destination, 0.0);
  }
  return ModuleVerdict::decline();
}

}  // namespace skillgraph
