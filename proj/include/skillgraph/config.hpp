#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "skillgraph/cascade.hpp"
#include "skillgraph/errors.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

// Cascade parameters plus resource locations. Paths are resolved relative to the
// config file's directory when loaded from disk.
struct EngineConfig {
  CascadeConfig cascade;
  std::filesystem::path stopwords;
  std::filesystem::path lemmas;
  std::filesystem::path embeddings;
  std::filesystem::path concept_kb;
  std::filesystem::path gazetteer;
  std::string tagger_command;  // empty = built-in gazetteer tagger
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

inline double config_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError(key + ": not a number: '" + value + "'");
  return v;
}

inline std::size_t config_size(const std::string& key, const std::string& value) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError(key + ": not a non-negative integer: '" + value + "'");
  return v;
}

inline bool config_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    std::string item = trim(comma == std::string::npos ? value.substr(start)
                                                       : value.substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

// Flat `key = value` lines, '#' comments, unknown keys rejected.
inline EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config: " + path.string());
  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");
  auto resolve = [&](const std::string& value) -> std::filesystem::path {
    std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
  };

  EngineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = detail::trim(stripped.substr(0, eq));
    std::string value = detail::trim(stripped.substr(eq + 1));

    CascadeConfig& c = cfg.cascade;
    if (key == "threshold_fastpath") c.threshold_fastpath = detail::config_double(key, value);
    else if (key == "threshold_concept") c.threshold_concept = detail::config_double(key, value);
    else if (key == "threshold_association")
      c.threshold_association = detail::config_double(key, value);
    else if (key == "threshold_ner") c.threshold_ner = detail::config_double(key, value);
    else if (key == "radius") c.radius = detail::config_size(key, value);
    else if (key == "concept_limit") c.concept_limit = detail::config_size(key, value);
    else if (key == "concept_relations") {
      c.concept_relations.clear();
      for (auto& item : detail::split_list(value)) c.concept_relations.insert(item);
    } else if (key == "min_support") c.min_support = detail::config_double(key, value);
    else if (key == "min_confidence") c.min_confidence = detail::config_double(key, value);
    else if (key == "min_lift") c.min_lift = detail::config_double(key, value);
    else if (key == "max_itemset_size") c.max_itemset_size = detail::config_size(key, value);
    else if (key == "external_overrides") c.external_overrides = detail::config_bool(key, value);
    else if (key == "aggregation") {
      auto a = aggregation_from_string(value);
      if (!a) throw ConfigError(key + ": expected centroid or pairwise_min, got '" + value + "'");
      c.aggregation = *a;
    } else if (key == "stage_order") {
      c.stage_order.clear();
      for (auto& item : detail::split_list(value)) {
        auto p = provenance_from_string(item);
        if (!p) throw ConfigError(key + ": unknown stage '" + item + "'");
        c.stage_order.push_back(*p);
      }
    } else if (key == "ner_labels") {
      c.ner_labels.clear();
      for (auto& item : detail::split_list(value)) c.ner_labels.insert(item);
    } else if (key == "stopwords") cfg.stopwords = resolve(value);
    else if (key == "lemmas") cfg.lemmas = resolve(value);
    else if (key == "embeddings") cfg.embeddings = resolve(value);
    else if (key == "concept_kb") cfg.concept_kb = resolve(value);
    else if (key == "gazetteer") cfg.gazetteer = resolve(value);
    else if (key == "tagger_command") cfg.tagger_command = value;
    else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  cfg.cascade.validate();
  return cfg;
}

}  // namespace skillgraph
