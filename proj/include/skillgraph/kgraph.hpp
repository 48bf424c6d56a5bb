#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "skillgraph/embeddings.hpp"
#include "skillgraph/errors.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

struct GraphEdge {
  std::string source;
  std::string destination;
  Provenance provenance = Provenance::Concept;
  double weight = 1.0;
  std::string created_at;  // ISO-8601 UTC or empty
};

// An orphan-to-destination attachment produced by one pipeline stage.
struct Allocation {
  std::string orphan;
  std::string destination;
  Provenance module = Provenance::Concept;
  double distance = 0.0;
  std::string resume_id;
};

namespace detail {

// Shortest round-trip decimal form, used wherever floats are hand-formatted.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// Directed, provenance-labeled multigraph over lowercase entity strings. Edges are
// unique per (source, destination, provenance); self loops are rejected; every
// endpoint is a node. Neighborhood queries are undirected.
class KnowledgeGraph {
 public:
  struct EdgeKey {
    std::string source;
    std::string destination;
    Provenance provenance;
    bool operator<(const EdgeKey& o) const {
      return std::tie(source, destination, provenance) <
             std::tie(o.source, o.destination, o.provenance);
    }
    bool operator==(const EdgeKey& o) const = default;
  };
  struct EdgeAttr {
    double weight = 1.0;
    std::string created_at;
    bool operator==(const EdgeAttr& o) const = default;
  };

  bool has_node(std::string_view node) const { return nodes_.count(std::string(node)) != 0; }

  // True when the node was new.
  bool add_node(std::string_view node) {
    if (node.empty()) throw SchemaViolation("empty node name");
    return nodes_.insert(std::string(node)).second;
  }

  bool has_edge(std::string_view s, std::string_view d, Provenance p) const {
    return edges_.count(EdgeKey{std::string(s), std::string(d), p}) != 0;
  }

  const EdgeAttr* find_edge(std::string_view s, std::string_view d, Provenance p) const {
    auto it = edges_.find(EdgeKey{std::string(s), std::string(d), p});
    return it == edges_.end() ? nullptr : &it->second;
  }

  // Inserts nodes and edge together; returns true when the edge was new. An existing
  // edge is left untouched.
  bool add_edge(const GraphEdge& e) {
    if (e.source == e.destination) throw SelfLoop(e.source);
    add_node(e.source);
    add_node(e.destination);
    return edges_.emplace(EdgeKey{e.source, e.destination, e.provenance},
                          EdgeAttr{e.weight, e.created_at}).second;
  }

  void set_edge_created_at(std::string_view s, std::string_view d, Provenance p,
                           std::string created_at) {
    auto it = edges_.find(EdgeKey{std::string(s), std::string(d), p});
    if (it != edges_.end()) it->second.created_at = std::move(created_at);
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::map<EdgeKey, EdgeAttr>& edges() const { return edges_; }

  // Union of in- and out-neighbors, lexicographically sorted, self excluded.
  std::vector<std::string> neighbors(std::string_view node) const {
    std::set<std::string> out;
    for (const auto& [key, attr] : edges_) {
      if (key.source == node && key.destination != node) out.insert(key.destination);
      if (key.destination == node && key.source != node) out.insert(key.source);
    }
    return {out.begin(), out.end()};
  }

  // Every edge endpoint must be a node and no edge may loop.
  void check_integrity() const {
    for (const auto& [key, attr] : edges_) {
      if (key.source == key.destination) throw SchemaViolation("self loop: " + key.source);
      if (!nodes_.count(key.source)) throw SchemaViolation("dangling source: " + key.source);
      if (!nodes_.count(key.destination))
        throw SchemaViolation("dangling destination: " + key.destination);
    }
  }

  bool operator==(const KnowledgeGraph& o) const = default;

  // Canonical single-document serialization: sorted nodes, sorted edges.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : nodes_) doc["nodes"].push_back(n);
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& [key, attr] : edges_) {
      nlohmann::ordered_json e;
      e["s"] = key.source;
      e["d"] = key.destination;
      e["prov"] = std::string(to_string(key.provenance));
      e["w"] = attr.weight;
      e["t"] = attr.created_at;
      doc["edges"].push_back(std::move(e));
    }
    return doc;
  }

  static KnowledgeGraph from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaViolation("top-level value is not an object");
    if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"] != 1)
      throw SchemaViolation("missing or unsupported version");
    if (!doc.contains("nodes") || !doc["nodes"].is_array())
      throw SchemaViolation("missing nodes array");
    if (!doc.contains("edges") || !doc["edges"].is_array())
      throw SchemaViolation("missing edges array");

    KnowledgeGraph g;
    for (const auto& n : doc["nodes"]) {
      if (!n.is_string() || n.get<std::string>().empty())
        throw SchemaViolation("node is not a non-empty string");
      if (!g.add_node(n.get<std::string>()))
        throw SchemaViolation("duplicate node: " + n.get<std::string>());
    }
    for (const auto& e : doc["edges"]) {
      if (!e.is_object()) throw SchemaViolation("edge is not an object");
      for (const char* field : {"s", "d", "prov", "t"})
        if (!e.contains(field) || !e[field].is_string())
          throw SchemaViolation(std::string("edge field missing or not a string: ") + field);
      if (!e.contains("w") || !e["w"].is_number())
        throw SchemaViolation("edge field missing or not a number: w");

      auto prov = provenance_from_string(e["prov"].get<std::string>());
      if (!prov) throw SchemaViolation("unknown provenance: " + e["prov"].get<std::string>());
      std::string s = e["s"].get<std::string>();
      std::string d = e["d"].get<std::string>();
      if (s == d) throw SchemaViolation("self loop: " + s);
      if (!g.nodes_.count(s)) throw SchemaViolation("edge source not in nodes: " + s);
      if (!g.nodes_.count(d)) throw SchemaViolation("edge destination not in nodes: " + d);
      double w = e["w"].get<double>();
      if (!std::isfinite(w)) throw SchemaViolation("non-finite edge weight");
      if (!g.edges_.emplace(EdgeKey{std::move(s), std::move(d), *prov},
                            EdgeAttr{w, e["t"].get<std::string>()}).second)
        throw SchemaViolation("duplicate edge");
    }
    return g;
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open for writing: " + path.string());
    out << to_json().dump() << '\n';
    if (!out) throw IoFailure("write failed: " + path.string());
  }

  static KnowledgeGraph load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open graph file: " + path.string());
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaViolation(std::string("invalid json: ") + e.what());
    }
    return from_json(doc);
  }

  std::string export_dot() const {
    std::ostringstream out;
    out << "digraph skillgraph {\n";
    for (const auto& n : nodes_) out << "  \"" << detail::dot_escape(n) << "\";\n";
    for (const auto& [key, attr] : edges_) {
      out << "  \"" << detail::dot_escape(key.source) << "\" -> \""
          << detail::dot_escape(key.destination) << "\" [label=\""
          << to_string(key.provenance) << "\", weight=\""
          << detail::format_double(attr.weight) << "\"];\n";
    }
    out << "}\n";
    return out.str();
  }

  std::string export_graphml() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"prov\" for=\"edge\" attr.name=\"provenance\" attr.type=\"string\"/>\n"
        << "  <key id=\"w\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <key id=\"t\" for=\"edge\" attr.name=\"created_at\" attr.type=\"string\"/>\n"
        << "  <graph id=\"skillgraph\" edgedefault=\"directed\">\n";
    for (const auto& n : nodes_)
      out << "    <node id=\"" << detail::xml_escape(n) << "\"/>\n";
    for (const auto& [key, attr] : edges_) {
      out << "    <edge source=\"" << detail::xml_escape(key.source) << "\" target=\""
          << detail::xml_escape(key.destination) << "\">"
          << "<data key=\"prov\">" << to_string(key.provenance) << "</data>"
          << "<data key=\"w\">" << detail::format_double(attr.weight) << "</data>"
          << "<data key=\"t\">" << detail::xml_escape(attr.created_at) << "</data>"
          << "</edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
  }

  std::string export_json() const { return to_json().dump() + "\n"; }

 private:
  std::set<std::string> nodes_;
  std::map<EdgeKey, EdgeAttr> edges_;
};

// Commits an allocation: orphan and destination nodes plus the orphan->destination
// edge appear together. Re-upserting an identical allocation changes nothing.
inline void upsert_allocation(KnowledgeGraph& kg, const Allocation& alloc) {
  if (alloc.orphan == alloc.destination) throw SelfLoop(alloc.orphan);
  GraphEdge e;
  e.source = alloc.orphan;
  e.destination = alloc.destination;
  e.provenance = alloc.module;
  e.weight = 1.0;
  kg.add_edge(e);
}

// Stage-1 allocator: when the orphan is already a node, scores its existing
// neighborhood against the context and accepts the closest neighbor under the
// threshold. Never mutates the graph.
inline ModuleVerdict fastpath_allocate(const KnowledgeGraph& kg, std::string_view orphan,
                                       const ContextWindow& ctx, const EmbeddingStore& store,
                                       double threshold,
                                       Aggregation aggregation = Aggregation::Centroid) {
  if (!kg.has_node(orphan)) return ModuleVerdict::decline();
  detail::ArgMin best;
  for (const auto& n : kg.neighbors(orphan)) {
    auto d = context_distance(store, n, ctx.words, aggregation);
    if (d) best.offer(n, *d);
  }
  if (!best.best) return ModuleVerdict::decline();
  if (best.best->distance <= threshold)
    return ModuleVerdict::accept(best.best->word, best.best->distance);
  return ModuleVerdict::decline(best.best);
}

}  // namespace skillgraph
