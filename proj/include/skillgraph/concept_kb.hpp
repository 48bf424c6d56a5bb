#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skillgraph/embeddings.hpp"
#include "skillgraph/errors.hpp"
#include "skillgraph/text.hpp"

namespace skillgraph {

struct ConceptEdge {
  std::string relation;
  std::string start;
  std::string end;
  double weight = 0.0;
};

struct ConceptCandidate {
  std::string term;
  std::string relation;
  double weight = 0.0;
};

// File-backed related-terms knowledge base. Edges are indexed from both endpoints;
// multi-edges between the same pair are allowed.
class ConceptKB {
 public:
  // TSV relation<TAB>start<TAB>end<TAB>weight, lowercase terms, '#' comments.
  static ConceptKB load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open concept kb: " + path.string());
    ConceptKB kb;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;

      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
          fields.push_back(line.substr(start));
          break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
      }
      if (fields.size() != 4)
        throw MalformedRow(line_no, "expected relation<TAB>start<TAB>end<TAB>weight");

      ConceptEdge e;
      e.relation = fields[0];
      e.start = to_lower(fields[1]);
      e.end = to_lower(fields[2]);
      if (e.start.empty() || e.end.empty()) throw MalformedRow(line_no, "empty term");
      e.weight = detail::parse_double(fields[3], line_no);
      if (e.weight < 0.0) throw MalformedRow(line_no, "negative weight");
      kb.add_edge(std::move(e));
    }
    return kb;
  }

  void add_edge(ConceptEdge e) {
    std::size_t idx = edges_.size();
    by_term_[e.start].push_back(idx);
    if (e.end != e.start) by_term_[e.end].push_back(idx);
    edges_.push_back(std::move(e));
  }

  std::size_t edge_count() const { return edges_.size(); }

  // Terms sharing an edge with `term` in either direction, weight descending then
  // lexicographic, truncated to `limit`. Self-loop edges are ignored. A term linked
  // by several edges appears once, carrying its heaviest edge.
  std::vector<ConceptCandidate> related(std::string_view term, std::size_t limit,
                                        const WordSet* relation_allowlist = nullptr) const {
    std::vector<ConceptCandidate> out;
    auto it = by_term_.find(std::string(term));
    if (it == by_term_.end() || limit == 0) return out;

    std::unordered_map<std::string, std::size_t> slot;
    for (std::size_t idx : it->second) {
      const ConceptEdge& e = edges_[idx];
      if (e.start == e.end) continue;
      if (relation_allowlist && !relation_allowlist->empty() &&
          !relation_allowlist->count(e.relation))
        continue;
      const std::string& other = e.start == term ? e.end : e.start;
      auto found = slot.find(other);
      if (found == slot.end()) {
        slot.emplace(other, out.size());
        out.push_back({other, e.relation, e.weight});
      } else {
        ConceptCandidate& cur = out[found->second];
        if (e.weight > cur.weight || (e.weight == cur.weight && e.relation < cur.relation)) {
          cur.relation = e.relation;
          cur.weight = e.weight;
        }
      }
    }
    std::sort(out.begin(), out.end(), [](const ConceptCandidate& a, const ConceptCandidate& b) {
      if (a.weight != b.weight) return a.weight > b.weight;
      return a.term < b.term;
    });
    if (out.size() > limit) out.resize(limit);
    return out;
  }

 private:
  std::vector<ConceptEdge> edges_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_term_;
};

}  // namespace skillgraph
