#pragma once

#include <cstddef>
#include <string>

#include "skillgraph/concept_kb.hpp"
#include "skillgraph/embeddings.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

struct ConceptOptions {
  std::size_t limit = 50;
  WordSet relation_allowlist;  // empty = every relation
  Aggregation aggregation = Aggregation::Centroid;
};

// Scores the knowledge base's related terms against the orphan's context and accepts
// the closest one iff it comes in at or under the threshold. KB weights only order
// the candidate list before truncation; the score is embedding distance alone.
inline ModuleVerdict allocate_concept(const OrphanEntity& orphan, const ContextWindow& ctx,
                                      const ConceptKB& kb, const EmbeddingStore& store,
                                      double threshold, const ConceptOptions& opts = {}) {
  auto candidates = kb.related(orphan.surface, opts.limit,
                               opts.relation_allowlist.empty() ? nullptr : &opts.relation_allowlist);
  detail::ArgMin best;
  for (const auto& c : candidates) {
    auto d = context_distance(store, c.term, ctx.words, opts.aggregation);
    if (d) best.offer(c.term, *d);
  }
  if (!best.best) return ModuleVerdict::decline();
  if (best.best->distance <= threshold)
    return ModuleVerdict::accept(best.best->word, best.best->distance);
  return ModuleVerdict::decline(best.best);
}

}  // namespace skillgraph
