#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "skillgraph/embeddings.hpp"
#include "skillgraph/errors.hpp"
#include "skillgraph/porter.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

// Itemsets are kept sorted and duplicate-free.
using Itemset = std::vector<std::string>;

struct Transaction {
  std::set<std::string> items;
};

struct ItemsetSupport {
  Itemset itemset;
  double support = 0.0;
};

struct AssociationRule {
  Itemset antecedent;
  Itemset consequent;
  double support = 0.0;
  double confidence = 0.0;
  double lift = 0.0;
};

// One transaction per document in which the orphan occurs (surface match first, stem
// match as fallback). Items are the occurrence-window words as uni-grams, every
// adjacent pair of the window word list as a "w1 w2" bi-gram, plus the orphan itself.
inline std::vector<Transaction> build_transactions(std::span<const PreprocessedDocument> corpus,
                                                   std::string_view orphan, std::size_t radius) {
  if (corpus.empty()) throw EmptyCorpus();
  std::string orphan_stem = porter_stem(orphan);
  std::vector<Transaction> out;
  for (const auto& doc : corpus) {
    auto positions = occurrence_positions(doc, orphan);
    if (positions.empty()) positions = stem_occurrence_positions(doc, orphan_stem);
    if (positions.empty()) continue;
    auto window = window_for_positions(doc, orphan, positions, radius);
    Transaction t;
    t.items.emplace(orphan);
    for (const auto& w : window.words) t.items.insert(w);
    for (std::size_t i = 0; i + 1 < window.words.size(); ++i)
      t.items.insert(window.words[i] + " " + window.words[i + 1]);
    out.push_back(std::move(t));
  }
  return out;
}

namespace detail {

inline bool contains_all(const std::set<std::string>& transaction, const Itemset& itemset) {
  return std::includes(transaction.begin(), transaction.end(), itemset.begin(), itemset.end());
}

inline double support_of(std::span<const Transaction> transactions, const Itemset& itemset) {
  std::size_t count = 0;
  for (const auto& t : transactions)
    if (contains_all(t.items, itemset)) ++count;
  return static_cast<double>(count) / static_cast<double>(transactions.size());
}

}  // namespace detail

// Level-wise frequent itemset mining with the downward-closure prune. `max_size`
// caps the itemset size; 0 means unbounded. Output is sorted by (size, items).
inline std::vector<ItemsetSupport> apriori(std::span<const Transaction> transactions,
                                           double min_support, std::size_t max_size = 3) {
  std::vector<ItemsetSupport> out;
  if (transactions.empty()) return out;

  const double n = static_cast<double>(transactions.size());
  std::map<std::string, std::size_t> singles;
  for (const auto& t : transactions)
    for (const auto& item : t.items) ++singles[item];

  std::vector<Itemset> level;
  for (const auto& [item, count] : singles) {
    double support = static_cast<double>(count) / n;
    if (support >= min_support) {
      out.push_back({{item}, support});
      level.push_back({item});
    }
  }

  std::set<Itemset> frequent(level.begin(), level.end());
  std::size_t k = 2;
  while (!level.empty() && (max_size == 0 || k <= max_size)) {
    // Join step: pairs sharing their first k-2 items. The level is sorted, so joined
    // candidates come out sorted and duplicate-free.
    std::vector<Itemset> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        if (!std::equal(level[i].begin(), level[i].end() - 1, level[j].begin(),
                        level[j].end() - 1))
          break;
        Itemset cand = level[i];
        cand.push_back(level[j].back());

        // Prune: every (k-1)-subset must be frequent.
        bool prune = false;
        Itemset sub(cand.begin() + 1, cand.end());
        for (std::size_t drop = 0; drop <= sub.size(); ++drop) {
          if (!frequent.count(sub)) {
            prune = true;
            break;
          }
          if (drop < sub.size()) sub[drop] = cand[drop];
        }
        if (prune) continue;

        double support = detail::support_of(transactions, cand);
        if (support >= min_support) {
          out.push_back({cand, support});
          next.push_back(std::move(cand));
        }
      }
    }
    for (const auto& itemset : next) frequent.insert(itemset);
    level = std::move(next);
    ++k;
  }

  std::sort(out.begin(), out.end(), [](const ItemsetSupport& a, const ItemsetSupport& b) {
    if (a.itemset.size() != b.itemset.size()) return a.itemset.size() < b.itemset.size();
    return a.itemset < b.itemset;
  });
  return out;
}

// All rules A -> C with A ∪ C frequent, A and C nonempty and disjoint, passing the
// confidence and lift floors. Requires downward-closed input, as apriori produces.
inline std::vector<AssociationRule> derive_rules(std::span<const ItemsetSupport> frequent,
                                                 double min_confidence, double min_lift) {
  std::map<Itemset, double> support;
  for (const auto& f : frequent) support[f.itemset] = f.support;

  std::vector<AssociationRule> out;
  for (const auto& f : frequent) {
    const Itemset& s = f.itemset;
    if (s.size() < 2) continue;
    const std::size_t subsets = std::size_t{1} << s.size();
    for (std::size_t mask = 1; mask + 1 < subsets; ++mask) {
      AssociationRule rule;
      for (std::size_t bit = 0; bit < s.size(); ++bit)
        (mask >> bit & 1 ? rule.antecedent : rule.consequent).push_back(s[bit]);
      rule.support = f.support;
      rule.confidence = f.support / support.at(rule.antecedent);
      rule.lift = rule.confidence / support.at(rule.consequent);
      if (rule.confidence >= min_confidence && rule.lift >= min_lift)
        out.push_back(std::move(rule));
    }
  }
  std::sort(out.begin(), out.end(), [](const AssociationRule& a, const AssociationRule& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });
  return out;
}

struct AssocConfig {
  std::size_t radius = 5;
  double min_support = 0.05;
  double min_confidence = 0.3;
  double min_lift = 1.0;
  std::size_t max_itemset_size = 3;
  double threshold = 0.60;
  Aggregation aggregation = Aggregation::Centroid;
};

// Stage-3 allocator: mines corpus-wide co-occurrence rules around the orphan and
// proposes the rule word closest to the orphan's own context.
inline ModuleVerdict allocate_association(const OrphanEntity& orphan, const ContextWindow& ctx,
                                          std::span<const PreprocessedDocument> corpus,
                                          const EmbeddingStore& store, const AssocConfig& cfg) {
  auto transactions = build_transactions(corpus, orphan.surface, cfg.radius);
  if (transactions.empty()) return ModuleVerdict::decline();

  auto frequent = apriori(transactions, cfg.min_support, cfg.max_itemset_size);
  auto rules = derive_rules(frequent, cfg.min_confidence, cfg.min_lift);

  // Candidate words: uni-gram items of every rule that involves the orphan item;
  // bi-gram items contribute their component words.
  std::vector<std::string> candidates;
  std::unordered_set<std::string> seen;
  auto add_candidate = [&](const std::string& word) {
    if (word == orphan.surface) return;
    if (seen.insert(word).second) candidates.push_back(word);
  };
  for (const auto& rule : rules) {
    bool involves = std::binary_search(rule.antecedent.begin(), rule.antecedent.end(),
                                       orphan.surface) ||
                    std::binary_search(rule.consequent.begin(), rule.consequent.end(),
                                       orphan.surface);
    if (!involves) continue;
    for (const Itemset* side : {&rule.antecedent, &rule.consequent}) {
      for (const auto& item : *side) {
        auto space = item.find(' ');
        if (space == std::string::npos) {
          add_candidate(item);
        } else {
          add_candidate(item.substr(0, space));
          add_candidate(item.substr(space + 1));
        }
      }
    }
  }

  detail::ArgMin best;
  for (const auto& c : candidates) {
    auto d = context_distance(store, c, ctx.words, cfg.aggregation);
    if (d) best.offer(c, *d);
  }
  if (!best.best) return ModuleVerdict::decline();
  if (best.best->distance <= cfg.threshold)
    return ModuleVerdict::accept(best.best->word, best.best->distance);
  return ModuleVerdict::decline(best.best);
}

}  // namespace skillgraph
