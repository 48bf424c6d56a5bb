#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "skillgraph/assoc_miner.hpp"

using namespace skillgraph;

namespace {

PreprocessedDocument doc_from_surfaces(const std::string& id,
                                       const std::vector<std::string>& words) {
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return normalize({id, text}, {});
}

// Brute-force oracle: enumerate every itemset over the item universe, compute its
// support by scanning, filter, sort the same way apriori reports.
std::vector<ItemsetSupport> brute_force_frequent(const std::vector<Transaction>& transactions,
                                                 double min_support, std::size_t max_size) {
  std::set<std::string> universe;
  for (const auto& t : transactions)
    for (const auto& item : t.items) universe.insert(item);
  std::vector<std::string> items(universe.begin(), universe.end());

  std::vector<ItemsetSupport> out;
  const std::size_t subsets = std::size_t{1} << items.size();
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    Itemset itemset;
    for (std::size_t bit = 0; bit < items.size(); ++bit)
      if (mask >> bit & 1) itemset.push_back(items[bit]);
    if (max_size != 0 && itemset.size() > max_size) continue;
    std::size_t count = 0;
    for (const auto& t : transactions)
      if (std::includes(t.items.begin(), t.items.end(), itemset.begin(), itemset.end())) ++count;
    double support = static_cast<double>(count) / static_cast<double>(transactions.size());
    if (support >= min_support) out.push_back({itemset, support});
  }
  std::sort(out.begin(), out.end(), [](const ItemsetSupport& a, const ItemsetSupport& b) {
    if (a.itemset.size() != b.itemset.size()) return a.itemset.size() < b.itemset.size();
    return a.itemset < b.itemset;
  });
  return out;
}

bool same_frequent(const std::vector<ItemsetSupport>& a, const std::vector<ItemsetSupport>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].itemset != b[i].itemset || a[i].support != b[i].support) return false;
  return true;
}

double hand_cosine_distance(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  return 1.0 - dot / (std::sqrt(nu) * std::sqrt(nv));
}

Transaction make_transaction(const std::vector<std::string>& items) {
  Transaction t;
  t.items.insert(items.begin(), items.end());
  return t;
}

}  // namespace

TEST_CASE("build_transactions emits one transaction per document containing the orphan") {
  std::vector<PreprocessedDocument> corpus{
      doc_from_surfaces("r1", {"expert", "python", "django"}),
      doc_from_surfaces("r2", {"design", "photoshop"}),
  };
  auto transactions = build_transactions(corpus, "python", 1);
  REQUIRE(transactions.size() == 1);
}

TEST_CASE("build_transactions items: window uni-grams, adjacent bi-grams, the orphan") {
  std::vector<PreprocessedDocument> corpus{
      doc_from_surfaces("r1", {"expert", "python", "django"})};
  auto transactions = build_transactions(corpus, "python", 1);
  REQUIRE(transactions.size() == 1);
  std::set<std::string> expected{"python", "expert", "django", "expert django"};
  CHECK(transactions[0].items == expected);
}

TEST_CASE("build_transactions is empty when the orphan never occurs") {
  std::vector<PreprocessedDocument> corpus{doc_from_surfaces("r1", {"a", "b"})};
  CHECK(build_transactions(corpus, "zzz", 2).empty());
}

TEST_CASE("build_transactions throws on an empty corpus") {
  std::vector<PreprocessedDocument> corpus;
  CHECK_THROWS_AS(build_transactions(corpus, "python", 2), EmptyCorpus);
}

TEST_CASE("build_transactions falls back to stem matching per document") {
  std::vector<PreprocessedDocument> corpus{
      doc_from_surfaces("r1", {"cisco", "network", "teams"})};
  auto transactions = build_transactions(corpus, "networking", 1);
  REQUIRE(transactions.size() == 1);
  // anchor token "network" is excluded; the orphan item is the orphan's own surface
  std::set<std::string> expected{"networking", "cisco", "teams", "cisco teams"};
  CHECK(transactions[0].items == expected);
}

TEST_CASE("apriori matches hand-enumerated supports") {
  std::vector<Transaction> transactions{
      make_transaction({"a", "b"}),
      make_transaction({"a", "c"}),
      make_transaction({"a", "b"}),
  };
  auto got = apriori(transactions, 2.0 / 3.0);
  REQUIRE(got.size() == 3);
  CHECK(got[0].itemset == Itemset{"a"});
  CHECK(got[0].support == 1.0);
  CHECK(got[1].itemset == Itemset{"b"});
  CHECK(got[1].support == 2.0 / 3.0);
  CHECK(got[2].itemset == Itemset{"a", "b"});
  CHECK(got[2].support == 2.0 / 3.0);

  auto strict = apriori(transactions, 1.0);
  REQUIRE(strict.size() == 1);
  CHECK(strict[0].itemset == Itemset{"a"});
}

TEST_CASE("apriori of an empty transaction list is empty") {
  std::vector<Transaction> transactions;
  CHECK(apriori(transactions, 0.5).empty());
}

TEST_CASE("apriori equals brute force on randomized corpora", "[property]") {
  std::mt19937 rng(31337);
  const std::vector<std::string> universe = {"i0", "i1", "i2", "i3", "i4",
                                             "i5", "i6", "i7", "i8", "i9"};
  std::uniform_real_distribution<double> supp(0.05, 0.9);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 1 + rng() % 20;
    std::vector<Transaction> transactions;
    for (std::size_t t = 0; t < n; ++t) {
      Transaction tr;
      for (const auto& item : universe)
        if (rng() % 3 == 0) tr.items.insert(item);
      transactions.push_back(std::move(tr));
    }
    double min_support = supp(rng);
    std::size_t max_size = trial % 2 == 0 ? 0 : 3;  // alternate unbounded and capped
    auto fast = apriori(transactions, min_support, max_size);
    auto slow = brute_force_frequent(transactions, min_support, max_size);
    REQUIRE(same_frequent(fast, slow));
  }
}

TEST_CASE("downward closure: every subset of a frequent itemset is frequent") {
  std::mt19937 rng(5150);
  const std::vector<std::string> universe = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Transaction> transactions;
    std::size_t n = 1 + rng() % 12;
    for (std::size_t t = 0; t < n; ++t) {
      Transaction tr;
      for (const auto& item : universe)
        if (rng() % 2 == 0) tr.items.insert(item);
      transactions.push_back(std::move(tr));
    }
    auto frequent = apriori(transactions, 0.3, 0);
    std::set<Itemset> reported;
    for (const auto& f : frequent) reported.insert(f.itemset);
    for (const auto& f : frequent) {
      if (f.itemset.size() < 2) continue;
      for (std::size_t drop = 0; drop < f.itemset.size(); ++drop) {
        Itemset sub;
        for (std::size_t i = 0; i < f.itemset.size(); ++i)
          if (i != drop) sub.push_back(f.itemset[i]);
        REQUIRE(reported.count(sub) == 1);
      }
    }
  }
}

TEST_CASE("raising min_support never adds a frequent itemset") {
  std::vector<Transaction> transactions{
      make_transaction({"a", "b", "c"}),
      make_transaction({"a", "b"}),
      make_transaction({"a"}),
      make_transaction({"b", "c"}),
  };
  auto loose = apriori(transactions, 0.25, 0);
  auto tight = apriori(transactions, 0.5, 0);
  std::set<Itemset> loose_sets;
  for (const auto& f : loose) loose_sets.insert(f.itemset);
  for (const auto& f : tight) REQUIRE(loose_sets.count(f.itemset) == 1);
  CHECK(tight.size() <= loose.size());
}

TEST_CASE("derive_rules computes confidence and lift from supports") {
  std::vector<Transaction> transactions{
      make_transaction({"a", "b"}),
      make_transaction({"a", "c"}),
      make_transaction({"a", "b"}),
  };
  auto frequent = apriori(transactions, 2.0 / 3.0);
  auto rules = derive_rules(frequent, 0.3, 0.0);

  // a -> b: confidence (2/3)/1 = 2/3, lift (2/3)/(2/3) = 1
  bool saw_ab = false;
  for (const auto& r : rules) {
    if (r.antecedent == Itemset{"a"} && r.consequent == Itemset{"b"}) {
      saw_ab = true;
      CHECK(r.confidence == Catch::Approx(2.0 / 3.0).margin(1e-12));
      CHECK(r.lift == Catch::Approx(1.0).margin(1e-12));
    }
  }
  CHECK(saw_ab);

  // confidence floor 0.9 kills a -> b but keeps b -> a (confidence 1)
  auto strict = derive_rules(frequent, 0.9, 0.0);
  for (const auto& r : strict) CHECK(!(r.antecedent == Itemset{"a"} && r.consequent == Itemset{"b"}));
  REQUIRE(strict.size() == 1);
  CHECK(strict[0].antecedent == Itemset{"b"});
  CHECK(strict[0].consequent == Itemset{"a"});
}

TEST_CASE("derive_rules over singletons only is empty") {
  std::vector<ItemsetSupport> frequent{{{"a"}, 1.0}, {{"b"}, 0.5}};
  CHECK(derive_rules(frequent, 0.1, 0.0).empty());
}

TEST_CASE("rule arithmetic invariants hold on random corpora", "[property]") {
  std::mt19937 rng(777);
  const std::vector<std::string> universe = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Transaction> transactions;
    std::size_t n = 2 + rng() % 15;
    for (std::size_t t = 0; t < n; ++t) {
      Transaction tr;
      for (const auto& item : universe)
        if (rng() % 2 == 0) tr.items.insert(item);
      if (tr.items.empty()) tr.items.insert("a");
      transactions.push_back(std::move(tr));
    }
    auto frequent = apriori(transactions, 0.2, 0);
    std::map<Itemset, double> support;
    for (const auto& f : frequent) support[f.itemset] = f.support;
    for (const auto& r : derive_rules(frequent, 0.1, 0.0)) {
      Itemset whole = r.antecedent;
      whole.insert(whole.end(), r.consequent.begin(), r.consequent.end());
      std::sort(whole.begin(), whole.end());
      REQUIRE(std::abs(r.confidence * support.at(r.antecedent) - support.at(whole)) <= 1e-9);
      REQUIRE(std::abs(r.lift * support.at(r.consequent) - r.confidence) <= 1e-9);
      // disjointness
      for (const auto& item : r.antecedent)
        REQUIRE(!std::binary_search(r.consequent.begin(), r.consequent.end(), item));
    }
  }
}

TEST_CASE("allocate_association runs the full chain on a four-document fixture") {
  // "python" co-occurs with "programming" in 3 of 4 documents
  std::vector<PreprocessedDocument> corpus{
      doc_from_surfaces("r1", {"expert", "python", "programming"}),
      doc_from_surfaces("r2", {"senior", "python", "programming"}),
      doc_from_surfaces("r3", {"python", "programming", "developer"}),
      doc_from_surfaces("r4", {"design", "photoshop"}),
  };
  EmbeddingStore store(2);
  store.insert("programming", {1.0, 0.0});
  store.insert("expert", {0.0, 0.2});
  store.insert("senior", {0.0, 0.3});
  store.insert("developer", {0.1, 0.4});

  ContextWindow ctx = extract_context(corpus[0], "python", 2);
  REQUIRE(ctx.words == std::vector<std::string>{"expert", "programming"});

  AssocConfig cfg;
  cfg.radius = 2;
  cfg.min_support = 0.05;
  cfg.min_confidence = 0.3;
  cfg.min_lift = 1.0;
  cfg.threshold = 0.60;

  auto verdict = allocate_association({"python", "r1"}, ctx, corpus, store, cfg);
  REQUIRE(verdict.accepted);
  CHECK(verdict.best->word == "programming");

  // independent recomputation: centroid of expert and programming vectors
  std::vector<double> centroid{(0.0 + 1.0) / 2, (0.2 + 0.0) / 2};
  double expected = hand_cosine_distance({1.0, 0.0}, centroid);
  CHECK(verdict.best->distance == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("allocate_association declines when the orphan is absent from the corpus") {
  std::vector<PreprocessedDocument> corpus{doc_from_surfaces("r1", {"a", "b", "c"})};
  EmbeddingStore store(2);
  store.insert("a", {1, 0});
  ContextWindow ctx{"zzz", {"a"}, 5};
  auto verdict = allocate_association({"zzz", "r1"}, ctx, corpus, store, {});
  CHECK_FALSE(verdict.accepted);
  CHECK_FALSE(verdict.best.has_value());
}

TEST_CASE("allocate_association declines when min_support outruns every itemset") {
  std::vector<PreprocessedDocument> corpus{
      doc_from_surfaces("r1", {"expert", "python", "programming"}),
      doc_from_surfaces("r2", {"python", "coding"}),
  };
  EmbeddingStore store(2);
  store.insert("programming", {1, 0});
  store.insert("expert", {0.9, 0.1});
  ContextWindow ctx = extract_context(corpus[0], "python", 2);
  AssocConfig cfg;
  cfg.min_support = 0.95;  // nothing except the orphan itself reaches this
  auto verdict = allocate_association({"python", "r1"}, ctx, corpus, store, cfg);
  CHECK_FALSE(verdict.accepted);
}

TEST_CASE("association gate soundness and threshold monotonicity") {
  std::mt19937 rng(909);
  std::uniform_real_distribution<double> comp(-1.0, 1.0);
  std::uniform_real_distribution<double> thresh(0.0, 2.0);
  const std::vector<std::string> vocab = {"w0", "w1", "w2", "w3", "orphan"};

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PreprocessedDocument> corpus;
    std::size_t docs = 1 + rng() % 4;
    for (std::size_t d = 0; d < docs; ++d) {
      std::vector<std::string> words;
      std::size_t len = 2 + rng() % 8;
      for (std::size_t i = 0; i < len; ++i) words.push_back(vocab[rng() % vocab.size()]);
      corpus.push_back(doc_from_surfaces("r" + std::to_string(d), words));
    }
    EmbeddingStore store(3);
    for (const auto& w : vocab) {
      std::vector<double> v(3);
      for (auto& x : v) x = comp(rng);
      store.insert(w, v);
    }
    ContextWindow ctx = extract_context(corpus[0], "orphan", 2);

    AssocConfig c1, c2;
    c1.radius = c2.radius = 2;
    double t1 = thresh(rng), t2 = thresh(rng);
    if (t1 > t2) std::swap(t1, t2);
    c1.threshold = t1;
    c2.threshold = t2;

    auto v1 = allocate_association({"orphan", "r0"}, ctx, corpus, store, c1);
    auto v2 = allocate_association({"orphan", "r0"}, ctx, corpus, store, c2);
    if (v1.accepted) {
      REQUIRE(v1.best->distance <= t1);
      REQUIRE(v2.accepted);
      REQUIRE(v2.best->word == v1.best->word);
    }
    if (v2.accepted) REQUIRE(v2.best->distance <= t2);
  }
}
