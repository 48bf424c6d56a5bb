#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skillgraph/errors.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

namespace detail {

inline double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw MalformedRow(line_no, "not a number: '" + std::string(field) + "'");
  if (!std::isfinite(v))
    throw MalformedRow(line_no, "non-finite value: '" + std::string(field) + "'");
  return v;
}

inline double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

inline double norm(std::span<const double> u) {
  return std::sqrt(dot(u, u));
}

}  // namespace detail

// Immutable word -> dense vector map. All vectors share one dimension; words are
// stored lowercase; components are finite.
class EmbeddingStore {
 public:
  using Vector = std::vector<double>;

  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dimension) : dim_(dimension) {}

  // GloVe text convention: `word v1 v2 ... vd`, single-space separated, no header.
  // The first row fixes the dimension.
  static EmbeddingStore load(const std::filesystem::path& path,
                             const WordSet* vocab_filter = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open embedding file: " + path.string());
    EmbeddingStore store;
    std::string line;
    std::size_t line_no = 0;
    bool saw_row = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;

      std::vector<std::string_view> fields;
      std::string_view view = line;
      std::size_t start = 0;
      while (true) {
        std::size_t sp = view.find(' ', start);
        if (sp == std::string_view::npos) {
          fields.push_back(view.substr(start));
          break;
        }
        fields.push_back(view.substr(start, sp - start));
        start = sp + 1;
      }
      for (auto f : fields)
        if (f.empty()) throw MalformedRow(line_no, "empty field (double space?)");
      if (fields.size() < 2) throw MalformedRow(line_no, "row needs a word and at least one component");

      std::size_t arity = fields.size() - 1;
      if (!saw_row) {
        store.dim_ = arity;
        saw_row = true;
      } else if (arity != store.dim_) {
        throw InconsistentDimension(line_no, store.dim_, arity);
      }

      Vector vec(arity);
      for (std::size_t i = 0; i < arity; ++i) vec[i] = detail::parse_double(fields[i + 1], line_no);

      std::string word = to_lower(fields[0]);
      if (vocab_filter && !vocab_filter->count(word)) continue;
      store.vectors_.emplace(std::move(word), std::move(vec));
    }
    if (!saw_row) throw EmptyFile(path.string());
    return store;
  }

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  const Vector* find(std::string_view word) const {
    auto it = vectors_.find(std::string(word));
    return it == vectors_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view word) const { return find(word) != nullptr; }

  // Programmatic building for in-memory fixtures.
  void insert(std::string_view word, Vector v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) throw Error("vector dimension mismatch on insert");
    for (double x : v)
      if (!std::isfinite(x)) throw Error("non-finite component on insert");
    vectors_[to_lower(word)] = std::move(v);
  }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Vector> vectors_;
};

// 1 - cos(u, v), clamped into [0, 2] against rounding.
inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
  double nu = detail::norm(u);
  double nv = detail::norm(v);
  if (nu == 0.0 || nv == 0.0) throw ZeroVector();
  double d = 1.0 - detail::dot(u, v) / (nu * nv);
  if (d < 0.0) return 0.0;
  if (d > 2.0) return 2.0;
  return d;
}

namespace detail {

// Zero-length inputs never win; ties go to the lexicographically smaller word.
struct ArgMin {
  std::optional<ScoredCandidate> best;
  void offer(std::string_view word, double distance) {
    if (!best || distance < best->distance ||
        (distance == best->distance && word < best->word)) {
      best = ScoredCandidate{std::string(word), distance};
    }
  }
};

}  // namespace detail

// Minimum-distance candidate present in the store. Absent when the query is OOV, all
// candidates are OOV, or only zero vectors are involved.
inline std::optional<ScoredCandidate> nearest(const EmbeddingStore& store, std::string_view query,
                                              std::span<const std::string> candidates) {
  const auto* q = store.find(query);
  if (!q || detail::norm(*q) == 0.0) return std::nullopt;
  detail::ArgMin best;
  for (const auto& c : candidates) {
    const auto* v = store.find(c);
    if (!v || detail::norm(*v) == 0.0) continue;
    best.offer(c, cosine_distance(*q, *v));
  }
  return best.best;
}

// Unweighted mean of the context vectors that are in-vocabulary. Absent when none are.
inline std::optional<EmbeddingStore::Vector> context_centroid(const EmbeddingStore& store,
                                                              std::span<const std::string> context) {
  EmbeddingStore::Vector sum(store.dimension(), 0.0);
  std::size_t found = 0;
  for (const auto& w : context) {
    const auto* v = store.find(w);
    if (!v) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++found;
  }
  if (found == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(found);
  return sum;
}

// Distance from a candidate word to the centroid of its context. Absent when the
// candidate is OOV, no context word is in-vocabulary, or a zero vector blocks scoring.
inline std::optional<double> centroid_distance(const EmbeddingStore& store,
                                               std::string_view candidate,
                                               std::span<const std::string> context) {
  const auto* cv = store.find(candidate);
  if (!cv || detail::norm(*cv) == 0.0) return std::nullopt;
  auto centroid = context_centroid(store, context);
  if (!centroid || detail::norm(*centroid) == 0.0) return std::nullopt;
  return cosine_distance(*cv, *centroid);
}

inline std::optional<double> pairwise_min_distance(const EmbeddingStore& store,
                                                   std::string_view candidate,
                                                   std::span<const std::string> context) {
  const auto* cv = store.find(candidate);
  if (!cv || detail::norm(*cv) == 0.0) return std::nullopt;
  std::optional<double> best;
  for (const auto& w : context) {
    const auto* v = store.find(w);
    if (!v || detail::norm(*v) == 0.0) continue;
    double d = cosine_distance(*cv, *v);
    if (!best || d < *best) best = d;
  }
  return best;
}

inline std::optional<double> context_distance(const EmbeddingStore& store,
                                              std::string_view candidate,
                                              std::span<const std::string> context,
                                              Aggregation aggregation) {
  return aggregation == Aggregation::Centroid
             ? centroid_distance(store, candidate, context)
             : pairwise_min_distance(store, candidate, context);
}

// Whitespace-separated surfaces compose by unweighted mean over in-vocabulary parts.
inline std::optional<EmbeddingStore::Vector> phrase_vector(const EmbeddingStore& store,
                                                           std::string_view surface) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= surface.size()) {
    std::size_t sp = surface.find(' ', start);
    if (sp == std::string_view::npos) {
      if (start < surface.size()) parts.emplace_back(surface.substr(start));
      break;
    }
    if (sp > start) parts.emplace_back(surface.substr(start, sp - start));
    start = sp + 1;
  }
  return context_centroid(store, parts);
}

}  // namespace skillgraph
