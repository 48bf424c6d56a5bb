#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "skillgraph/errors.hpp"
#include "skillgraph/porter.hpp"

namespace skillgraph {

struct RawDocument {
  std::string id;
  std::string text;
};

struct Token {
  std::string surface;
  std::string stem;
  std::string lemma;
  std::size_t position = 0;
};

struct PreprocessedDocument {
  std::string id;
  std::vector<Token> tokens;
};

// Words appearing within `radius` tokens of an orphan occurrence, document order,
// de-duplicated, orphan surface excluded.
struct ContextWindow {
  std::string orphan_surface;
  std::vector<std::string> words;
  std::size_t radius = 0;
};

using WordSet = std::unordered_set<std::string>;
using LemmaTable = std::unordered_map<std::string, std::string>;

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

namespace detail {

// Bytes >= 0x80 are treated as word bytes so UTF-8 sequences stay inside one token.
inline bool word_byte(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

}  // namespace detail

// Splits lowercased text on non-alphanumeric runs. '-' and '.' survive between two
// alphanumerics ("node.js", "state-of-the-art"); '+' and '#' survive after an
// alphanumeric or after another kept '+'/'#' ("c++", "c#", "a+").
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (detail::word_byte(c)) {
      cur += c;
      continue;
    }
    if ((c == '-' || c == '.') && !cur.empty() && detail::word_byte(cur.back()) &&
        i + 1 < n && detail::word_byte(text[i + 1])) {
      cur += c;
      continue;
    }
    if ((c == '+' || c == '#') && !cur.empty() &&
        (detail::word_byte(cur.back()) || cur.back() == '+' || cur.back() == '#')) {
      cur += c;
      continue;
    }
    if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// One lowercase word per line; blank lines and '#' comments ignored.
inline WordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open stopword file: " + path.string());
  WordSet out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.insert(to_lower(line));
  }
  return out;
}

// TSV surface<TAB>lemma, lowercase. Blank lines and '#' comments ignored.
inline LemmaTable load_lemmas(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open lemma table: " + path.string());
  LemmaTable out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw MalformedRow(line_no, "expected surface<TAB>lemma");
    out[to_lower(line.substr(0, tab))] = to_lower(line.substr(tab + 1));
  }
  return out;
}

// lowercase -> tokenize -> drop stopwords -> attach stem and lemma. When no lemma
// entry exists the stem doubles as the lemma.
inline PreprocessedDocument normalize(const RawDocument& doc, const WordSet& stopwords,
                                      const LemmaTable& lemmas = {}) {
  PreprocessedDocument out{doc.id, {}};
  std::size_t pos = 0;
  for (auto& surface : tokenize(to_lower(doc.text))) {
    if (stopwords.count(surface)) continue;
    Token t;
    t.surface = surface;
    t.stem = porter_stem(surface);
    auto it = lemmas.find(surface);
    t.lemma = it != lemmas.end() ? it->second : t.stem;
    t.position = pos++;
    out.tokens.push_back(std::move(t));
  }
  return out;
}

inline std::vector<std::size_t> occurrence_positions(const PreprocessedDocument& doc,
                                                     std::string_view orphan) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i)
    if (doc.tokens[i].surface == orphan) out.push_back(i);
  return out;
}

inline std::vector<std::size_t> stem_occurrence_positions(const PreprocessedDocument& doc,
                                                          std::string_view orphan_stem) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i)
    if (doc.tokens[i].stem == orphan_stem) out.push_back(i);
  return out;
}

// Window words around explicit anchor positions, no fallback. Anchors themselves and
// any token matching the orphan surface are excluded.
inline ContextWindow window_for_positions(const PreprocessedDocument& doc, std::string_view orphan,
                                          std::span<const std::size_t> positions,
                                          std::size_t radius) {
  ContextWindow w{std::string(orphan), {}, radius};
  std::unordered_set<std::string> seen;
  std::unordered_set<std::size_t> anchors(positions.begin(), positions.end());
  for (std::size_t p : positions) {
    std::size_t lo = p >= radius ? p - radius : 0;
    std::size_t hi = std::min(doc.tokens.size(), p + radius + 1);
    for (std::size_t i = lo; i < hi; ++i) {
      if (anchors.count(i)) continue;
      const std::string& s = doc.tokens[i].surface;
      if (s == orphan) continue;
      if (seen.insert(s).second) w.words.push_back(s);
    }
  }
  return w;
}

// Context for every surface occurrence of the orphan; when the orphan is absent the
// document's first min(2*radius, |tokens|) tokens stand in so downstream scoring
// always has something to work with.
inline ContextWindow extract_context(const PreprocessedDocument& doc, std::string_view orphan,
                                     std::size_t radius) {
  if (radius == 0) throw std::invalid_argument("context radius must be >= 1");
  auto positions = occurrence_positions(doc, orphan);
  if (!positions.empty()) return window_for_positions(doc, orphan, positions, radius);

  ContextWindow w{std::string(orphan), {}, radius};
  std::unordered_set<std::string> seen;
  std::size_t limit = std::min(doc.tokens.size(), 2 * radius);
  for (std::size_t i = 0; i < limit; ++i) {
    const std::string& s = doc.tokens[i].surface;
    if (s == orphan) continue;
    if (seen.insert(s).second) w.words.push_back(s);
  }
  return w;
}

}  // namespace skillgraph
