#pragma once

#include <cerrno>
#include <csignal>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "skillgraph/embeddings.hpp"
#include "skillgraph/errors.hpp"
#include "skillgraph/kgraph.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

struct TaggedEntity {
  std::string surface;  // the joined tokens of [begin, end)
  std::string label;
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

// Pluggable entity tagger. Implementations must be deterministic for a fixed
// model/gazetteer version.
class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<TaggedEntity> tag(const PreprocessedDocument& doc) const = 0;
};

// surface -> label. A std::map keeps iteration deterministic.
using Gazetteer = std::map<std::string, std::string>;

// TSV surface<TAB>label, multi-word surfaces allowed, '#' comments.
inline Gazetteer load_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open gazetteer: " + path.string());
  Gazetteer out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw MalformedRow(line_no, "expected surface<TAB>label");
    out[to_lower(line.substr(0, tab))] = line.substr(tab + 1);
  }
  return out;
}

// Longest-match-first scan over the token sequence; overlaps resolve left to right.
class GazetteerTagger : public Tagger {
 public:
  explicit GazetteerTagger(Gazetteer gazetteer) : gaz_(std::move(gazetteer)) {
    for (const auto& [surface, label] : gaz_) {
      std::size_t words = 1 + static_cast<std::size_t>(
                                  std::count(surface.begin(), surface.end(), ' '));
      max_words_ = std::max(max_words_, words);
    }
  }

  std::vector<TaggedEntity> tag(const PreprocessedDocument& doc) const override {
    std::vector<TaggedEntity> out;
    const std::size_t n = doc.tokens.size();
    std::size_t i = 0;
    while (i < n) {
      bool matched = false;
      for (std::size_t len = std::min(max_words_, n - i); len >= 1; --len) {
        std::string key = doc.tokens[i].surface;
        for (std::size_t w = 1; w < len; ++w) key += " " + doc.tokens[i + w].surface;
        auto it = gaz_.find(key);
        if (it != gaz_.end()) {
          out.push_back({std::move(key), it->second, i, i + len});
          i += len;
          matched = true;
          break;
        }
      }
      if (!matched) ++i;
    }
    return out;
  }

 private:
  Gazetteer gaz_;
  std::size_t max_words_ = 1;
};

// Adapter for an out-of-process tagger. The document's token surfaces go to the
// child's stdin one per line; the child answers with surface<TAB>label<TAB>start<TAB>end
// lines, start/end being a half-open token index range.
class ExternalProcessTagger : public Tagger {
 public:
  explicit ExternalProcessTagger(std::string command) : command_(std::move(command)) {}

  std::vector<TaggedEntity> tag(const PreprocessedDocument& doc) const override {
    std::string input;
    for (const auto& t : doc.tokens) {
      input += t.surface;
      input += '\n';
    }
    std::string output = run_child(input);

    std::vector<TaggedEntity> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < output.size()) {
      std::size_t nl = output.find('\n', start);
      if (nl == std::string::npos) nl = output.size();
      std::string_view line(output.data() + start, nl - start);
      start = nl + 1;
      ++line_no;
      if (line.empty()) continue;

      std::vector<std::string_view> fields;
      std::size_t fs = 0;
      while (true) {
        std::size_t tab = line.find('\t', fs);
        if (tab == std::string_view::npos) {
          fields.push_back(line.substr(fs));
          break;
        }
        fields.push_back(line.substr(fs, tab - fs));
        fs = tab + 1;
      }
      if (fields.size() != 4)
        throw MalformedRow(line_no, "tagger output needs surface<TAB>label<TAB>start<TAB>end");
      TaggedEntity e;
      e.surface = std::string(fields[0]);
      e.label = std::string(fields[1]);
      e.begin = parse_index(fields[2], line_no);
      e.end = parse_index(fields[3], line_no);
      if (e.begin >= e.end || e.end > doc.tokens.size())
        throw MalformedRow(line_no, "tagger span out of bounds");
      std::string joined = doc.tokens[e.begin].surface;
      for (std::size_t i = e.begin + 1; i < e.end; ++i) joined += " " + doc.tokens[i].surface;
      if (e.surface != joined)
        throw MalformedRow(line_no, "tagger surface '" + e.surface +
                                        "' does not match span tokens '" + joined + "'");
      out.push_back(std::move(e));
    }
    return out;
  }

 private:
  std::string command_;

  static std::size_t parse_index(std::string_view field, std::size_t line_no) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw MalformedRow(line_no, "bad token index: '" + std::string(field) + "'");
    return v;
  }

  std::string run_child(const std::string& input) const {
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0) throw IoFailure("pipe failed");
    if (pipe(out_pipe) != 0) {
      close(in_pipe[0]);
      close(in_pipe[1]);
      throw IoFailure("pipe failed");
    }

    pid_t pid = fork();
    if (pid < 0) {
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      throw IoFailure("fork failed");
    }
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);

    // A tagger that exits without draining stdin must surface as IoFailure, not
    // kill the process, so SIGPIPE is ignored for the duration of the write.
    struct sigaction ignore_pipe {};
    ignore_pipe.sa_handler = SIG_IGN;
    struct sigaction previous {};
    sigaction(SIGPIPE, &ignore_pipe, &previous);

    std::size_t written = 0;
    while (written < input.size()) {
      ssize_t w = write(in_pipe[1], input.data() + written, input.size() - written);
      if (w < 0) {
        if (errno == EINTR) continue;
        break;
      }
      written += static_cast<std::size_t>(w);
    }
    close(in_pipe[1]);
    sigaction(SIGPIPE, &previous, nullptr);

    std::string output;
    char buf[4096];
    while (true) {
      ssize_t r = read(out_pipe[0], buf, sizeof(buf));
      if (r < 0 && errno == EINTR) continue;
      if (r <= 0) break;
      output.append(buf, static_cast<std::size_t>(r));
    }
    close(out_pipe[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
      throw IoFailure("tagger command failed: " + command_);
    return output;
  }
};

// Stage-4 allocator: the tagger proposes source entities from the resume; the
// knowledge-graph node closest to any of them is the proposed destination. NER never
// mints destination nodes.
inline ModuleVerdict allocate_ner(const OrphanEntity& orphan, const PreprocessedDocument& doc,
                                  const KnowledgeGraph& kg, const EmbeddingStore& store,
                                  const Tagger& tagger, double threshold,
                                  const WordSet* label_allowlist = nullptr) {
  std::vector<EmbeddingStore::Vector> entity_vecs;
  for (const auto& entity : tagger.tag(doc)) {
    if (entity.surface == orphan.surface) continue;
    if (label_allowlist && !label_allowlist->empty() && !label_allowlist->count(entity.label))
      continue;
    auto v = phrase_vector(store, entity.surface);
    if (v && detail::norm(*v) != 0.0) entity_vecs.push_back(std::move(*v));
  }
  if (entity_vecs.empty()) return ModuleVerdict::decline();

  detail::ArgMin best;
  for (const auto& node : kg.nodes()) {
    if (node == orphan.surface) continue;
    auto nv = phrase_vector(store, node);
    if (!nv || detail::norm(*nv) == 0.0) continue;
    for (const auto& ev : entity_vecs) best.offer(node, cosine_distance(*nv, ev));
  }
  if (!best.best) return ModuleVerdict::decline();
  if (best.best->distance <= threshold)
    return ModuleVerdict::accept(best.best->word, best.best->distance);
  return ModuleVerdict::decline(best.best);
}

}  // namespace skillgraph
