#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "skillgraph/errors.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"

namespace skillgraph {

// Directory of .txt files, filename stem = resume id, sorted by id.
inline std::vector<RawDocument> load_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoFailure("not a directory: " + dir.string());
  std::vector<RawDocument> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw IoFailure("cannot open resume: " + entry.path().string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out.push_back({entry.path().stem().string(), std::move(text)});
  }
  std::sort(out.begin(), out.end(),
            [](const RawDocument& a, const RawDocument& b) { return a.id < b.id; });
  return out;
}

// TSV orphan<TAB>resume_id, '#' comments. Surfaces are lowercased on load.
inline std::vector<OrphanEntity> load_orphans(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open orphans file: " + path.string());
  std::vector<OrphanEntity> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw MalformedRow(line_no, "expected orphan<TAB>resume_id");
    out.push_back({to_lower(line.substr(0, tab)), line.substr(tab + 1)});
  }
  return out;
}

}  // namespace skillgraph
