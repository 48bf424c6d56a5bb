#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "skillgraph/external_linker.hpp"

using namespace skillgraph;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  auto dir = std::filesystem::temp_directory_path() / "sg_ext_test";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_snapshot parses the csv schema with rfc-4180 quoting") {
  auto path = write_temp("snap.csv",
                         "skill,category,source,retrieved_at\n"
                         "kubernetes,devops,coursera,2024-01-15T00:00:00Z\n"
                         "\"data, analysis\",analytics,linkedin,2024-02-01T00:00:00Z\n"
                         "\"quoted \"\"skill\"\"\",misc,coursera,2024-03-01T00:00:00Z\n");
  auto records = load_snapshot(path);
  REQUIRE(records.size() == 3);
  CHECK(records[0].skill == "kubernetes");
  CHECK(records[1].skill == "data, analysis");
  CHECK(records[2].skill == "quoted \"skill\"");
  CHECK(records[2].retrieved_at == "2024-03-01T00:00:00Z");
}

TEST_CASE("load_snapshot handles quoted newlines") {
  auto path = write_temp("nl.csv",
                         "skill,category,source,retrieved_at\n"
                         "\"multi\nline skill\",misc,coursera,2024-01-01T00:00:00Z\n");
  auto records = load_snapshot(path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].skill == "multi\nline skill");
}

TEST_CASE("load_snapshot rejects a wrong header or arity") {
  CHECK_THROWS_AS(load_snapshot(write_temp("hdr.csv", "a,b,c,d\nx,y,z,w\n")), MalformedRow);
  CHECK_THROWS_AS(
      load_snapshot(write_temp("arity.csv", "skill,category,source,retrieved_at\nx,y\n")),
      MalformedRow);
  CHECK_THROWS_AS(load_snapshot(write_temp("empty.csv", "")), EmptyFile);
}

TEST_CASE("ingest_external adds nodes and edges for fresh records") {
  KnowledgeGraph kg;
  std::vector<ExternalSkillRecord> records{
      {"kubernetes", "devops", "coursera", "2024-01-15T00:00:00Z"},
      {"terraform", "devops", "coursera", "2024-01-15T00:00:00Z"},
  };
  auto report = ingest_external(kg, records);
  CHECK(report.added_edges == 2);
  CHECK(report.added_nodes == 3);  // devops shared
  CHECK(report.skipped == 0);
  CHECK(kg.has_edge("kubernetes", "devops", Provenance::External));
  kg.check_integrity();
}

TEST_CASE("ingest_external is idempotent") {
  KnowledgeGraph kg;
  std::vector<ExternalSkillRecord> records{
      {"kubernetes", "devops", "coursera", "2024-01-15T00:00:00Z"},
      {"terraform", "devops", "coursera", "2024-01-15T00:00:00Z"},
  };
  ingest_external(kg, records);
  KnowledgeGraph once = kg;
  auto again = ingest_external(kg, records);
  CHECK(again.added_edges == 0);
  CHECK(again.added_nodes == 0);
  CHECK(again.skipped == 2);
  CHECK(kg == once);
}

TEST_CASE("ingest_external skips malformed records with reasons") {
  KnowledgeGraph kg;
  std::vector<ExternalSkillRecord> records{
      {"", "devops", "coursera", "2024-01-15T00:00:00Z"},
      {"skillx", "", "coursera", "2024-01-15T00:00:00Z"},
      {"same", "same", "coursera", "2024-01-15T00:00:00Z"},
  };
  auto report = ingest_external(kg, records);
  CHECK(report.added_edges == 0);
  CHECK(report.skipped == 3);
  REQUIRE(report.skip_reasons.size() == 3);
  CHECK(report.skip_reasons[0].find("empty skill") != std::string::npos);
}

TEST_CASE("ingest_external refreshes edge metadata for newer snapshots") {
  KnowledgeGraph kg;
  std::vector<ExternalSkillRecord> v1{{"kubernetes", "devops", "coursera", "2024-01-01T00:00:00Z"}};
  ingest_external(kg, v1);
  std::vector<ExternalSkillRecord> v2{{"kubernetes", "devops", "coursera", "2024-06-01T00:00:00Z"}};
  auto report = ingest_external(kg, v2);
  CHECK(report.added_edges == 0);
  CHECK(report.skipped == 1);
  const auto* attr = kg.find_edge("kubernetes", "devops", Provenance::External);
  REQUIRE(attr != nullptr);
  CHECK(attr->created_at == "2024-06-01T00:00:00Z");

  // an older snapshot never rolls the timestamp back
  ingest_external(kg, v1);
  CHECK(kg.find_edge("kubernetes", "devops", Provenance::External)->created_at ==
        "2024-06-01T00:00:00Z");
}

TEST_CASE("external_lookup hits on exact surface match") {
  KnowledgeGraph kg;
  std::vector<ExternalSkillRecord> records{{"kubernetes", "devops", "coursera", "2024-01-01T00:00:00Z"}};
  ingest_external(kg, records);
  auto verdict = external_lookup(kg, "kubernetes");
  REQUIRE(verdict.accepted);
  CHECK(verdict.best->word == "devops");
  CHECK(verdict.best->distance == 0.0);
}

TEST_CASE("external_lookup declines for unknown orphans") {
  KnowledgeGraph kg;
  std::vector<ExternalSkillRecord> records{{"kubernetes", "devops", "coursera", "2024-01-01T00:00:00Z"}};
  ingest_external(kg, records);
  auto verdict = external_lookup(kg, "underwater-basket-weaving");
  CHECK_FALSE(verdict.accepted);
  CHECK_FALSE(verdict.best.has_value());
}

TEST_CASE("external_lookup falls back to stem matching") {
  KnowledgeGraph kg;
  std::vector<ExternalSkillRecord> records{{"networking", "infrastructure", "linkedin", "2024-01-01T00:00:00Z"}};
  ingest_external(kg, records);
  // "networks" stems to "network", as does the ingested "networking"
  auto verdict = external_lookup(kg, "networks");
  REQUIRE(verdict.accepted);
  CHECK(verdict.best->word == "infrastructure");
  CHECK(verdict.best->distance == 0.0);
}

TEST_CASE("external_lookup ignores non-external edges") {
  KnowledgeGraph kg;
  kg.add_edge({"kubernetes", "devops", Provenance::Concept, 1.0, ""});
  CHECK_FALSE(external_lookup(kg, "kubernetes").accepted);
}

TEST_CASE("lookup soundness: accepted destination is one external hop from a skill") {
  KnowledgeGraph kg;
  std::vector<ExternalSkillRecord> records{
      {"kubernetes", "devops", "coursera", "2024-01-01T00:00:00Z"},
      {"kubernetes", "containers", "linkedin", "2024-01-01T00:00:00Z"},
      {"figma", "design", "coursera", "2024-01-01T00:00:00Z"},
  };
  ingest_external(kg, records);
  for (const auto& orphan : {"kubernetes", "figma"}) {
    auto verdict = external_lookup(kg, orphan);
    REQUIRE(verdict.accepted);
    CHECK(kg.has_edge(orphan, verdict.best->word, Provenance::External));
  }
  // multiple categories: the lexicographically smallest wins
  CHECK(external_lookup(kg, "kubernetes").best->word == "containers");
}
