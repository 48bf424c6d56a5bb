#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skillgraph/skillgraph.hpp"

namespace skillgraph {

namespace detail {

struct LoadedEngine {
  EngineConfig config;
  WordSet stopwords;
  LemmaTable lemmas;
  EmbeddingStore store;
  ConceptKB kb;
  std::unique_ptr<Tagger> tagger;
};

inline LoadedEngine load_engine(const std::filesystem::path& config_path) {
  LoadedEngine e;
  e.config = load_config(config_path);
  if (e.config.stopwords.empty()) throw ConfigError("config must set stopwords");
  if (e.config.embeddings.empty()) throw ConfigError("config must set embeddings");
  if (e.config.concept_kb.empty()) throw ConfigError("config must set concept_kb");
  e.stopwords = load_stopwords(e.config.stopwords);
  if (!e.config.lemmas.empty()) e.lemmas = load_lemmas(e.config.lemmas);
  e.store = EmbeddingStore::load(e.config.embeddings);
  e.kb = ConceptKB::load(e.config.concept_kb);
  if (!e.config.tagger_command.empty()) {
    e.tagger = std::make_unique<ExternalProcessTagger>(e.config.tagger_command);
  } else if (!e.config.gazetteer.empty()) {
    e.tagger = std::make_unique<GazetteerTagger>(load_gazetteer(e.config.gazetteer));
  } else {
    e.tagger = std::make_unique<GazetteerTagger>(Gazetteer{});
  }
  return e;
}

inline std::vector<PreprocessedDocument> preprocess_corpus(const std::filesystem::path& dir,
                                                           const WordSet& stopwords,
                                                           const LemmaTable& lemmas) {
  std::vector<PreprocessedDocument> out;
  for (const auto& raw : load_corpus_dir(dir)) out.push_back(normalize(raw, stopwords, lemmas));
  return out;
}

inline KnowledgeGraph load_or_new_graph(const std::filesystem::path& path) {
  return std::filesystem::exists(path) ? KnowledgeGraph::load(path) : KnowledgeGraph{};
}

}  // namespace detail

// Args exclude the program name. Exit codes: 0 success, 1 usage error, 2 data error.
inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"knowledge-graph orphan entity allocation"};
  app.name("skillgraph");
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "normalize a corpus directory into token files");
  std::string pre_corpus, pre_out, pre_stopwords, pre_lemmas;
  pre->add_option("--corpus", pre_corpus, "directory of .txt resumes")->required();
  pre->add_option("--out", pre_out, "output directory for token files")->required();
  pre->add_option("--stopwords", pre_stopwords, "stopword file")->required();
  pre->add_option("--lemmas", pre_lemmas, "lemma table (TSV)");

  // ingest-external
  auto* ingest = app.add_subcommand("ingest-external", "refresh the graph from a snapshot CSV");
  std::string ing_snapshot, ing_graph;
  ingest->add_option("--snapshot", ing_snapshot, "snapshot CSV")->required();
  ingest->add_option("--graph", ing_graph, "graph JSON file (created if missing)")->required();

  // allocate
  auto* alloc = app.add_subcommand("allocate", "allocate orphans against a corpus and graph");
  std::string al_orphans, al_corpus, al_graph, al_config, al_results = "results.ndjson";
  alloc->add_option("--orphans", al_orphans, "orphans TSV")->required();
  alloc->add_option("--corpus", al_corpus, "directory of .txt resumes")->required();
  alloc->add_option("--graph", al_graph, "graph JSON file (created if missing)")->required();
  alloc->add_option("--config", al_config, "engine config file")->required();
  alloc->add_option("--results", al_results, "results log to write (ndjson)");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score a results log against gold labels");
  std::string ev_results, ev_gold;
  eval_cmd->add_option("--results", ev_results, "results log (ndjson)")->required();
  eval_cmd->add_option("--gold", ev_gold, "gold TSV")->required();

  // export
  auto* exp = app.add_subcommand("export", "export the graph as dot, graphml or json");
  std::string ex_graph, ex_format = "dot", ex_out;
  exp->add_option("--graph", ex_graph, "graph JSON file")->required();
  exp->add_option("--format", ex_format, "dot | graphml | json")
      ->check(CLI::IsMember({"dot", "graphml", "json"}));
  exp->add_option("--out", ex_out, "output file (stdout when omitted)");

  try {
    std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed args
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help("", CLI::AppFormatMode::Sub);
    return 1;
  }

  try {
    if (*pre) {
      WordSet stopwords = load_stopwords(pre_stopwords);
      LemmaTable lemmas = pre_lemmas.empty() ? LemmaTable{} : load_lemmas(pre_lemmas);
      std::filesystem::create_directories(pre_out);
      std::size_t docs = 0;
      for (const auto& doc : detail::preprocess_corpus(pre_corpus, stopwords, lemmas)) {
        std::ofstream out(std::filesystem::path(pre_out) / (doc.id + ".tokens.tsv"),
                          std::ios::binary);
        if (!out) throw IoFailure("cannot write token file for " + doc.id);
        for (const auto& t : doc.tokens)
          out << t.position << '\t' << t.surface << '\t' << t.stem << '\t' << t.lemma << '\n';
        ++docs;
      }
      std::cout << "preprocessed " << docs << " documents into " << pre_out << "\n";
    } else if (*ingest) {
      KnowledgeGraph kg = detail::load_or_new_graph(ing_graph);
      auto records = load_snapshot(ing_snapshot);
      IngestReport report = ingest_external(kg, records);
      kg.save(ing_graph);
      nlohmann::ordered_json j;
      j["added_nodes"] = report.added_nodes;
      j["added_edges"] = report.added_edges;
      j["skipped"] = report.skipped;
      std::cout << j.dump(2) << "\n";
    } else if (*alloc) {
      auto engine = detail::load_engine(al_config);
      auto corpus = detail::preprocess_corpus(al_corpus, engine.stopwords, engine.lemmas);
      auto orphans = load_orphans(al_orphans);
      KnowledgeGraph kg = detail::load_or_new_graph(al_graph);
      Resources res{engine.store, engine.kb, *engine.tagger};
      auto results = allocate_batch(orphans, corpus, kg, res, engine.config.cascade);
      write_results(al_results, results);
      kg.save(al_graph);
      std::size_t allocated = 0;
      for (const auto& r : results)
        if (r.outcome) ++allocated;
      std::cout << "allocated " << allocated << "/" << results.size() << " orphans; graph now "
                << kg.node_count() << " nodes, " << kg.edge_count() << " edges\n";
    } else if (*eval_cmd) {
      auto results = read_results(ev_results);
      auto gold = load_gold(ev_gold);
      std::cout << to_json(evaluate(results, gold)).dump(2) << "\n";
    } else if (*exp) {
      KnowledgeGraph kg = KnowledgeGraph::load(ex_graph);
      std::string payload = ex_format == "dot"       ? kg.export_dot()
                            : ex_format == "graphml" ? kg.export_graphml()
                                                     : kg.export_json();
      if (ex_out.empty()) {
        std::cout << payload;
      } else {
        std::ofstream out(ex_out, std::ios::binary);
        if (!out) throw IoFailure("cannot open for writing: " + ex_out);
        out << payload;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace skillgraph
