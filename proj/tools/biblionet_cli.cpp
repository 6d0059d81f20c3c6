// Command-line front end: one-shot analyses, exports, fixtures and the server.
//
// JSON views go through AnalysisService so that the CLI and the HTTP API
// print identical documents for identical parameters.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "biblionet/corpus.hpp"
#include "biblionet/error.hpp"
#include "biblionet/exports.hpp"
#include "biblionet/fixtures.hpp"
#include "biblionet/network.hpp"
#include "biblionet/service.hpp"

namespace fs = std::filesystem;
using namespace biblionet;

namespace {

struct GlobalOptions {
  std::string corpus;
  std::uint64_t seed = 0;
  std::string lexicons;
  std::string gazetteer;
  bool drop_invalid = false;
  std::string format = "graphml";
};

ServiceConfig make_config(const GlobalOptions& g) {
  if (g.corpus.empty()) throw InvalidArgument("--corpus", "a corpus file is required");
  ServiceConfig config;
  config.corpus_path = g.corpus;
  config.seed = g.seed;
  if (!g.lexicons.empty()) config.lexicon_path = g.lexicons;
  if (!g.gazetteer.empty()) config.gazetteer_path = g.gazetteer;
  config.drop_invalid = g.drop_invalid;
  return config;
}

void write_output(const std::string& contents, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << contents;
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw Error("cannot open '" + out + "' for writing");
  file << contents;
  if (!file.flush()) throw Error("failed writing '" + out + "'");
}

// Runs one request through the service and returns the pretty-printed body.
std::string query(AnalysisService& service, const std::string& path, const QueryParams& params) {
  const auto response = service.handle("GET", path, params);
  const auto body = Json::parse(response.body);
  if (response.status != 200) {
    const auto& err = body.at("error");
    throw Error(err.at("message").get<std::string>());
  }
  return body.dump(2) + "\n";
}

struct NetworkOptions {
  std::string scope = "seed";
  std::uint64_t min_weight = 1;
  std::size_t level = 0;
  int iterations = 300;
};

std::string network_export(const CorpusSnapshot& snap, const NetworkOptions& opts, std::uint64_t seed,
                           GraphFormat format) {
  const auto graph = build_cooccurrence(snap.corpus, *parse_scope(opts.scope), opts.min_weight);
  Partition partition(graph.node_count(), 0);
  LayoutPositions positions(graph.node_count());
  if (graph.node_count() > 0) {
    const auto hierarchy = detect_communities(graph, seed);
    partition = cut_level(hierarchy, opts.level);
    positions = layout(graph, seed, opts.iterations);
  }
  return export_graph(graph, partition, positions, format);
}

GraphFormat graph_format(const std::string& name) {
  const auto format = parse_graph_format(name);
  if (!format) throw InvalidArgument("--format", "expected graphml or json");
  return *format;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biblionet: country, keyword-network and theme analyses over a publication corpus"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--corpus", g.corpus, "Corpus file (JSON lines)");
  app.add_option("--seed", g.seed, "Seed for community detection, layout and themes");
  app.add_option("--lexicons", g.lexicons, "Lexicon file (JSON lines: name, terms)");
  app.add_option("--gazetteer", g.gazetteer, "Gazetteer file (JSON lines: code, aliases)");
  app.add_flag("--drop-invalid", g.drop_invalid, "Drop records that fail validation instead of stopping");
  app.add_option("--format", g.format, "Graph export format")->check(CLI::IsMember({"graphml", "json"}));

  // validate
  auto* validate = app.add_subcommand("validate", "Report records that break corpus invariants");

  // summary
  auto* summary = app.add_subcommand("summary", "Print paper count, year range and keyword count");

  // geo
  auto* geo = app.add_subcommand("geo", "Country activity and classification");
  geo->require_subcommand(1);
  std::optional<int> from_year, to_year;
  auto* activity = geo->add_subcommand("activity", "Papers per country for a period");
  activity->add_option("--from", from_year, "First year (default: earliest in corpus)");
  activity->add_option("--to", to_year, "Last year (default: latest in corpus)");
  std::optional<std::size_t> classes_k, themes_k;
  std::string role = "studied", columns = "lexicons";
  auto* classes = geo->add_subcommand("classes", "Classify countries by thematic profile");
  classes->add_option("--k", classes_k, "Number of classes (default: min(4, countries))");
  classes->add_option("--role", role, "Country role")->check(CLI::IsMember({"studied", "affiliation"}));
  classes->add_option("--columns", columns, "Profile columns")->check(CLI::IsMember({"lexicons", "themes"}));
  classes->add_option("--themes-k", themes_k, "Theme count when --columns themes");

  // network
  NetworkOptions net;
  std::string network_out;
  auto* network = app.add_subcommand("network", "Keyword co-occurrence graph with communities and layout");
  network->add_option("--scope", net.scope, "Records to include")->check(CLI::IsMember({"seed", "neighborhood"}));
  network->add_option("--min-weight", net.min_weight, "Drop edges lighter than this")->check(CLI::PositiveNumber);
  network->add_option("--level", net.level, "Hierarchy level (clamped to the coarsest)");
  network->add_option("--iterations", net.iterations, "Layout iterations")->check(CLI::NonNegativeNumber);
  network->add_option("--out", network_out, "Output file (default: stdout)");

  // themes
  std::size_t k = kDefaultThemeCount, top = 50;
  std::optional<std::size_t> cloud;
  std::string themes_out;
  auto* themes = app.add_subcommand("themes", "Theme extraction and word clouds");
  themes->add_option("--k", k, "Number of themes")->check(CLI::PositiveNumber);
  themes->add_option("--top", top, "Terms per word cloud");
  themes->add_option("--cloud", cloud, "Print only this theme's word cloud");
  themes->add_option("--out", themes_out, "Output file (default: stdout)");

  // export
  std::string export_dir;
  auto* exporter = app.add_subcommand("export", "Write the prepared corpus and every view into a directory");
  exporter->add_option("--out", export_dir, "Output directory")->required();
  exporter->add_option("--k", k, "Number of themes")->check(CLI::PositiveNumber);

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t cache_capacity = 0;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP analysis service");
  serve_cmd->add_option("--host", host, "Address to bind");
  serve_cmd->add_option("--port", port, "Port (BIBLIONET_PORT overrides)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--cache-capacity", cache_capacity, "Maximum cached responses (0 = unbounded)");

  // fixtures
  std::string spec_path, fixture_out;
  auto* fixtures = app.add_subcommand("fixtures", "Generate a planted synthetic corpus");
  fixtures->add_option("--spec", spec_path, "Spec file (JSON)")->required()->check(CLI::ExistingFile);
  fixtures->add_option("--out", fixture_out, "Output corpus file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fixtures) {
      const auto spec = load_synthetic_spec(spec_path);
      write_output(generate_planted_corpus(spec), fixture_out);
      return 0;
    }

    if (*validate) {
      if (g.corpus.empty()) throw InvalidArgument("--corpus", "a corpus file is required");
      const auto report = validate_corpus(load_corpus(g.corpus));
      std::cout << violations_json(report).dump(2) << "\n";
      return report.empty() ? 0 : 1;
    }

    auto config = make_config(g);

    if (*serve_cmd) {
      config.host = host;
      config.port = port;
      config.cache_capacity = cache_capacity;
      apply_environment(config);
      serve(config);
      return 0;
    }

    AnalysisService service(config);
    service.reload();

    if (*summary) {
      std::cout << query(service, "/api/summary", {});
    } else if (*activity) {
      QueryParams params;
      if (from_year) params.emplace("from", std::to_string(*from_year));
      if (to_year) params.emplace("to", std::to_string(*to_year));
      std::cout << query(service, "/api/geo/activity", params);
    } else if (*classes) {
      QueryParams params{{"role", role}, {"columns", columns}};
      if (classes_k) params.emplace("k", std::to_string(*classes_k));
      if (themes_k) params.emplace("themesK", std::to_string(*themes_k));
      std::cout << query(service, "/api/geo/classes", params);
    } else if (*network) {
      write_output(network_export(*service.snapshot(), net, g.seed, graph_format(g.format)), network_out);
    } else if (*themes) {
      const QueryParams params{{"k", std::to_string(k)}, {"top", std::to_string(top)}};
      const auto path = cloud ? "/api/themes/" + std::to_string(*cloud) + "/cloud" : std::string("/api/themes");
      write_output(query(service, path, params), themes_out);
    } else if (*exporter) {
      const fs::path dir(export_dir);
      fs::create_directories(dir);
      const auto snap = service.snapshot();
      write_output(serialize_corpus(snap->corpus), (dir / "corpus.jsonl").string());
      write_output(query(service, "/api/summary", {}), (dir / "summary.json").string());
      write_output(query(service, "/api/geo/activity", {}), (dir / "activity.json").string());
      if (!snap->lexicons.empty()) {
        write_output(query(service, "/api/geo/classes", {}), (dir / "classes.json").string());
      }
      const auto format = graph_format(g.format);
      write_output(network_export(*snap, net, g.seed, format),
                   (dir / (format == GraphFormat::graphml ? "network.graphml" : "network.json")).string());
      write_output(query(service, "/api/themes", {{"k", std::to_string(k)}}), (dir / "themes.json").string());
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "biblionet: " << e.what() << "\n";
    return 1;
  }
}
