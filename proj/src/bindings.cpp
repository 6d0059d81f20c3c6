#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "biblionet/corpus.hpp"
#include "biblionet/error.hpp"
#include "biblionet/exports.hpp"
#include "biblionet/fixtures.hpp"
#include "biblionet/geo.hpp"
#include "biblionet/network.hpp"
#include "biblionet/service.hpp"
#include "biblionet/text.hpp"
#include "biblionet/themes.hpp"

namespace py = pybind11;
using namespace biblionet;

namespace {

Scope scope_arg(const std::string& name) {
  const auto scope = parse_scope(name);
  if (!scope) throw InvalidArgument("scope", "expected 'seed' or 'neighborhood'");
  return *scope;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Publication corpus analyses: country profiles, keyword networks and themes";

  // Translators are tried newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Corpus>(m, "Corpus")
      .def(py::init<>())
      .def_static("from_file", [](const std::string& path) { return load_corpus(path); })
      .def_static("from_string", [](const std::string& contents) { return parse_corpus(contents); })
      .def("__len__", &Corpus::size)
      .def("__contains__", &Corpus::contains)
      .def("ids",
           [](const Corpus& c) {
             std::vector<std::string> ids;
             for (const auto& [id, paper] : c.papers()) ids.push_back(id);
             return ids;
           })
      .def("keyword_index", &Corpus::keyword_index)
      .def("to_jsonl", &serialize_corpus)
      .def("summary_json", [](const Corpus& c) { return summary_json(c).dump(); })
      .def("validate_json", [](const Corpus& c) { return violations_json(validate_corpus(c)).dump(); })
      .def("filter_period",
           [](const Corpus& c, int from_year, int to_year) {
             return filter_period(c, PeriodFilter{from_year, to_year});
           })
      .def("activity_json",
           [](const Corpus& c, int from_year, int to_year) {
             return activity_json(country_activity(c, PeriodFilter{from_year, to_year})).dump();
           })
      .def("coupling_links", [](const Corpus& c) {
        std::vector<std::tuple<std::string, std::string, std::uint64_t>> out;
        for (const auto& l : coupling_links(c)) out.emplace_back(l.a, l.b, l.weight);
        return out;
      });

  m.def("micro_corpus", &micro_corpus);
  m.def("generate_planted_corpus",
        [](const std::string& spec_json) { return generate_planted_corpus(parse_synthetic_spec(spec_json)); },
        py::arg("spec_json"));

  m.def("tokenize", &tokenize, py::arg("text"), py::arg("lang") = "en");

  py::class_<KeywordGraph>(m, "KeywordGraph")
      .def_property_readonly("nodes", &KeywordGraph::nodes)
      .def_property_readonly("frequency", &KeywordGraph::frequency)
      .def_property_readonly("edges",
                             [](const KeywordGraph& g) {
                               std::vector<std::tuple<std::string, std::string, std::uint64_t>> out;
                               for (const auto& e : g.edges()) {
                                 out.emplace_back(g.nodes()[e.source], g.nodes()[e.target], e.weight);
                               }
                               return out;
                             })
      .def("__len__", &KeywordGraph::node_count)
      .def("modularity", &modularity, py::arg("partition"), py::arg("resolution") = 1.0)
      .def(
          "communities",
          [](const KeywordGraph& g, std::uint64_t seed) {
            const auto h = detect_communities(g, seed);
            return std::make_pair(h.levels, h.modularity);
          },
          py::arg("seed") = 0,
          "Returns (levels, modularity): partitions from finest to coarsest and their Q.")
      .def(
          "layout",
          [](const KeywordGraph& g, std::uint64_t seed, int iterations) {
            std::vector<std::pair<double, double>> out;
            for (const auto& p : layout(g, seed, iterations)) out.emplace_back(p.x, p.y);
            return out;
          },
          py::arg("seed") = 0, py::arg("iterations") = 300)
      .def(
          "export",
          [](const KeywordGraph& g, std::uint64_t seed, std::size_t level, const std::string& format) {
            const auto fmt = parse_graph_format(format);
            if (!fmt) throw InvalidArgument("format", "expected 'graphml' or 'json'");
            if (g.node_count() == 0) return export_graph(g, {}, {}, *fmt);
            return export_graph(g, cut_level(detect_communities(g, seed), level), layout(g, seed), *fmt);
          },
          py::arg("seed") = 0, py::arg("level") = 0, py::arg("format") = "json");

  m.def(
      "cooccurrence",
      [](const Corpus& c, const std::string& scope, std::uint64_t min_weight) {
        return build_cooccurrence(c, scope_arg(scope), min_weight);
      },
      py::arg("corpus"), py::arg("scope") = "seed", py::arg("min_weight") = 1);

  m.def(
      "residuals",
      [](const std::vector<std::string>& rows, const std::vector<std::string>& cols,
         const std::vector<std::vector<std::uint64_t>>& counts) {
        return representation_residuals(ContingencyTable(rows, cols, counts)).residuals;
      },
      py::arg("rows"), py::arg("cols"), py::arg("counts"));

  m.def(
      "classify_countries",
      [](const std::vector<std::string>& rows, const std::vector<std::string>& cols,
         const std::vector<std::vector<std::uint64_t>>& counts, std::size_t k) {
        const auto cls = classify_countries(ContingencyTable(rows, cols, counts), k);
        std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>> dendrogram;
        for (const auto& d : cls.dendrogram) dendrogram.emplace_back(d.left, d.right, d.height, d.size);
        return std::make_pair(cls.assignment(), dendrogram);
      },
      py::arg("rows"), py::arg("cols"), py::arg("counts"), py::arg("k"));

  m.attr("DEFAULT_THEME_COUNT") = kDefaultThemeCount;
  m.def(
      "themes_json",
      [](const Corpus& c, std::size_t k, std::uint64_t seed, std::size_t top) {
        return themes_json(extract_themes(c, k, seed), top).dump();
      },
      py::arg("corpus"), py::arg("k") = kDefaultThemeCount, py::arg("seed") = 0, py::arg("top") = 50);
  m.def(
      "theme_assignment",
      [](const Corpus& c, std::size_t k, std::uint64_t seed) {
        const auto model = extract_themes(c, k, seed);
        std::map<std::string, std::size_t> out;
        for (const auto& [id, theme] : model.assignment) out.emplace(id, theme);
        return out;
      },
      py::arg("corpus"), py::arg("k") = kDefaultThemeCount, py::arg("seed") = 0);

  py::class_<AnalysisService>(m, "Service")
      .def(py::init([](std::uint64_t seed, std::size_t cache_capacity) {
             ServiceConfig config;
             config.seed = seed;
             config.cache_capacity = cache_capacity;
             return std::make_unique<AnalysisService>(config);
           }),
           py::arg("seed") = 0, py::arg("cache_capacity") = 0)
      .def(
          "install",
          [](AnalysisService& s, const Corpus& corpus, const std::string& lexicons_jsonl,
             const std::string& gazetteer_jsonl) {
            std::optional<Gazetteer> gazetteer;
            if (!gazetteer_jsonl.empty()) gazetteer = parse_gazetteer(gazetteer_jsonl);
            return s.install(corpus, parse_lexicons(lexicons_jsonl), std::move(gazetteer));
          },
          py::arg("corpus"), py::arg("lexicons_jsonl") = "", py::arg("gazetteer_jsonl") = "")
      .def(
          "handle",
          [](AnalysisService& s, const std::string& method, const std::string& path,
             const std::map<std::string, std::string>& params) {
            py::gil_scoped_release release;
            const auto r = s.handle(method, path, QueryParams(params.begin(), params.end()));
            return std::make_pair(r.status, r.body);
          },
          py::arg("method"), py::arg("path"), py::arg("params") = std::map<std::string, std::string>{})
      .def_property_readonly("cached_responses", &AnalysisService::cached_responses);
}
