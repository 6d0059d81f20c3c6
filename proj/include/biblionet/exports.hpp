#pragma once

// JSON documents shared by the command line tool and the HTTP service.

#include <optional>
#include <string_view>

#include "json.hpp"

#include "biblionet/corpus.hpp"
#include "biblionet/geo.hpp"
#include "biblionet/network.hpp"
#include "biblionet/themes.hpp"

namespace biblionet {

using Json = nlohmann::ordered_json;

std::string_view to_string(Representation label);
std::string_view to_string(CountryRole role);
std::string_view to_string(Scope scope);
std::optional<CountryRole> parse_role(std::string_view name);
std::optional<Scope> parse_scope(std::string_view name);

/// {papers, years: [min, max] | null, keywords}
Json summary_json(const Corpus& corpus);

/// {from, to, countries: [{code, n_authored, n_studied}]} sorted by code.
Json activity_json(const CountryActivity& activity);

/// Classification joined with activity counts and residuals, one record per
/// country sorted by code. Countries that could not be classified carry a
/// null class and empty residuals.
Json classification_json(const CountryActivity& activity, const ContingencyTable& table,
                         const ResidualMatrix& residuals,
                         const CountryClassification& classification, CountryRole role);

/// {nodes: [{id, frequency, community, x, y}], edges: [{source, target, weight}]}
Json graph_json(const KeywordGraph& graph, const Partition& partition,
                const LayoutPositions& positions);

/// {k, seed, themes: [{id, doc_count, color_rank, top_terms: [...]}]} sorted by id.
Json themes_json(const ThemeModel& model, std::size_t top_n);

/// {theme, doc_count, color_rank, entries: [{term, frequency, size}]}
Json word_cloud_json(const WordCloud& cloud);

Json violations_json(const std::vector<Violation>& report);

}  // namespace biblionet
