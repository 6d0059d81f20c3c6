#include "biblionet/exports.hpp"

#include <map>
#include <set>

namespace biblionet {

std::string_view to_string(Representation label) {
  switch (label) {
    case Representation::under: return "under";
    case Representation::neutral: return "neutral";
    case Representation::over: return "over";
  }
  return "neutral";
}

std::string_view to_string(CountryRole role) {
  return role == CountryRole::studied ? "studied" : "affiliation";
}

std::string_view to_string(Scope scope) {
  return scope == Scope::seed ? "seed" : "neighborhood";
}

std::optional<CountryRole> parse_role(std::string_view name) {
  if (name == "studied") return CountryRole::studied;
  if (name == "affiliation") return CountryRole::affiliation;
  return std::nullopt;
}

std::optional<Scope> parse_scope(std::string_view name) {
  if (name == "seed") return Scope::seed;
  if (name == "neighborhood") return Scope::neighborhood;
  return std::nullopt;
}

Json summary_json(const Corpus& corpus) {
  Json doc;
  doc["papers"] = corpus.size();
  if (corpus.empty()) {
    doc["years"] = nullptr;
  } else {
    doc["years"] = Json::array({*corpus.min_year(), *corpus.max_year()});
  }
  doc["keywords"] = corpus.keyword_index().size();
  return doc;
}

Json activity_json(const CountryActivity& activity) {
  Json doc;
  doc["from"] = activity.period.from_year;
  doc["to"] = activity.period.to_year;
  doc["countries"] = Json::array();
  for (const auto& [code, counts] : activity.countries) {
    doc["countries"].push_back(
        Json{{"code", code}, {"n_authored", counts.n_authored}, {"n_studied", counts.n_studied}});
  }
  return doc;
}

Json classification_json(const CountryActivity& activity, const ContingencyTable& table,
                         const ResidualMatrix& residuals,
                         const CountryClassification& classification, CountryRole role) {
  std::set<std::string> codes;
  for (const auto& [code, counts] : activity.countries) codes.insert(code);
  for (const auto& code : table.rows()) codes.insert(code);

  const auto classes = classification.assignment();
  std::map<std::string, std::size_t> residual_row;
  for (std::size_t r = 0; r < residuals.rows.size(); ++r) residual_row[residuals.rows[r]] = r;

  Json doc;
  doc["role"] = std::string(to_string(role));
  doc["k"] = classification.k;
  doc["columns"] = table.cols();
  doc["countries"] = Json::array();
  for (const auto& code : codes) {
    Json rec;
    rec["code"] = code;
    const auto act = activity.countries.find(code);
    rec["n_authored"] = act == activity.countries.end() ? 0 : act->second.n_authored;
    rec["n_studied"] = act == activity.countries.end() ? 0 : act->second.n_studied;
    const auto cls = classes.find(code);
    rec["class"] = cls == classes.end() ? Json(nullptr) : Json(cls->second);
    Json res = Json::object(), labels = Json::object();
    if (const auto row = residual_row.find(code); row != residual_row.end()) {
      for (std::size_t c = 0; c < residuals.cols.size(); ++c) {
        res[residuals.cols[c]] = residuals.residuals[row->second][c];
        labels[residuals.cols[c]] = std::string(to_string(residuals.labels[row->second][c]));
      }
    }
    rec["residuals"] = std::move(res);
    rec["labels"] = std::move(labels);
    doc["countries"].push_back(std::move(rec));
  }
  doc["dendrogram"] = Json::array();
  for (const auto& m : classification.dendrogram) {
    doc["dendrogram"].push_back(
        Json{{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  }
  doc["excluded"] = classification.excluded;
  return doc;
}

Json graph_json(const KeywordGraph& graph, const Partition& partition,
                const LayoutPositions& positions) {
  Json doc;
  doc["nodes"] = Json::array();
  doc["edges"] = Json::array();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    Json node;
    node["id"] = graph.nodes()[i];
    node["frequency"] = graph.frequency()[i];
    node["community"] = partition[i];
    node["x"] = positions[i].x;
    node["y"] = positions[i].y;
    doc["nodes"].push_back(std::move(node));
  }
  for (const auto& e : graph.edges()) {
    Json edge;
    edge["source"] = graph.nodes()[e.source];
    edge["target"] = graph.nodes()[e.target];
    edge["weight"] = e.weight;
    doc["edges"].push_back(std::move(edge));
  }
  return doc;
}

namespace {

Json entries_json(const std::vector<WordCloudEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) {
    out.push_back(Json{{"term", e.term}, {"frequency", e.frequency}, {"size", e.relative_size}});
  }
  return out;
}

}  // namespace

Json themes_json(const ThemeModel& model, std::size_t top_n) {
  Json doc;
  doc["k"] = model.k;
  doc["seed"] = model.seed;
  doc["documents"] = model.document_count();
  doc["themes"] = Json::array();
  for (std::size_t t = 0; t < model.themes.size(); ++t) {
    const auto cloud = word_cloud(model, t, top_n);
    Json theme;
    theme["id"] = t;
    theme["doc_count"] = cloud.doc_count;
    theme["color_rank"] = cloud.color_rank;
    theme["top_terms"] = entries_json(cloud.entries);
    doc["themes"].push_back(std::move(theme));
  }
  return doc;
}

Json word_cloud_json(const WordCloud& cloud) {
  Json doc;
  doc["theme"] = cloud.theme_id;
  doc["doc_count"] = cloud.doc_count;
  doc["color_rank"] = cloud.color_rank;
  doc["entries"] = entries_json(cloud.entries);
  return doc;
}

Json violations_json(const std::vector<Violation>& report) {
  Json out = Json::array();
  for (const auto& v : report) {
    out.push_back(Json{{"id", v.id}, {"rule", v.rule}, {"detail", v.detail}});
  }
  return out;
}

}  // namespace biblionet
