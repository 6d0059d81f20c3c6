#include "biblionet/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "json.hpp"

#include "biblionet/error.hpp"
#include "biblionet/exports.hpp"
#include "random.hpp"

namespace biblionet {

// ---------------------------------------------------------------------------
// Graph

KeywordGraph::KeywordGraph(std::vector<std::string> nodes, std::vector<std::uint64_t> frequency,
                           std::vector<Edge> edges)
    : nodes_(std::move(nodes)), frequency_(std::move(frequency)), edges_(std::move(edges)) {
  if (frequency_.size() != nodes_.size()) {
    throw InvalidArgument("frequency", "one frequency per node required");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i - 1] < nodes_[i])) {
      throw InvalidArgument("nodes", "nodes must be unique and sorted");
    }
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.source >= e.target || e.target >= nodes_.size()) {
      throw InvalidArgument("edges", "edge endpoints must satisfy source < target < node count");
    }
    if (e.weight == 0) throw InvalidArgument("edges", "edge weight must be positive");
    if (i > 0) {
      const auto& p = edges_[i - 1];
      if (std::tie(p.source, p.target) >= std::tie(e.source, e.target)) {
        throw InvalidArgument("edges", "edges must be unique and sorted");
      }
    }
  }
}

double KeywordGraph::total_weight() const {
  double m = 0.0;
  for (const auto& e : edges_) m += static_cast<double>(e.weight);
  return m;
}

std::optional<std::uint32_t> KeywordGraph::index_of(std::string_view keyword) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), keyword);
  if (it == nodes_.end() || *it != keyword) return std::nullopt;
  return static_cast<std::uint32_t>(it - nodes_.begin());
}

bool in_scope(const PaperRecord& paper, Scope scope) {
  if (scope == Scope::seed) return paper.origin == Origin::seed;
  return paper.origin != Origin::external;
}

KeywordGraph build_cooccurrence(const Corpus& corpus, Scope scope, std::uint64_t min_weight,
                                bool keep_isolated) {
  if (min_weight < 1) throw InvalidArgument("min_weight", "must be at least 1");

  // Keyword ids follow sorted keyword order, so pair codes sort like edges.
  std::map<std::string, std::uint64_t> frequency;
  for (const auto& [id, paper] : corpus.papers()) {
    if (!in_scope(paper, scope)) continue;
    std::vector<std::string_view> unique(paper.keywords.begin(), paper.keywords.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const auto kw : unique) ++frequency[std::string(kw)];
  }
  std::unordered_map<std::string_view, std::uint32_t> ids;
  ids.reserve(frequency.size());
  for (const auto& [kw, count] : frequency) {
    ids.emplace(kw, static_cast<std::uint32_t>(ids.size()));
  }

  std::vector<std::uint64_t> pairs;
  std::vector<std::uint32_t> doc;
  for (const auto& [id, paper] : corpus.papers()) {
    if (!in_scope(paper, scope)) continue;
    doc.clear();
    for (const auto& kw : paper.keywords) doc.push_back(ids.at(kw));
    std::sort(doc.begin(), doc.end());
    doc.erase(std::unique(doc.begin(), doc.end()), doc.end());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      for (std::size_t j = i + 1; j < doc.size(); ++j) {
        pairs.push_back((std::uint64_t{doc[i]} << 32) | doc[j]);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<std::pair<std::uint64_t, std::uint64_t>> weighted;  // (pair code, weight)
  std::vector<bool> used(frequency.size(), keep_isolated);
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    if (j - i >= min_weight) {
      weighted.emplace_back(pairs[i], j - i);
      used[pairs[i] >> 32] = true;
      used[pairs[i] & 0xFFFFFFFFu] = true;
    }
    i = j;
  }

  std::vector<std::uint32_t> remap(frequency.size(), 0);
  std::vector<std::string> nodes;
  std::vector<std::uint64_t> node_frequency;
  std::uint32_t old_id = 0;
  for (const auto& [kw, count] : frequency) {
    if (used[old_id]) {
      remap[old_id] = static_cast<std::uint32_t>(nodes.size());
      nodes.push_back(kw);
      node_frequency.push_back(count);
    }
    ++old_id;
  }
  std::vector<KeywordGraph::Edge> edges;
  edges.reserve(weighted.size());
  for (const auto& [code, weight] : weighted) {
    edges.push_back({remap[code >> 32], remap[code & 0xFFFFFFFFu], weight});
  }
  return KeywordGraph(std::move(nodes), std::move(node_frequency), std::move(edges));
}

// ---------------------------------------------------------------------------
// Modularity

double modularity(const KeywordGraph& graph, const Partition& partition, double resolution) {
  if (partition.size() != graph.node_count()) {
    throw InvalidArgument("partition", "must label every node");
  }
  const double m = graph.total_weight();
  if (graph.edge_count() == 0 || m <= 0.0) {
    throw InvalidArgument("graph", "modularity is undefined on an edgeless graph");
  }
  std::unordered_map<std::size_t, double> internal, degree;
  for (const auto& e : graph.edges()) {
    const double w = static_cast<double>(e.weight);
    const auto cs = partition[e.source], ct = partition[e.target];
    degree[cs] += w;
    degree[ct] += w;
    if (cs == ct) internal[cs] += w;
  }
  // Sum in community order for reproducible rounding.
  std::map<std::size_t, std::pair<double, double>> per_community;
  for (const auto& [c, d] : degree) per_community[c] = {internal[c], d};
  double q = 0.0;
  for (const auto& [c, v] : per_community) {
    const double share = v.second / (2.0 * m);
    q += v.first / m - resolution * share * share;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Louvain

namespace {

struct LevelGraph {
  struct Link {
    std::uint32_t a, b;
    double w;
  };
  std::size_t n = 0;
  std::vector<Link> links;  // a < b, unique
  std::vector<double> self_loop;
  // CSR adjacency derived from links.
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;
  std::vector<double> weights;
  std::vector<double> degree;
  double total = 0.0;  // m

  void finalize() {
    offsets.assign(n + 1, 0);
    degree.assign(n, 0.0);
    for (const auto& l : links) {
      ++offsets[l.a + 1];
      ++offsets[l.b + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    targets.resize(offsets[n]);
    weights.resize(offsets[n]);
    auto cursor = offsets;
    total = 0.0;
    for (const auto& l : links) {
      targets[cursor[l.a]] = l.b;
      weights[cursor[l.a]++] = l.w;
      targets[cursor[l.b]] = l.a;
      weights[cursor[l.b]++] = l.w;
      degree[l.a] += l.w;
      degree[l.b] += l.w;
      total += l.w;
    }
    for (std::size_t i = 0; i < n; ++i) {
      degree[i] += 2.0 * self_loop[i];
      total += self_loop[i];
    }
  }
};

LevelGraph from_keyword_graph(const KeywordGraph& graph) {
  LevelGraph g;
  g.n = graph.node_count();
  g.self_loop.assign(g.n, 0.0);
  for (const auto& e : graph.edges()) {
    g.links.push_back({e.source, e.target, static_cast<double>(e.weight)});
  }
  g.finalize();
  return g;
}

// Moves nodes between communities until no move gains more than the
// threshold. Returns whether any node moved.
bool local_moves(const LevelGraph& g, std::vector<std::size_t>& community, Rng& rng,
                 double resolution) {
  const std::size_t n = g.n;
  if (g.total <= 0.0) return false;
  const double m = g.total;
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[community[i]] += g.degree[i];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<double> link_weight(n, 0.0);
  std::vector<bool> touched(n, false);
  std::vector<std::size_t> candidates;
  bool any_move = false;
  bool improved = true;
  while (improved) {
    improved = false;
    for (const auto i : order) {
      const std::size_t old_c = community[i];
      const double k_i = g.degree[i];
      tot[old_c] -= k_i;

      candidates.clear();
      candidates.push_back(old_c);
      touched[old_c] = true;
      for (std::size_t p = g.offsets[i]; p < g.offsets[i + 1]; ++p) {
        const auto c = community[g.targets[p]];
        if (!touched[c]) {
          touched[c] = true;
          candidates.push_back(c);
        }
        link_weight[c] += g.weights[p];
      }

      const auto gain = [&](std::size_t c) {
        return link_weight[c] / m - resolution * tot[c] * k_i / (2.0 * m * m);
      };
      std::size_t best_c = old_c;
      double best_gain = gain(old_c);
      for (const auto c : candidates) {
        const double gc = gain(c);
        if (gc > best_gain || (gc == best_gain && c < best_c)) {
          best_gain = gc;
          best_c = c;
        }
      }
      if (best_c != old_c && best_gain - gain(old_c) > kMinModularityGain) {
        community[i] = best_c;
        improved = true;
        any_move = true;
      } else {
        best_c = old_c;
      }
      tot[best_c] += k_i;

      for (const auto c : candidates) {
        link_weight[c] = 0.0;
        touched[c] = false;
      }
    }
  }
  return any_move;
}

// Relabels communities 0..count-1 by first occurrence; returns the count.
std::size_t renumber(std::vector<std::size_t>& community) {
  std::unordered_map<std::size_t, std::size_t> ids;
  for (auto& c : community) c = ids.emplace(c, ids.size()).first->second;
  return ids.size();
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& community,
                     std::size_t count) {
  LevelGraph out;
  out.n = count;
  out.self_loop.assign(count, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) out.self_loop[community[i]] += g.self_loop[i];
  std::vector<LevelGraph::Link> merged;
  merged.reserve(g.links.size());
  for (const auto& l : g.links) {
    const auto ca = community[l.a], cb = community[l.b];
    if (ca == cb) {
      out.self_loop[ca] += l.w;
    } else {
      merged.push_back({static_cast<std::uint32_t>(std::min(ca, cb)),
                        static_cast<std::uint32_t>(std::max(ca, cb)), l.w});
    }
  }
  std::sort(merged.begin(), merged.end(), [](const auto& x, const auto& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (const auto& l : merged) {
    if (!out.links.empty() && out.links.back().a == l.a && out.links.back().b == l.b) {
      out.links.back().w += l.w;
    } else {
      out.links.push_back(l);
    }
  }
  out.finalize();
  return out;
}

}  // namespace

CommunityHierarchy detect_communities(const KeywordGraph& graph, std::uint64_t seed,
                                      double resolution) {
  if (graph.node_count() == 0) throw InvalidArgument("graph", "graph has no nodes");
  if (!(resolution > 0.0)) throw InvalidArgument("resolution", "must be positive");

  Rng rng(seed);
  const bool has_edges = graph.edge_count() > 0;
  const auto quality = [&](const Partition& p) {
    return has_edges ? modularity(graph, p, resolution) : 0.0;
  };

  CommunityHierarchy hierarchy;
  LevelGraph current = from_keyword_graph(graph);
  Partition projected(graph.node_count());
  std::iota(projected.begin(), projected.end(), 0);

  while (true) {
    std::vector<std::size_t> community(current.n);
    std::iota(community.begin(), community.end(), 0);
    if (!local_moves(current, community, rng, resolution)) break;
    const std::size_t count = renumber(community);
    for (auto& c : projected) c = community[c];
    hierarchy.levels.push_back(projected);
    hierarchy.modularity.push_back(quality(projected));
    hierarchy.community_count.push_back(count);
    current = aggregate(current, community, count);
  }
  if (hierarchy.levels.empty()) {
    hierarchy.levels.push_back(projected);
    hierarchy.modularity.push_back(quality(projected));
    hierarchy.community_count.push_back(graph.node_count());
  }
  return hierarchy;
}

Partition cut_level(const CommunityHierarchy& hierarchy, std::size_t level) {
  if (hierarchy.levels.empty()) return {};
  return hierarchy.levels[std::min(level, hierarchy.coarsest())];
}

// ---------------------------------------------------------------------------
// Layout

LayoutPositions layout(const KeywordGraph& graph, std::uint64_t seed, int iterations) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw InvalidArgument("graph", "graph has no nodes");
  if (iterations < 0) throw InvalidArgument("iterations", "must be non-negative");
  if (n == 1) return {Point{}};

  Rng rng(seed);
  LayoutPositions pos(n);
  for (auto& p : pos) {
    p.x = rng.uniform();
    p.y = rng.uniform();
  }

  const double k = std::sqrt(1.0 / static_cast<double>(n));
  const double k2 = k * k;
  const double initial_temperature = 0.1;
  std::vector<Point> disp(n);
  for (int it = 0; it < iterations; ++it) {
    const double temperature =
        initial_temperature * (1.0 - static_cast<double>(it) / static_cast<double>(iterations));
    std::fill(disp.begin(), disp.end(), Point{0.0, 0.0});

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
        double d = std::hypot(dx, dy);
        if (d < 1e-9) {
          dx = 1e-9;
          dy = 0.0;
          d = 1e-9;
        }
        const double f = k2 / d / d;
        disp[i].x += dx * f;
        disp[i].y += dy * f;
        disp[j].x -= dx * f;
        disp[j].y -= dy * f;
      }
    }
    for (const auto& e : graph.edges()) {
      const double dx = pos[e.source].x - pos[e.target].x;
      const double dy = pos[e.source].y - pos[e.target].y;
      const double d = std::hypot(dx, dy);
      const double f = static_cast<double>(e.weight) * d / k;  // (w d^2 / k) / d
      disp[e.source].x -= dx * f;
      disp[e.source].y -= dy * f;
      disp[e.target].x += dx * f;
      disp[e.target].y += dy * f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double len = std::hypot(disp[i].x, disp[i].y);
      if (len <= 0.0) continue;
      const double step = std::min(len, temperature) / len;
      pos[i].x = std::clamp(pos[i].x + disp[i].x * step, 0.0, 1.0);
      pos[i].y = std::clamp(pos[i].y + disp[i].y * step, 0.0, 1.0);
    }
  }

  // Center the bounding box and scale its longer side to 1.
  double min_x = pos[0].x, max_x = pos[0].x, min_y = pos[0].y, max_y = pos[0].y;
  for (const auto& p : pos) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double range = std::max(max_x - min_x, max_y - min_y);
  const double cx = 0.5 * (min_x + max_x), cy = 0.5 * (min_y + max_y);
  for (auto& p : pos) {
    if (range < 1e-12) {
      p = Point{};
      continue;
    }
    p.x = std::clamp(0.5 + (p.x - cx) / range, 0.0, 1.0);
    p.y = std::clamp(0.5 + (p.y - cy) / range, 0.0, 1.0);
  }
  return pos;
}

// ---------------------------------------------------------------------------
// Export

std::optional<GraphFormat> parse_graph_format(std::string_view name) {
  if (name == "graphml") return GraphFormat::graphml;
  if (name == "json") return GraphFormat::json;
  return std::nullopt;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string export_graphml(const KeywordGraph& graph, const Partition& partition,
                           const LayoutPositions& positions) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"frequency\" for=\"node\" attr.name=\"frequency\" attr.type=\"int\"/>\n"
      "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n"
      "  <key id=\"x\" for=\"node\" attr.name=\"x\" attr.type=\"double\"/>\n"
      "  <key id=\"y\" for=\"node\" attr.name=\"y\" attr.type=\"double\"/>\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n"
      "  <graph id=\"keywords\" edgedefault=\"undirected\">\n";
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    out += "    <node id=\"" + xml_escape(graph.nodes()[i]) + "\">";
    out += "<data key=\"frequency\">" + std::to_string(graph.frequency()[i]) + "</data>";
    out += "<data key=\"community\">" + std::to_string(partition[i]) + "</data>";
    out += "<data key=\"x\">" + format_double(positions[i].x) + "</data>";
    out += "<data key=\"y\">" + format_double(positions[i].y) + "</data>";
    out += "</node>\n";
  }
  for (const auto& e : graph.edges()) {
    out += "    <edge source=\"" + xml_escape(graph.nodes()[e.source]) + "\" target=\"" +
           xml_escape(graph.nodes()[e.target]) + "\"><data key=\"weight\">" +
           std::to_string(e.weight) + "</data></edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

}  // namespace

std::string export_graph(const KeywordGraph& graph, const Partition& partition,
                         const LayoutPositions& positions, GraphFormat format) {
  if (partition.size() != graph.node_count()) {
    throw InvalidArgument("partition", "must label every node");
  }
  if (positions.size() != graph.node_count()) {
    throw InvalidArgument("positions", "must place every node");
  }
  return format == GraphFormat::graphml ? export_graphml(graph, partition, positions)
                                        : graph_json(graph, partition, positions).dump(2) + "\n";
}

ExportedGraph parse_graph_json(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("document", std::string("invalid JSON: ") + e.what());
  }
  try {
    std::vector<std::string> nodes;
    std::vector<std::uint64_t> frequency;
    ExportedGraph out;
    for (const auto& node : doc.at("nodes")) {
      nodes.push_back(node.at("id").get<std::string>());
      frequency.push_back(node.at("frequency").get<std::uint64_t>());
      out.partition.push_back(node.at("community").get<std::size_t>());
      out.positions.push_back({node.at("x").get<double>(), node.at("y").get<double>()});
    }
    std::unordered_map<std::string, std::uint32_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      index.emplace(nodes[i], static_cast<std::uint32_t>(i));
    }
    std::vector<KeywordGraph::Edge> edges;
    for (const auto& edge : doc.at("edges")) {
      edges.push_back({index.at(edge.at("source").get<std::string>()),
                       index.at(edge.at("target").get<std::string>()),
                       edge.at("weight").get<std::uint64_t>()});
    }
    out.graph = KeywordGraph(std::move(nodes), std::move(frequency), std::move(edges));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("document", std::string("malformed graph document: ") + e.what());
  } catch (const std::out_of_range&) {
    throw InvalidArgument("document", "edge references an unknown node");
  }
}

}  // namespace biblionet
