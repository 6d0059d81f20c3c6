#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biblionet/corpus.hpp"

namespace biblionet {

/// Undirected weighted simple graph of keywords. Nodes are sorted by keyword;
/// edges are sorted by (source, target) with source < target.
class KeywordGraph {
 public:
  struct Edge {
    std::uint32_t source;
    std::uint32_t target;
    std::uint64_t weight;

    friend bool operator==(const Edge&, const Edge&) = default;
  };

  KeywordGraph() = default;
  /// Throws InvalidArgument unless the node and edge invariants hold.
  KeywordGraph(std::vector<std::string> nodes, std::vector<std::uint64_t> frequency,
               std::vector<Edge> edges);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<std::uint64_t>& frequency() const { return frequency_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  double total_weight() const;
  std::optional<std::uint32_t> index_of(std::string_view keyword) const;

  friend bool operator==(const KeywordGraph&, const KeywordGraph&) = default;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::uint64_t> frequency_;
  std::vector<Edge> edges_;
};

enum class Scope { seed, neighborhood };

bool in_scope(const PaperRecord& paper, Scope scope);

/// Edge weight = number of in-scope documents carrying both keywords. Edges
/// lighter than `min_weight` are dropped; isolated keywords are kept only
/// when `keep_isolated` is set. Node frequency = in-scope documents carrying
/// the keyword.
KeywordGraph build_cooccurrence(const Corpus& corpus, Scope scope, std::uint64_t min_weight = 1,
                                bool keep_isolated = false);

/// Community label per node index.
using Partition = std::vector<std::size_t>;

/// Newman modularity with weighted degrees; `resolution` scales the null
/// model term. Throws InvalidArgument for an edgeless graph or a partition of
/// the wrong size.
double modularity(const KeywordGraph& graph, const Partition& partition, double resolution = 1.0);

/// Nested partitions from fine (level 0) to coarse. Community ids at every
/// level are 0..count-1, numbered by first node.
struct CommunityHierarchy {
  std::vector<Partition> levels;
  std::vector<double> modularity;
  std::vector<std::size_t> community_count;

  std::size_t level_count() const { return levels.size(); }
  std::size_t coarsest() const { return levels.empty() ? 0 : levels.size() - 1; }
};

inline constexpr double kMinModularityGain = 1e-9;

/// Louvain: seeded local moving then aggregation, one level per round.
/// Throws InvalidArgument for a graph with no nodes.
CommunityHierarchy detect_communities(const KeywordGraph& graph, std::uint64_t seed,
                                      double resolution = 1.0);

/// Level `min(level, coarsest)`.
Partition cut_level(const CommunityHierarchy& hierarchy, std::size_t level);

struct Point {
  double x = 0.5;
  double y = 0.5;

  friend bool operator==(const Point&, const Point&) = default;
};

using LayoutPositions = std::vector<Point>;

/// Seeded Fruchterman-Reingold layout rescaled into the unit square.
LayoutPositions layout(const KeywordGraph& graph, std::uint64_t seed, int iterations = 300);

enum class GraphFormat { graphml, json };

std::optional<GraphFormat> parse_graph_format(std::string_view name);

/// Nodes carry frequency, community, x and y; edges carry weight. Throws
/// InvalidArgument when partition or positions do not cover every node.
std::string export_graph(const KeywordGraph& graph, const Partition& partition,
                         const LayoutPositions& positions, GraphFormat format);

struct ExportedGraph {
  KeywordGraph graph;
  Partition partition;
  LayoutPositions positions;
};

/// Inverse of the JSON export.
ExportedGraph parse_graph_json(std::string_view document);

}  // namespace biblionet
