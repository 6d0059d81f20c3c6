#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "biblionet/corpus.hpp"
#include "biblionet/network.hpp"
#include "oracles.hpp"

namespace testing {

/// Node names "n00", "n01", ... so node index order equals sorted order.
inline std::string node_name(std::size_t i) {
  std::string digits = std::to_string(i);
  while (digits.size() < 3) digits.insert(digits.begin(), '0');
  return "n" + digits;
}

inline biblionet::KeywordGraph make_graph(std::size_t n, std::vector<oracle::WeightedEdge> edges) {
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(node_name(i));
  std::vector<biblionet::KeywordGraph::Edge> out;
  for (auto e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
    out.push_back({static_cast<std::uint32_t>(e.u), static_cast<std::uint32_t>(e.v),
                   static_cast<std::uint64_t>(e.w)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  });
  return biblionet::KeywordGraph(std::move(nodes), std::vector<std::uint64_t>(n, 1), std::move(out));
}

inline std::vector<oracle::WeightedEdge> edges_of(const biblionet::KeywordGraph& g) {
  std::vector<oracle::WeightedEdge> out;
  for (const auto& e : g.edges()) out.push_back({e.source, e.target, static_cast<double>(e.weight)});
  return out;
}

/// Two k-cliques on nodes [0,k) and [k,2k) joined by the edge (k-1, k).
inline std::vector<oracle::WeightedEdge> two_cliques(std::size_t k, bool bridge = true) {
  std::vector<oracle::WeightedEdge> edges;
  for (std::size_t base : {std::size_t{0}, k}) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) edges.push_back({base + i, base + j, 1.0});
    }
  }
  if (bridge) edges.push_back({k - 1, k, 1.0});
  return edges;
}

inline biblionet::PaperRecord paper(std::string id, int year, std::vector<std::string> keywords = {}) {
  biblionet::PaperRecord p;
  p.id = std::move(id);
  p.title = "Title of " + p.id;
  p.year = year;
  p.keywords = std::move(keywords);
  return p;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("biblionet-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
