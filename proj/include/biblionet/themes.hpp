#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "biblionet/corpus.hpp"

namespace biblionet {

inline constexpr std::size_t kDefaultThemeCount = 10;
inline constexpr int kMaxThemeIterations = 100;

struct Theme {
  std::vector<std::string> documents;                     // sorted ids
  std::map<std::string, std::uint64_t> term_frequencies;  // raw token counts
  std::vector<std::pair<std::string, double>> centroid;   // unit length, sorted by term
};

/// Documents with text grouped into k themes by spherical k-means.
struct ThemeModel {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<Theme> themes;
  std::map<std::string, std::size_t> assignment;  // document id -> theme
  std::vector<double> objective;                  // sum of cosines, per iteration
  int iterations = 0;

  std::size_t document_count() const { return assignment.size(); }
};

/// Unit TF-IDF embedding, seeded k-means++ start, at most 100 iterations.
/// Throws InvalidArgument when fewer than k documents have text or k < 1.
ThemeModel extract_themes(const Corpus& corpus, std::size_t k, std::uint64_t seed);

struct WordCloudEntry {
  std::string term;
  std::uint64_t frequency = 0;
  double relative_size = 0.0;  // frequency / max frequency
};

struct WordCloud {
  std::size_t theme_id = 0;
  std::size_t color_rank = 0;  // 1 = theme with most documents
  std::size_t doc_count = 0;
  std::vector<WordCloudEntry> entries;
};

/// Rank of every theme by document count, largest first; ties by theme id.
std::vector<std::size_t> color_ranks(const ThemeModel& model);

/// Top `top_n` terms by in-theme frequency (ties by term). Throws
/// InvalidArgument for an unknown theme id.
WordCloud word_cloud(const ThemeModel& model, std::size_t theme_id, std::size_t top_n = 50);

}  // namespace biblionet
