#include "biblionet/themes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biblionet/error.hpp"
#include "biblionet/text.hpp"
#include "random.hpp"

namespace biblionet {

namespace {

using SparseVector = std::vector<std::pair<std::uint32_t, double>>;  // sorted by term id

struct Document {
  const std::string* id;
  std::map<std::uint32_t, std::uint64_t> counts;
  SparseVector vector;
};

double dot(const SparseVector& doc, const std::vector<double>& center) {
  double s = 0.0;
  for (const auto& [term, w] : doc) s += w * center[term];
  return s;
}

std::vector<double> centroid_of(const std::vector<Document>& docs,
                                const std::vector<std::size_t>& assignment, std::size_t theme,
                                std::size_t vocab) {
  std::vector<double> center(vocab, 0.0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (assignment[d] != theme) continue;
    for (const auto& [term, w] : docs[d].vector) center[term] += w;
  }
  double norm = 0.0;
  for (const double v : center) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& v : center) v /= norm;
  }
  return center;
}

std::vector<double> densify(const SparseVector& v, std::size_t vocab) {
  std::vector<double> out(vocab, 0.0);
  for (const auto& [term, w] : v) out[term] = w;
  return out;
}

std::vector<std::vector<double>> seed_centers(const std::vector<Document>& docs, std::size_t k,
                                              std::size_t vocab, Rng& rng) {
  const std::size_t n = docs.size();
  std::vector<bool> chosen(n, false);
  std::vector<double> best_sim(n, -1.0);
  std::vector<std::vector<double>> centers;

  const auto add_center = [&](std::size_t d) {
    chosen[d] = true;
    centers.push_back(densify(docs[d].vector, vocab));
    for (std::size_t i = 0; i < n; ++i) {
      best_sim[i] = std::max(best_sim[i], dot(docs[i].vector, centers.back()));
    }
  };

  add_center(rng.below(n));
  while (centers.size() < k) {
    std::vector<double> weight(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      const double dist = std::max(0.0, 1.0 - best_sim[i]);
      weight[i] = dist * dist;
      total += weight[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (weight[i] <= 0.0) continue;
        acc += weight[i];
        pick = i;
        if (r < acc) break;
      }
    } else {
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (!chosen[i]) pick = i;
      }
    }
    add_center(pick);
  }
  return centers;
}

std::vector<std::size_t> assign(const std::vector<Document>& docs,
                                const std::vector<std::vector<double>>& centers,
                                std::vector<double>& similarity) {
  std::vector<std::size_t> out(docs.size(), 0);
  similarity.assign(docs.size(), 0.0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    double best = dot(docs[d].vector, centers[0]);
    std::size_t best_c = 0;
    for (std::size_t c = 1; c < centers.size(); ++c) {
      const double s = dot(docs[d].vector, centers[c]);
      if (s > best) {
        best = s;
        best_c = c;
      }
    }
    out[d] = best_c;
    similarity[d] = best;
  }
  return out;
}

// Gives each empty theme the document least similar to its own centroid,
// taken from a theme that keeps at least one member.
void repair_empty(std::vector<std::size_t>& assignment, const std::vector<double>& similarity,
                  std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (const auto c : assignment) ++sizes[c];
  std::vector<bool> reseeded(assignment.size(), false);
  for (std::size_t empty = 0; empty < k; ++empty) {
    if (sizes[empty] != 0) continue;
    std::size_t farthest = assignment.size();
    for (std::size_t d = 0; d < assignment.size(); ++d) {
      if (reseeded[d] || sizes[assignment[d]] < 2) continue;
      if (farthest == assignment.size() || similarity[d] < similarity[farthest]) farthest = d;
    }
    --sizes[assignment[farthest]];
    assignment[farthest] = empty;
    sizes[empty] = 1;
    reseeded[farthest] = true;
  }
}

}  // namespace

ThemeModel extract_themes(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw InvalidArgument("k", "must be at least 1");

  std::vector<std::vector<std::string>> tokens;
  std::vector<const std::string*> ids;
  std::map<std::string, std::uint64_t> df;
  for (const auto& [id, paper] : corpus.papers()) {
    if (!paper.has_text()) continue;
    ids.push_back(&id);
    tokens.push_back(tokenize(*paper.text, paper.lang));
    std::vector<std::string> unique = tokens.back();
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const auto& t : unique) ++df[t];
  }
  const std::size_t n = ids.size();
  if (n < k) {
    throw InvalidArgument("k", "needs at least " + std::to_string(k) +
                                   " documents with text, corpus has " + std::to_string(n));
  }

  std::vector<std::string> vocab;
  std::map<std::string, std::uint32_t> term_id;
  for (const auto& [term, count] : df) {
    term_id.emplace(term, static_cast<std::uint32_t>(vocab.size()));
    vocab.push_back(term);
  }

  std::vector<Document> docs(n);
  for (std::size_t d = 0; d < n; ++d) {
    docs[d].id = ids[d];
    for (const auto& t : tokens[d]) ++docs[d].counts[term_id.at(t)];
    const auto weights = vectorize_tfidf(tokens[d], df, n);
    double norm = 0.0;
    for (const auto& [term, w] : weights.entries()) norm += w * w;
    norm = std::sqrt(norm);
    for (const auto& [term, w] : weights.entries()) {
      docs[d].vector.emplace_back(term_id.at(term), w / norm);
    }
  }

  Rng rng(seed);
  auto centers = seed_centers(docs, k, vocab.size(), rng);

  ThemeModel model;
  model.k = k;
  model.seed = seed;
  std::vector<std::size_t> assignment;
  std::vector<double> similarity;
  for (int it = 1; it <= kMaxThemeIterations; ++it) {
    auto next = assign(docs, centers, similarity);
    repair_empty(next, similarity, k);
    const bool changed = next != assignment;
    assignment = std::move(next);
    for (std::size_t c = 0; c < k; ++c) centers[c] = centroid_of(docs, assignment, c, vocab.size());
    double objective = 0.0;
    for (std::size_t d = 0; d < n; ++d) objective += dot(docs[d].vector, centers[assignment[d]]);
    model.objective.push_back(objective);
    model.iterations = it;
    if (!changed) break;
  }

  model.themes.resize(k);
  for (std::size_t d = 0; d < n; ++d) {
    auto& theme = model.themes[assignment[d]];
    theme.documents.push_back(*docs[d].id);
    for (const auto& [term, count] : docs[d].counts) theme.term_frequencies[vocab[term]] += count;
    model.assignment.emplace(*docs[d].id, assignment[d]);
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t t = 0; t < vocab.size(); ++t) {
      if (centers[c][t] != 0.0) model.themes[c].centroid.emplace_back(vocab[t], centers[c][t]);
    }
  }
  return model;
}

std::vector<std::size_t> color_ranks(const ThemeModel& model) {
  std::vector<std::size_t> order(model.themes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return model.themes[a].documents.size() > model.themes[b].documents.size();
  });
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  return rank;
}

WordCloud word_cloud(const ThemeModel& model, std::size_t theme_id, std::size_t top_n) {
  if (theme_id >= model.themes.size()) {
    throw InvalidArgument("theme_id", "unknown theme id " + std::to_string(theme_id));
  }
  const auto& theme = model.themes[theme_id];
  WordCloud cloud;
  cloud.theme_id = theme_id;
  cloud.color_rank = color_ranks(model)[theme_id];
  cloud.doc_count = theme.documents.size();
  for (const auto& [term, freq] : theme.term_frequencies) {
    cloud.entries.push_back({term, freq, 0.0});
  }
  std::stable_sort(cloud.entries.begin(), cloud.entries.end(),
                   [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  if (cloud.entries.size() > top_n) cloud.entries.resize(top_n);
  if (!cloud.entries.empty()) {
    const double max_freq = static_cast<double>(cloud.entries.front().frequency);
    for (auto& e : cloud.entries) e.relative_size = static_cast<double>(e.frequency) / max_freq;
  }
  return cloud;
}

}  // namespace biblionet
