#pragma once

// Brute-force reference implementations used to check the library. They are
// deliberately naive and share no code with the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using PairCounts = std::map<std::pair<std::string, std::string>, std::uint64_t>;

/// Per-document pair enumeration over deduplicated keyword sets.
inline PairCounts cooccurrence(const std::vector<std::vector<std::string>>& docs) {
  PairCounts out;
  for (const auto& doc : docs) {
    const std::set<std::string> unique(doc.begin(), doc.end());
    const std::vector<std::string> kw(unique.begin(), unique.end());
    for (std::size_t i = 0; i < kw.size(); ++i) {
      for (std::size_t j = i + 1; j < kw.size(); ++j) ++out[{kw[i], kw[j]}];
    }
  }
  return out;
}

inline std::map<std::string, std::uint64_t> keyword_frequency(
    const std::vector<std::vector<std::string>>& docs) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& doc : docs) {
    for (const auto& kw : std::set<std::string>(doc.begin(), doc.end())) ++out[kw];
  }
  return out;
}

struct WeightedEdge {
  std::size_t u;
  std::size_t v;
  double w;
};

/// Q = (1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] delta(c_i, c_j), straight
/// from the definition over a dense adjacency matrix.
inline double modularity(std::size_t n, const std::vector<WeightedEdge>& edges,
                         const std::vector<std::size_t>& partition, double gamma = 1.0) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : edges) {
    a[e.u][e.v] += e.w;
    if (e.u != e.v) a[e.v][e.u] += e.w;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += a[i][j];
    two_m += k[i];
  }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (partition[i] == partition[j]) q += a[i][j] - gamma * k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

/// Calls f for every set partition of n elements, encoded as a restricted
/// growth string.
template <class F>
void for_each_partition(std::size_t n, F&& f) {
  if (n == 0) return;
  std::vector<std::size_t> rgs(n, 0), maxima(n, 0);
  while (true) {
    f(static_cast<const std::vector<std::size_t>&>(rgs));
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] == maxima[i - 1] + 1) --i;
    if (i == 0) return;
    ++rgs[i];
    maxima[i] = std::max(maxima[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      maxima[j] = maxima[i];
    }
  }
}

/// Maximum modularity over all partitions (Bell(n) of them).
inline double max_modularity(std::size_t n, const std::vector<WeightedEdge>& edges) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_partition(n, [&](const std::vector<std::size_t>& p) {
    best = std::max(best, modularity(n, edges, p));
  });
  return best;
}

inline double entropy(const std::vector<std::size_t>& labels) {
  std::map<std::size_t, double> counts;
  for (const auto l : labels) counts[l] += 1.0;
  double h = 0.0;
  const double n = static_cast<double>(labels.size());
  for (const auto& [label, c] : counts) h -= c / n * std::log(c / n);
  return h;
}

/// Normalized mutual information with sqrt(H(a) H(b)) normalization. Two
/// single-cluster labelings are identical, so they score 1.
inline double nmi(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> pa, pb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
  }
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    mi += c / n * std::log(c * n / (pa[key.first] * pb[key.second]));
  }
  const double ha = entropy(a), hb = entropy(b);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;
  return mi / std::sqrt(ha * hb);
}

/// Fraction of items whose cluster's majority truth label matches their own.
inline double purity(const std::vector<std::size_t>& clusters, const std::vector<std::size_t>& truth) {
  std::map<std::size_t, std::map<std::size_t, std::size_t>> table;
  for (std::size_t i = 0; i < clusters.size(); ++i) ++table[clusters[i]][truth[i]];
  std::size_t agree = 0;
  for (const auto& [cluster, row] : table) {
    std::size_t best = 0;
    for (const auto& [label, c] : row) best = std::max(best, c);
    agree += best;
  }
  return clusters.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(clusters.size());
}

/// True when every pair co-clustered in `fine` is co-clustered in `coarse`.
inline bool is_refinement(const std::vector<std::size_t>& fine, const std::vector<std::size_t>& coarse) {
  for (std::size_t i = 0; i < fine.size(); ++i) {
    for (std::size_t j = i + 1; j < fine.size(); ++j) {
      if (fine[i] == fine[j] && coarse[i] != coarse[j]) return false;
    }
  }
  return true;
}

inline std::size_t cluster_count(const std::vector<std::size_t>& labels) {
  return std::set<std::size_t>(labels.begin(), labels.end()).size();
}

/// Every alias occurrence at every token window, as a set of codes.
inline std::set<std::string> all_window_aliases(
    const std::vector<std::string>& tokens,
    const std::map<std::vector<std::string>, std::string>& aliases) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t len = 1; i + len <= tokens.size(); ++len) {
      const std::vector<std::string> window(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                            tokens.begin() + static_cast<std::ptrdiff_t>(i + len));
      if (const auto it = aliases.find(window); it != aliases.end()) out.insert(it->second);
    }
  }
  return out;
}

/// Within-class sum of squared distances to class means.
inline double within_sse(const std::vector<std::vector<double>>& points,
                         const std::vector<std::size_t>& labels) {
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  double sse = 0.0;
  for (const auto& [label, idx] : members) {
    std::vector<double> mean(points[0].size(), 0.0);
    for (const auto i : idx) {
      for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += points[i][d];
    }
    for (auto& m : mean) m /= static_cast<double>(idx.size());
    for (const auto i : idx) {
      for (std::size_t d = 0; d < mean.size(); ++d) sse += (points[i][d] - mean[d]) * (points[i][d] - mean[d]);
    }
  }
  return sse;
}

/// Minimum within-class variance over all 2-partitions with both sides
/// non-empty. Returns the labels (0/1, first point in class 0).
inline std::vector<std::size_t> min_variance_2partition(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  std::vector<std::size_t> best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    std::vector<std::size_t> labels(n, 0);
    for (std::size_t i = 1; i < n; ++i) labels[i] = (mask >> (i - 1)) & 1U;
    if (cluster_count(labels) != 2) continue;
    const double sse = within_sse(points, labels);
    if (sse < best_sse - 1e-12) {
      best_sse = sse;
      best = labels;
    }
  }
  return best;
}

/// Standardized residuals straight from the formula.
inline std::vector<std::vector<double>> residuals(const std::vector<std::vector<std::uint64_t>>& n) {
  double total = 0.0;
  std::vector<double> rows(n.size(), 0.0), cols(n[0].size(), 0.0);
  for (std::size_t r = 0; r < n.size(); ++r) {
    for (std::size_t c = 0; c < n[r].size(); ++c) {
      rows[r] += static_cast<double>(n[r][c]);
      cols[c] += static_cast<double>(n[r][c]);
      total += static_cast<double>(n[r][c]);
    }
  }
  std::vector<std::vector<double>> out(n.size(), std::vector<double>(cols.size()));
  for (std::size_t r = 0; r < n.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double e = rows[r] * cols[c] / total;
      out[r][c] = (static_cast<double>(n[r][c]) - e) / std::sqrt(e);
    }
  }
  return out;
}

}  // namespace oracle
