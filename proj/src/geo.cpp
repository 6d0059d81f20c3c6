#include "biblionet/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

#include "biblionet/error.hpp"
#include "biblionet/themes.hpp"

namespace biblionet {

namespace {

std::set<std::string> countries_for(const PaperRecord& paper, CountryRole role) {
  const auto& list = role == CountryRole::studied ? paper.studied : paper.affiliations;
  return {list.begin(), list.end()};
}

}  // namespace

CountryActivity country_activity(const Corpus& corpus, const PeriodFilter& period) {
  const Corpus view = filter_period(corpus, period);
  CountryActivity activity{period, {}};
  for (const auto& [id, paper] : view.papers()) {
    for (const auto& code : countries_for(paper, CountryRole::affiliation)) {
      ++activity.countries[code].n_authored;
    }
    for (const auto& code : countries_for(paper, CountryRole::studied)) {
      ++activity.countries[code].n_studied;
    }
  }
  return activity;
}

Corpus with_detected_studied(const Corpus& corpus, const Gazetteer& gazetteer) {
  std::vector<PaperRecord> records;
  records.reserve(corpus.size());
  for (const auto& [id, paper] : corpus.papers()) {
    records.push_back(paper);
    auto& rec = records.back();
    if (rec.studied.empty() && rec.has_text()) {
      const auto detected = detect_studied_countries(*rec.text, gazetteer);
      rec.studied.assign(detected.begin(), detected.end());
    }
  }
  return Corpus(std::move(records));
}

// ---------------------------------------------------------------------------
// Contingency tables

ContingencyTable::ContingencyTable(std::vector<std::string> rows, std::vector<std::string> cols,
                                   std::vector<std::vector<std::uint64_t>> counts)
    : rows_(std::move(rows)), cols_(std::move(cols)), counts_(std::move(counts)) {
  if (counts_.size() != rows_.size()) {
    throw InvalidArgument("counts", "row count does not match row labels");
  }
  for (const auto& row : counts_) {
    if (row.size() != cols_.size()) {
      throw InvalidArgument("counts", "column count does not match column labels");
    }
  }
  if (std::set<std::string>(rows_.begin(), rows_.end()).size() != rows_.size()) {
    throw InvalidArgument("rows", "duplicate row label");
  }
  if (std::set<std::string>(cols_.begin(), cols_.end()).size() != cols_.size()) {
    throw InvalidArgument("cols", "duplicate column label");
  }
  row_totals_.assign(rows_.size(), 0);
  col_totals_.assign(cols_.size(), 0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      row_totals_[r] += counts_[r][c];
      col_totals_[c] += counts_[r][c];
      grand_total_ += counts_[r][c];
    }
  }
}

ContingencyTable ContingencyTable::without_empty() const {
  std::vector<std::size_t> keep_rows, keep_cols;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (row_totals_[r] > 0) keep_rows.push_back(r);
  }
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    if (col_totals_[c] > 0) keep_cols.push_back(c);
  }
  std::vector<std::string> rows, cols;
  std::vector<std::vector<std::uint64_t>> counts;
  for (const auto c : keep_cols) cols.push_back(cols_[c]);
  for (const auto r : keep_rows) {
    rows.push_back(rows_[r]);
    auto& row = counts.emplace_back();
    for (const auto c : keep_cols) row.push_back(counts_[r][c]);
  }
  return ContingencyTable(std::move(rows), std::move(cols), std::move(counts));
}

namespace {

ContingencyTable assemble(const std::map<std::string, std::vector<std::uint64_t>>& by_country,
                          std::vector<std::string> cols) {
  std::vector<std::string> rows;
  std::vector<std::vector<std::uint64_t>> counts;
  for (const auto& [code, row] : by_country) {
    rows.push_back(code);
    counts.push_back(row);
  }
  return ContingencyTable(std::move(rows), std::move(cols), std::move(counts));
}

}  // namespace

ContingencyTable build_contingency(const Corpus& corpus, const std::vector<Lexicon>& lexicons,
                                   CountryRole role) {
  if (lexicons.empty()) throw InvalidArgument("lexicons", "no lexicon given");
  std::vector<std::string> cols;
  for (const auto& lex : lexicons) cols.push_back(lex.name);

  bool any_text = false;
  std::map<std::string, std::vector<std::uint64_t>> by_country;
  for (const auto& [id, paper] : corpus.papers()) {
    if (!paper.has_text()) continue;
    any_text = true;
    const auto countries = countries_for(paper, role);
    if (countries.empty()) continue;
    const auto counts = lexicon_counts(tokenize(*paper.text, paper.lang), lexicons);
    for (const auto& code : countries) {
      auto& row = by_country.try_emplace(code, cols.size(), 0).first->second;
      for (std::size_t t = 0; t < cols.size(); ++t) row[t] += counts.at(cols[t]);
    }
  }
  if (!any_text) throw InvalidArgument("corpus", "no paper has text");
  return assemble(by_country, std::move(cols));
}

ContingencyTable build_theme_contingency(const Corpus& corpus, const ThemeModel& model,
                                         CountryRole role) {
  std::vector<std::string> cols;
  for (std::size_t t = 0; t < model.themes.size(); ++t) cols.push_back("theme-" + std::to_string(t));

  std::map<std::string, std::vector<std::uint64_t>> by_country;
  for (std::size_t t = 0; t < model.themes.size(); ++t) {
    for (const auto& id : model.themes[t].documents) {
      const auto* paper = corpus.find(id);
      if (paper == nullptr) continue;
      for (const auto& code : countries_for(*paper, role)) {
        ++by_country.try_emplace(code, cols.size(), 0).first->second[t];
      }
    }
  }
  return assemble(by_country, std::move(cols));
}

// ---------------------------------------------------------------------------
// Residuals

Representation classify_residual(double residual) {
  if (residual > kRepresentationThreshold) return Representation::over;
  if (residual < -kRepresentationThreshold) return Representation::under;
  return Representation::neutral;
}

ResidualMatrix representation_residuals(const ContingencyTable& table) {
  if (table.grand_total() == 0) throw InvalidArgument("table", "grand total is zero");
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    if (table.row_totals()[r] == 0) {
      throw InvalidArgument("table", "row '" + table.rows()[r] + "' has zero total");
    }
  }
  for (std::size_t c = 0; c < table.cols().size(); ++c) {
    if (table.col_totals()[c] == 0) {
      throw InvalidArgument("table", "column '" + table.cols()[c] + "' has zero total");
    }
  }

  ResidualMatrix out{table.rows(), table.cols(), {}, {}, {}};
  const double total = static_cast<double>(table.grand_total());
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    auto& expected = out.expected.emplace_back();
    auto& residuals = out.residuals.emplace_back();
    auto& labels = out.labels.emplace_back();
    for (std::size_t c = 0; c < table.cols().size(); ++c) {
      const double e = static_cast<double>(table.row_totals()[r]) *
                       static_cast<double>(table.col_totals()[c]) / total;
      const double res = (static_cast<double>(table.at(r, c)) - e) / std::sqrt(e);
      expected.push_back(e);
      residuals.push_back(res);
      labels.push_back(classify_residual(res));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ward classification

std::vector<DendrogramMerge> ward_dendrogram(const std::vector<std::vector<double>>& points,
                                             const std::vector<std::string>& labels) {
  struct Cluster {
    std::size_t id;
    std::size_t size;
    std::vector<double> centroid;
    const std::string* label;  // smallest member label
  };
  const std::size_t n = points.size();
  if (labels.size() != n) throw InvalidArgument("labels", "one label per point required");

  std::vector<Cluster> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, 1, points[i], &labels[i]});

  const auto merge_cost = [](const Cluster& a, const Cluster& b) {
    double sq = 0.0;
    for (std::size_t d = 0; d < a.centroid.size(); ++d) {
      const double diff = a.centroid[d] - b.centroid[d];
      sq += diff * diff;
    }
    const double na = static_cast<double>(a.size), nb = static_cast<double>(b.size);
    return na * nb / (na + nb) * sq;
  };
  const auto label_pair = [](const Cluster& a, const Cluster& b) {
    return *a.label < *b.label ? std::tie(*a.label, *b.label) : std::tie(*b.label, *a.label);
  };

  std::vector<DendrogramMerge> merges;
  while (active.size() > 1) {
    std::size_t best_i = 0, best_j = 1;
    double best = merge_cost(active[0], active[1]);
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double cost = merge_cost(active[i], active[j]);
        if (cost < best || (cost == best && label_pair(active[i], active[j]) <
                                                label_pair(active[best_i], active[best_j]))) {
          best = cost;
          best_i = i;
          best_j = j;
        }
      }
    }
    auto& a = active[best_i];
    const auto& b = active[best_j];
    const double na = static_cast<double>(a.size), nb = static_cast<double>(b.size);
    Cluster merged{n + merges.size(), a.size + b.size, a.centroid,
                   *a.label < *b.label ? a.label : b.label};
    for (std::size_t d = 0; d < merged.centroid.size(); ++d) {
      merged.centroid[d] = (na * a.centroid[d] + nb * b.centroid[d]) / (na + nb);
    }
    merges.push_back({std::min(a.id, b.id), std::max(a.id, b.id), best, merged.size});
    a = std::move(merged);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  return merges;
}

std::vector<std::size_t> cut_dendrogram(const std::vector<DendrogramMerge>& dendrogram,
                                        std::size_t n, std::size_t k) {
  if (n == 0) return {};
  if (k < 1 || k > n) throw InvalidArgument("k", "must lie in [1, " + std::to_string(n) + "]");
  if (dendrogram.size() + 1 != n) {
    throw InvalidArgument("dendrogram", "expected " + std::to_string(n - 1) + " merges");
  }
  // Union-find over leaves and merge nodes.
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - k; ++m) {
    parent[find(dendrogram[m].left)] = n + m;
    parent[find(dendrogram[m].right)] = n + m;
  }
  std::map<std::size_t, std::size_t> class_of_root;
  std::vector<std::size_t> classes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    const auto [it, inserted] = class_of_root.emplace(root, class_of_root.size() + 1);
    classes[i] = it->second;
  }
  return classes;
}

std::map<std::string, std::size_t> CountryClassification::assignment() const {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < countries.size(); ++i) out[countries[i]] = classes[i];
  return out;
}

CountryClassification classify_countries(const ContingencyTable& table, std::size_t k) {
  CountryClassification out;
  std::vector<std::vector<double>> profiles;
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const auto total = table.row_totals()[r];
    if (total == 0) {
      out.excluded.push_back(table.rows()[r]);
      continue;
    }
    out.countries.push_back(table.rows()[r]);
    auto& profile = profiles.emplace_back();
    for (std::size_t c = 0; c < table.cols().size(); ++c) {
      profile.push_back(static_cast<double>(table.at(r, c)) / static_cast<double>(total));
    }
  }
  const std::size_t n = out.countries.size();
  if (n == 0) throw InvalidArgument("table", "no country with a non-zero profile");
  if (k < 1 || k > n) {
    throw InvalidArgument("k", "must lie in [1, " + std::to_string(n) + "], got " +
                                   std::to_string(k));
  }
  out.k = k;
  out.dendrogram = ward_dendrogram(profiles, out.countries);
  out.classes = cut_dendrogram(out.dendrogram, n, k);
  return out;
}

}  // namespace biblionet
