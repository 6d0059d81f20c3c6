#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "biblionet/corpus.hpp"
#include "biblionet/text.hpp"

namespace biblionet {

struct ThemeModel;

/// Paper counts per country within a period.
struct CountryCounts {
  std::uint64_t n_authored = 0;
  std::uint64_t n_studied = 0;

  friend bool operator==(const CountryCounts&, const CountryCounts&) = default;
};

struct CountryActivity {
  PeriodFilter period;
  std::map<std::string, CountryCounts> countries;  // keyed by ISO code
};

/// A paper counts at most once per country and role.
CountryActivity country_activity(const Corpus& corpus, const PeriodFilter& period);

/// Copy of the corpus where records with no `studied` countries but with
/// text get them from gazetteer detection. Explicit metadata is kept.
Corpus with_detected_studied(const Corpus& corpus, const Gazetteer& gazetteer);

enum class CountryRole { studied, affiliation };

/// Country x column count matrix. Rows and columns keep the order given.
class ContingencyTable {
 public:
  ContingencyTable() = default;
  /// Throws InvalidArgument on shape mismatch or duplicate labels.
  ContingencyTable(std::vector<std::string> rows, std::vector<std::string> cols,
                   std::vector<std::vector<std::uint64_t>> counts);

  const std::vector<std::string>& rows() const { return rows_; }
  const std::vector<std::string>& cols() const { return cols_; }
  std::uint64_t at(std::size_t r, std::size_t c) const { return counts_[r][c]; }
  const std::vector<std::vector<std::uint64_t>>& counts() const { return counts_; }

  const std::vector<std::uint64_t>& row_totals() const { return row_totals_; }
  const std::vector<std::uint64_t>& col_totals() const { return col_totals_; }
  std::uint64_t grand_total() const { return grand_total_; }

  /// Same table without zero-total rows and columns.
  ContingencyTable without_empty() const;

 private:
  std::vector<std::string> rows_;
  std::vector<std::string> cols_;
  std::vector<std::vector<std::uint64_t>> counts_;
  std::vector<std::uint64_t> row_totals_;
  std::vector<std::uint64_t> col_totals_;
  std::uint64_t grand_total_ = 0;
};

/// n[c][t] = occurrences of lexicon t's terms in the texts of papers attached
/// to country c under `role`. Rows are sorted country codes, columns follow
/// `lexicons`. Throws InvalidArgument when `lexicons` is empty or no paper
/// has text.
ContingencyTable build_contingency(const Corpus& corpus, const std::vector<Lexicon>& lexicons,
                                   CountryRole role);

/// n[c][t] = number of documents of theme t attached to country c.
ContingencyTable build_theme_contingency(const Corpus& corpus, const ThemeModel& model,
                                         CountryRole role);

enum class Representation { under, neutral, over };

inline constexpr double kRepresentationThreshold = 2.0;

struct ResidualMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> expected;
  std::vector<std::vector<double>> residuals;
  std::vector<std::vector<Representation>> labels;
};

Representation classify_residual(double residual);

/// r = (n - e) / sqrt(e) with e = row * col / N. Throws InvalidArgument
/// naming the first zero-total row or column.
ResidualMatrix representation_residuals(const ContingencyTable& table);

struct DendrogramMerge {
  std::size_t left;   // cluster ids: 0..n-1 are rows, n+i is the i-th merge
  std::size_t right;
  double height;      // increase of within-class sum of squares
  std::size_t size;

  friend bool operator==(const DendrogramMerge&, const DendrogramMerge&) = default;
};

struct CountryClassification {
  std::vector<std::string> countries;      // classified rows, table order
  std::vector<std::size_t> classes;        // 1..k, parallel to `countries`
  std::vector<DendrogramMerge> dendrogram; // countries.size() - 1 merges
  std::vector<std::string> excluded;       // all-zero rows
  std::size_t k = 0;

  std::map<std::string, std::size_t> assignment() const;
};

/// Ward clustering of row profiles. Equal merge costs resolve to the pair
/// whose smallest member labels are lexicographically smallest.
std::vector<DendrogramMerge> ward_dendrogram(const std::vector<std::vector<double>>& points,
                                             const std::vector<std::string>& labels);

/// Cuts after the first n - k merges. Class ids are 1..k in order of each
/// class's first row.
std::vector<std::size_t> cut_dendrogram(const std::vector<DendrogramMerge>& dendrogram,
                                        std::size_t n, std::size_t k);

/// Throws InvalidArgument when k is outside [1, classifiable countries].
CountryClassification classify_countries(const ContingencyTable& table, std::size_t k);

}  // namespace biblionet
