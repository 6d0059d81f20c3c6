#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace biblionet {

/// Where a record sits relative to the journal being analysed.
enum class Origin { seed, cited, citing, external };

std::string_view to_string(Origin origin);
std::optional<Origin> parse_origin(std::string_view name);

/// One publication of the corpus.
struct PaperRecord {
  std::string id;
  std::string title;
  int year = 0;
  std::string lang = "en";
  std::vector<std::string> affiliations;  // ISO-3166-1 alpha-2 codes
  std::vector<std::string> studied;       // ISO-3166-1 alpha-2 codes
  std::vector<std::string> keywords;
  std::optional<std::string> text;
  std::vector<std::string> refs;  // opaque reference identifiers
  Origin origin = Origin::seed;

  bool has_text() const { return text.has_value() && !text->empty(); }

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

/// Lowercases, trims and deduplicates keywords, keeping first occurrences.
std::vector<std::string> normalize_keywords(const std::vector<std::string>& keywords);

/// Immutable set of papers keyed by id, with keyword and year indexes.
class Corpus {
 public:
  using PaperMap = std::map<std::string, PaperRecord>;
  using KeywordIndex = std::map<std::string, std::set<std::string>>;
  using YearIndex = std::map<int, std::set<std::string>>;

  Corpus() = default;
  /// Throws InvalidArgument on a duplicate id.
  explicit Corpus(std::vector<PaperRecord> papers);

  const PaperMap& papers() const { return papers_; }
  const KeywordIndex& keyword_index() const { return keyword_index_; }
  const YearIndex& year_index() const { return year_index_; }

  std::size_t size() const { return papers_.size(); }
  bool empty() const { return papers_.empty(); }
  bool contains(const std::string& id) const { return papers_.count(id) != 0; }
  const PaperRecord* find(const std::string& id) const;

  std::optional<int> min_year() const;
  std::optional<int> max_year() const;

  /// True when both indexes equal a full rebuild from `papers()`.
  bool indexes_consistent() const;

 private:
  void rebuild_indexes();

  PaperMap papers_;
  KeywordIndex keyword_index_;
  YearIndex year_index_;
};

/// Parses one corpus record; `line` is only used for error messages.
PaperRecord parse_record(std::string_view json_line, std::size_t line = 1);
std::string serialize_record(const PaperRecord& record);

/// Reads a line-delimited corpus. Blank lines are skipped. Throws ParseError
/// (line number and field) for malformed lines and duplicate ids, Error when
/// the file cannot be read.
Corpus load_corpus(const std::filesystem::path& path);
Corpus read_corpus(std::istream& in);
Corpus parse_corpus(std::string_view contents);

/// One line per record, ordered by id.
std::string serialize_corpus(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct Violation {
  std::string id;
  std::string rule;
  std::string detail;

  friend auto operator<=>(const Violation&, const Violation&) = default;
};

namespace rules {
inline constexpr std::string_view id_nonempty = "id_nonempty";
inline constexpr std::string_view year_range = "year_range";
inline constexpr std::string_view country_code = "country_code";
inline constexpr std::string_view keywords_normalized = "keywords_normalized";
}  // namespace rules

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

bool is_country_code(std::string_view code);

/// Reports every broken record invariant, sorted by (id, rule, detail).
std::vector<Violation> validate_corpus(const Corpus& corpus);

/// Returns the corpus without the records named in `report`.
Corpus drop_invalid(const Corpus& corpus, const std::vector<Violation>& report);

/// Inclusive year range.
struct PeriodFilter {
  int from_year = kMinYear;
  int to_year = kMaxYear;

  /// Throws InvalidArgument when from_year > to_year.
  void check() const;
  bool contains(int year) const { return from_year <= year && year <= to_year; }
};

Corpus filter_period(const Corpus& corpus, const PeriodFilter& period);

struct CitationNeighborhood {
  std::set<std::string> cited;
  std::set<std::string> citing;
  std::set<std::string> coupled;

  friend bool operator==(const CitationNeighborhood&, const CitationNeighborhood&) = default;
};

/// Papers cited by, citing, or sharing a reference with the seeds. Seeds are
/// excluded from every set. Throws InvalidArgument for an unknown seed id.
CitationNeighborhood citation_neighborhood(const Corpus& corpus,
                                           const std::set<std::string>& seed_ids);

/// Bibliographic coupling between two papers; `a < b`.
struct CouplingLink {
  std::string a;
  std::string b;
  std::uint64_t weight = 0;

  friend auto operator<=>(const CouplingLink&, const CouplingLink&) = default;
};

/// All coupled pairs sorted by (a, b); weight counts distinct shared references.
std::vector<CouplingLink> coupling_links(const Corpus& corpus);

}  // namespace biblionet
