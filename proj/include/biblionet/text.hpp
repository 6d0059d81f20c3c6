#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace biblionet {

/// Lowercased, diacritic-folded tokens of length >= 2 with pure-digit tokens
/// and the stopwords of `lang` removed. Only "en" and "fr" carry stopword
/// lists; any other tag keeps every token.
std::vector<std::string> tokenize(std::string_view text, std::string_view lang);

/// Same normalization as `tokenize` without stopword removal. Gazetteer
/// aliases and lexicon terms go through this.
std::vector<std::string> normalize_terms(std::string_view text);

/// Bundled stopword list for `lang` (empty for unsupported languages).
const std::unordered_set<std::string>& stopwords(std::string_view lang);

/// Sparse non-negative term weights. Zero entries are never stored.
class TermVector {
 public:
  enum class Mode { counts, tfidf };

  explicit TermVector(Mode mode = Mode::counts) : mode_(mode) {}

  Mode mode() const { return mode_; }
  const std::map<std::string, double>& entries() const { return entries_; }
  double operator[](const std::string& term) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Adds `value` to a term; a resulting zero removes the entry.
  void add(const std::string& term, double value);

 private:
  Mode mode_;
  std::map<std::string, double> entries_;
};

TermVector term_counts(const std::vector<std::string>& tokens);

/// weight(t) = tf(t) * ln(n_docs / df(t)). Throws InvalidArgument when a
/// document term has no document frequency, df is 0 or exceeds n_docs, or
/// n_docs < 1.
TermVector vectorize_tfidf(const std::vector<std::string>& doc_tokens,
                           const std::map<std::string, std::uint64_t>& document_frequencies,
                           std::uint64_t n_docs);

/// Named semantic field. Terms are normalized single tokens.
struct Lexicon {
  std::string name;
  std::set<std::string> terms;
};

/// Builds a lexicon from raw terms, normalizing each. Throws InvalidArgument
/// for an empty name, an empty term set, or a term that is not one token.
Lexicon make_lexicon(std::string name, const std::vector<std::string>& raw_terms);

/// Reads a line-delimited file of {"name": ..., "terms": [...]} records.
std::vector<Lexicon> load_lexicons(const std::filesystem::path& path);
std::vector<Lexicon> parse_lexicons(std::string_view contents);

/// Occurrences (with multiplicity) of each lexicon's terms. Every lexicon is
/// present in the output. Throws InvalidArgument for duplicate names.
std::map<std::string, std::uint64_t> lexicon_counts(const std::vector<std::string>& doc_tokens,
                                                    const std::vector<Lexicon>& lexicons);

/// Country aliases keyed by their normalized token sequence.
class Gazetteer {
 public:
  Gazetteer() = default;

  /// Throws InvalidArgument for a malformed code, an alias with no tokens, or
  /// an alias already bound to another code.
  void add(const std::string& code, std::string_view alias);

  const std::map<std::vector<std::string>, std::string>& aliases() const { return aliases_; }
  std::size_t longest_alias() const { return longest_; }
  bool empty() const { return aliases_.empty(); }

 private:
  std::map<std::vector<std::string>, std::string> aliases_;
  std::size_t longest_ = 0;
};

/// Reads a line-delimited file of {"code": ..., "aliases": [...]} records.
Gazetteer load_gazetteer(const std::filesystem::path& path);
Gazetteer parse_gazetteer(std::string_view contents);

/// Leftmost-longest alias scan over `normalize_terms(text)`.
std::set<std::string> detect_studied_countries(std::string_view text, const Gazetteer& gazetteer);

}  // namespace biblionet
