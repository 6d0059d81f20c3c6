#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "biblionet/corpus.hpp"

namespace biblionet {

/// Parameters of a planted-structure corpus. Keyword blocks and theme
/// vocabularies are generated when left empty.
struct SyntheticSpec {
  std::size_t n_docs = 40;
  std::size_t n_keywords = 20;   // used when keyword_blocks is empty
  std::size_t n_blocks = 2;      // used when keyword_blocks is empty
  std::vector<std::vector<std::string>> keyword_blocks;
  std::size_t keywords_per_doc = 4;
  double p_within = 0.9;         // chance a keyword comes from the doc's own block

  std::size_t n_themes = 2;           // used when theme_vocabularies is empty
  std::size_t vocabulary_size = 30;   // per generated theme
  std::vector<std::vector<std::string>> theme_vocabularies;
  std::size_t words_per_text = 60;    // 0 means records carry no text

  int first_year = 2000;
  int last_year = 2015;
  std::vector<std::string> countries = {"BR", "DE", "FR", "GB", "IT", "US"};
  std::size_t n_refs = 50;
  std::size_t refs_per_doc = 3;
  double p_seed = 1.0;  // the rest is split between cited and citing

  std::uint64_t seed = 0;

  /// Throws InvalidArgument for inconsistent parameters.
  void check() const;
};

/// Reads a JSON spec; absent fields keep their defaults.
SyntheticSpec parse_synthetic_spec(std::string_view json);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

struct PlantedCorpus {
  Corpus corpus;
  std::vector<std::vector<std::string>> keyword_blocks;
  std::vector<std::vector<std::string>> theme_vocabularies;
  std::vector<std::size_t> doc_block;  // per document, corpus id order
  std::vector<std::size_t> doc_theme;
};

/// Document i belongs to block i mod blocks and theme i mod themes. Texts
/// draw only from their theme's vocabulary.
PlantedCorpus generate_planted(const SyntheticSpec& spec);

/// Serialized corpus file contents for `spec`.
std::string generate_planted_corpus(const SyntheticSpec& spec);

/// The three-paper fixture used by the service examples and demos.
Corpus micro_corpus();

}  // namespace biblionet
