#include "biblionet/fixtures.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "biblionet/error.hpp"
#include "biblionet/text.hpp"
#include "random.hpp"

namespace biblionet {

namespace {

std::string padded(std::size_t value, std::size_t width) {
  auto s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::size_t digits(std::size_t n) { return std::to_string(n > 0 ? n - 1 : 0).size(); }

std::vector<std::vector<std::string>> resolve_blocks(const SyntheticSpec& spec) {
  if (!spec.keyword_blocks.empty()) return spec.keyword_blocks;
  std::vector<std::vector<std::string>> blocks(spec.n_blocks);
  const auto wb = digits(spec.n_blocks), wk = digits(spec.n_keywords);
  for (std::size_t j = 0; j < spec.n_keywords; ++j) {
    const auto b = j * spec.n_blocks / spec.n_keywords;
    blocks[b].push_back("b" + padded(b, wb) + "-k" + padded(j, wk));
  }
  return blocks;
}

std::vector<std::vector<std::string>> resolve_vocabularies(const SyntheticSpec& spec) {
  if (!spec.theme_vocabularies.empty()) return spec.theme_vocabularies;
  std::vector<std::vector<std::string>> vocab(spec.n_themes);
  const auto wt = digits(spec.n_themes), ww = digits(spec.vocabulary_size);
  for (std::size_t t = 0; t < spec.n_themes; ++t) {
    for (std::size_t j = 0; j < spec.vocabulary_size; ++j) {
      vocab[t].push_back("t" + padded(t, wt) + "w" + padded(j, ww));
    }
  }
  return vocab;
}

}  // namespace

void SyntheticSpec::check() const {
  if (n_docs < 1) throw InvalidArgument("n_docs", "must be at least 1");
  if (keyword_blocks.empty()) {
    if (n_blocks < 1) throw InvalidArgument("n_blocks", "must be at least 1");
    if (n_keywords < n_blocks) throw InvalidArgument("n_keywords", "fewer keywords than blocks");
  } else {
    std::set<std::string> seen;
    for (const auto& block : keyword_blocks) {
      if (block.empty()) throw InvalidArgument("keyword_blocks", "empty block");
      for (const auto& kw : block) {
        if (normalize_keywords({kw}) != std::vector<std::string>{kw}) {
          throw InvalidArgument("keyword_blocks", "keyword '" + kw + "' is not normalized");
        }
        if (!seen.insert(kw).second) {
          throw InvalidArgument("keyword_blocks", "keyword '" + kw + "' appears twice");
        }
      }
    }
  }
  if (p_within < 0.0 || p_within > 1.0) throw InvalidArgument("p_within", "must lie in [0, 1]");
  if (p_seed < 0.0 || p_seed > 1.0) throw InvalidArgument("p_seed", "must lie in [0, 1]");
  if (theme_vocabularies.empty()) {
    if (n_themes < 1) throw InvalidArgument("n_themes", "must be at least 1");
    if (vocabulary_size < 1) throw InvalidArgument("vocabulary_size", "must be at least 1");
  } else {
    std::set<std::string> seen;
    for (const auto& vocab : theme_vocabularies) {
      if (vocab.empty()) throw InvalidArgument("theme_vocabularies", "empty vocabulary");
      for (const auto& word : vocab) {
        if (tokenize(word, "en") != std::vector<std::string>{word}) {
          throw InvalidArgument("theme_vocabularies",
                                "word '" + word + "' is not a single normalized token");
        }
        if (!seen.insert(word).second) {
          throw InvalidArgument("theme_vocabularies", "word '" + word + "' is not disjoint");
        }
      }
    }
  }
  if (first_year > last_year || first_year < kMinYear || last_year > kMaxYear) {
    throw InvalidArgument("first_year", "year range must be ordered and within [1900, 2100]");
  }
  if (countries.empty()) throw InvalidArgument("countries", "at least one country required");
  for (const auto& code : countries) {
    if (!is_country_code(code)) throw InvalidArgument("countries", "bad code '" + code + "'");
  }
  if (refs_per_doc > 0 && n_refs == 0) {
    throw InvalidArgument("n_refs", "references requested from an empty pool");
  }
}

SyntheticSpec parse_synthetic_spec(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("spec", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("spec", "must be a JSON object");
  SyntheticSpec spec;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "n_docs") spec.n_docs = value.get<std::size_t>();
      else if (key == "n_keywords") spec.n_keywords = value.get<std::size_t>();
      else if (key == "n_blocks") spec.n_blocks = value.get<std::size_t>();
      else if (key == "keyword_blocks") spec.keyword_blocks = value.get<std::vector<std::vector<std::string>>>();
      else if (key == "keywords_per_doc") spec.keywords_per_doc = value.get<std::size_t>();
      else if (key == "p_within") spec.p_within = value.get<double>();
      else if (key == "n_themes") spec.n_themes = value.get<std::size_t>();
      else if (key == "vocabulary_size") spec.vocabulary_size = value.get<std::size_t>();
      else if (key == "theme_vocabularies") spec.theme_vocabularies = value.get<std::vector<std::vector<std::string>>>();
      else if (key == "words_per_text") spec.words_per_text = value.get<std::size_t>();
      else if (key == "first_year") spec.first_year = value.get<int>();
      else if (key == "last_year") spec.last_year = value.get<int>();
      else if (key == "countries") spec.countries = value.get<std::vector<std::string>>();
      else if (key == "n_refs") spec.n_refs = value.get<std::size_t>();
      else if (key == "refs_per_doc") spec.refs_per_doc = value.get<std::size_t>();
      else if (key == "p_seed") spec.p_seed = value.get<double>();
      else if (key == "seed") spec.seed = value.get<std::uint64_t>();
      else throw InvalidArgument(key, "unknown spec field");
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(key, std::string("wrong type: ") + e.what());
    }
  }
  spec.check();
  return spec;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open spec file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_synthetic_spec(ss.str());
}

PlantedCorpus generate_planted(const SyntheticSpec& spec) {
  spec.check();
  PlantedCorpus out;
  out.keyword_blocks = resolve_blocks(spec);
  out.theme_vocabularies = resolve_vocabularies(spec);
  const auto& blocks = out.keyword_blocks;
  const auto& vocab = out.theme_vocabularies;

  Rng rng(spec.seed);
  const auto pick = [&](const std::vector<std::string>& items) -> const std::string& {
    return items[rng.below(items.size())];
  };
  const auto id_width = std::max<std::size_t>(digits(spec.n_docs), 4);

  std::vector<PaperRecord> records;
  records.reserve(spec.n_docs);
  for (std::size_t i = 0; i < spec.n_docs; ++i) {
    PaperRecord rec;
    rec.id = "D" + padded(i, id_width);
    rec.title = "Synthetic document " + std::to_string(i);
    rec.year = spec.first_year +
               static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.last_year - spec.first_year) + 1));

    const std::size_t block = i % blocks.size();
    const std::size_t theme = i % vocab.size();
    out.doc_block.push_back(block);
    out.doc_theme.push_back(theme);

    std::set<std::string> chosen;
    std::size_t available = blocks[block].size();
    if (blocks.size() > 1 && spec.p_within < 1.0) {
      available = 0;
      for (const auto& b : blocks) available += b.size();
    }
    const auto wanted = std::min(spec.keywords_per_doc, available);
    for (std::size_t attempt = 0; chosen.size() < wanted && attempt < 100 * (wanted + 1);
         ++attempt) {
      std::size_t from = block;
      if (blocks.size() > 1 && !rng.bernoulli(spec.p_within)) {
        from = rng.below(blocks.size() - 1);
        if (from >= block) ++from;
      }
      const auto& kw = pick(blocks[from]);
      if (chosen.insert(kw).second) rec.keywords.push_back(kw);
    }

    if (spec.words_per_text > 0) {
      std::string text;
      for (std::size_t w = 0; w < spec.words_per_text; ++w) {
        if (w > 0) text += ' ';
        text += pick(vocab[theme]);
      }
      rec.text = std::move(text);
    }

    rec.affiliations.push_back(pick(spec.countries));
    if (rng.bernoulli(0.3)) {
      const auto& extra = pick(spec.countries);
      if (extra != rec.affiliations.front()) rec.affiliations.push_back(extra);
    }
    rec.studied.push_back(pick(spec.countries));

    std::set<std::string> refs;
    const auto ref_width = digits(spec.n_refs);
    for (std::size_t r = 0; r < spec.refs_per_doc; ++r) {
      const auto ref = "R" + padded(rng.below(spec.n_refs), ref_width);
      if (refs.insert(ref).second) rec.refs.push_back(ref);
    }

    if (!rng.bernoulli(spec.p_seed)) {
      rec.origin = rng.bernoulli(0.5) ? Origin::cited : Origin::citing;
    }
    records.push_back(std::move(rec));
  }
  out.corpus = Corpus(std::move(records));
  return out;
}

std::string generate_planted_corpus(const SyntheticSpec& spec) {
  return serialize_corpus(generate_planted(spec).corpus);
}

Corpus micro_corpus() {
  std::vector<PaperRecord> papers(3);
  papers[0].id = "P1";
  papers[0].title = "Cross-border commuting in the Upper Rhine";
  papers[0].year = 2000;
  papers[0].affiliations = {"FR"};
  papers[0].studied = {"DE"};
  papers[0].keywords = {"border", "commuting", "spatial analysis"};
  papers[0].text =
      "Commuting flows across the border between Alsace and Baden shape a cross-border labour "
      "market. The border region shows integration despite the boundary.";
  papers[0].refs = {"R1", "R2"};

  papers[1].id = "P2";
  papers[1].title = "Flood risk and urban planning in French cities";
  papers[1].year = 2005;
  papers[1].affiliations = {"FR", "US"};
  papers[1].studied = {"FR"};
  papers[1].keywords = {"risk", "urban planning", "spatial analysis"};
  papers[1].text =
      "Flood risk exposure in French cities depends on urban planning choices. Hazard maps "
      "and risk prevention plans reduce vulnerability.";
  papers[1].refs = {"P1", "R1"};

  papers[2].id = "P3";
  papers[2].title = "Deforestation frontiers in Amazonia";
  papers[2].year = 2012;
  papers[2].affiliations = {"BR"};
  papers[2].studied = {"BR"};
  papers[2].keywords = {"deforestation", "risk", "frontier"};
  papers[2].text =
      "The deforestation frontier in Amazonia moves with road building. Environmental risk "
      "grows where the frontier meets protected areas.";
  papers[2].refs = {"R3"};
  return Corpus(std::move(papers));
}

}  // namespace biblionet
