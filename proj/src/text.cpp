#include "biblionet/text.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "biblionet/corpus.hpp"
#include "biblionet/error.hpp"
#include "utf8.hpp"

namespace biblionet {

namespace detail {
extern const char* const kStopwordsEn;
extern const char* const kStopwordsFr;
}  // namespace detail

namespace {

bool is_separator(char32_t cp) {
  if (cp < 0x80) {
    return !((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9'));
  }
  return cp <= 0xBF || cp == 0xD7 || cp == 0xF7 || (cp >= 0x2000 && cp <= 0x2BFF) ||
         (cp >= 0x2E00 && cp <= 0x2E7F) || (cp >= 0x3000 && cp <= 0x303F) ||
         (cp >= 0xFE30 && cp <= 0xFE4F) || (cp >= 0xFF00 && cp <= 0xFF0F) ||
         cp == utf8::kReplacement;
}

bool is_combining_mark(char32_t cp) { return cp >= 0x300 && cp <= 0x36F; }

bool all_digits(std::string_view s) {
  for (const char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::size_t code_points(std::string_view s) {
  std::size_t n = 0;
  for (const char c : s) n += (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  return n;
}

// Splits, lowercases and folds; `keep` decides whether a finished token stays.
template <class Keep>
std::vector<std::string> scan_tokens(std::string_view text, Keep keep) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (current.empty()) return;
    if (code_points(current) >= 2 && !all_digits(current) && keep(current)) {
      tokens.push_back(current);
    }
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = utf8::to_lower(utf8::next(text, pos));
    if (is_combining_mark(cp)) continue;
    if (is_separator(cp)) {
      flush();
      continue;
    }
    if (cp < 0x80) {
      current.push_back(static_cast<char>(cp));
    } else if (const auto folded = utf8::fold(cp); !folded.empty()) {
      current.append(folded);
    } else {
      utf8::append(current, cp);
    }
  }
  flush();
  return tokens;
}

std::unordered_set<std::string> parse_stopwords(std::string_view list) {
  std::unordered_set<std::string> words;
  std::istringstream in{std::string(list)};
  std::string line;
  while (std::getline(in, line)) {
    // Entries are folded the same way as text; one-letter entries vanish
    // here, but the tokenizer drops such tokens anyway.
    for (auto& token : normalize_terms(line)) words.insert(std::move(token));
  }
  return words;
}

template <class Handle>
void for_each_record(std::string_view contents, Handle handle) {
  std::istringstream in{std::string(contents)};
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, "", std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line, "", "record must be a JSON object");
    handle(obj, line);
  }
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(std::string("cannot open ") + what + " file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> string_array(const nlohmann::json& obj, const char* field,
                                      std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(line, field, "missing required field");
  if (!it->is_array()) throw ParseError(line, field, "expected array of strings");
  std::vector<std::string> out;
  for (const auto& item : *it) {
    if (!item.is_string()) throw ParseError(line, field, "expected array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string string_field(const nlohmann::json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(line, field, "missing required field");
  if (!it->is_string()) throw ParseError(line, field, "expected string");
  return it->get<std::string>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Tokenization

const std::unordered_set<std::string>& stopwords(std::string_view lang) {
  static const std::unordered_set<std::string> en = parse_stopwords(detail::kStopwordsEn);
  static const std::unordered_set<std::string> fr = parse_stopwords(detail::kStopwordsFr);
  static const std::unordered_set<std::string> none;
  if (lang == "en") return en;
  if (lang == "fr") return fr;
  return none;
}

std::vector<std::string> normalize_terms(std::string_view text) {
  return scan_tokens(text, [](const std::string&) { return true; });
}

std::vector<std::string> tokenize(std::string_view text, std::string_view lang) {
  const auto& stop = stopwords(lang);
  return scan_tokens(text, [&](const std::string& token) { return !stop.count(token); });
}

// ---------------------------------------------------------------------------
// Term vectors

double TermVector::operator[](const std::string& term) const {
  const auto it = entries_.find(term);
  return it == entries_.end() ? 0.0 : it->second;
}

void TermVector::add(const std::string& term, double value) {
  if (value == 0.0) return;
  auto [it, inserted] = entries_.emplace(term, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) entries_.erase(it);
  }
}

TermVector term_counts(const std::vector<std::string>& tokens) {
  TermVector counts(TermVector::Mode::counts);
  for (const auto& token : tokens) counts.add(token, 1.0);
  return counts;
}

TermVector vectorize_tfidf(const std::vector<std::string>& doc_tokens,
                           const std::map<std::string, std::uint64_t>& document_frequencies,
                           std::uint64_t n_docs) {
  if (n_docs < 1) throw InvalidArgument("n_docs", "must be at least 1");
  std::map<std::string, std::uint64_t> tf;
  for (const auto& token : doc_tokens) ++tf[token];

  TermVector out(TermVector::Mode::tfidf);
  for (const auto& [term, count] : tf) {
    const auto it = document_frequencies.find(term);
    const std::uint64_t df = it == document_frequencies.end() ? 0 : it->second;
    if (df == 0) {
      throw InvalidArgument("document_frequencies", "term '" + term + "' has df = 0");
    }
    if (df > n_docs) {
      throw InvalidArgument("document_frequencies",
                            "term '" + term + "' has df greater than n_docs");
    }
    const double idf = std::log(static_cast<double>(n_docs) / static_cast<double>(df));
    out.add(term, static_cast<double>(count) * idf);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicons

Lexicon make_lexicon(std::string name, const std::vector<std::string>& raw_terms) {
  if (name.empty()) throw InvalidArgument("name", "lexicon name is empty");
  Lexicon lex{std::move(name), {}};
  for (const auto& raw : raw_terms) {
    auto tokens = normalize_terms(raw);
    if (tokens.size() != 1) {
      throw InvalidArgument("terms", "lexicon '" + lex.name + "': term '" + raw +
                                         "' does not normalize to a single token");
    }
    lex.terms.insert(std::move(tokens.front()));
  }
  if (lex.terms.empty()) throw InvalidArgument("terms", "lexicon '" + lex.name + "' is empty");
  return lex;
}

std::vector<Lexicon> parse_lexicons(std::string_view contents) {
  std::vector<Lexicon> out;
  std::set<std::string> names;
  for_each_record(contents, [&](const nlohmann::json& obj, std::size_t line) {
    auto name = string_field(obj, "name", line);
    auto terms = string_array(obj, "terms", line);
    if (!names.insert(name).second) throw ParseError(line, "name", "duplicate lexicon name");
    try {
      out.push_back(make_lexicon(std::move(name), terms));
    } catch (const InvalidArgument& e) {
      throw ParseError(line, e.parameter(), e.what());
    }
  });
  return out;
}

std::vector<Lexicon> load_lexicons(const std::filesystem::path& path) {
  return parse_lexicons(read_file(path, "lexicon"));
}

std::map<std::string, std::uint64_t> lexicon_counts(const std::vector<std::string>& doc_tokens,
                                                    const std::vector<Lexicon>& lexicons) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& lex : lexicons) {
    if (!counts.emplace(lex.name, 0).second) {
      throw InvalidArgument("lexicons", "duplicate lexicon name '" + lex.name + "'");
    }
  }
  std::map<std::string, std::uint64_t> tf;
  for (const auto& token : doc_tokens) ++tf[token];
  for (const auto& lex : lexicons) {
    auto& count = counts[lex.name];
    for (const auto& term : lex.terms) {
      if (const auto it = tf.find(term); it != tf.end()) count += it->second;
    }
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Gazetteer

void Gazetteer::add(const std::string& code, std::string_view alias) {
  if (!is_country_code(code)) {
    throw InvalidArgument("code", "'" + code + "' is not a two-letter uppercase code");
  }
  auto tokens = normalize_terms(alias);
  if (tokens.empty()) {
    throw InvalidArgument("aliases", "alias '" + std::string(alias) + "' has no tokens");
  }
  const auto [it, inserted] = aliases_.emplace(tokens, code);
  if (!inserted && it->second != code) {
    throw InvalidArgument("aliases", "alias '" + std::string(alias) + "' maps to both " +
                                         it->second + " and " + code);
  }
  longest_ = std::max(longest_, tokens.size());
}

Gazetteer parse_gazetteer(std::string_view contents) {
  Gazetteer gazetteer;
  for_each_record(contents, [&](const nlohmann::json& obj, std::size_t line) {
    const auto code = string_field(obj, "code", line);
    try {
      for (const auto& alias : string_array(obj, "aliases", line)) gazetteer.add(code, alias);
    } catch (const InvalidArgument& e) {
      throw ParseError(line, e.parameter(), e.what());
    }
  });
  return gazetteer;
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
  return parse_gazetteer(read_file(path, "gazetteer"));
}

std::set<std::string> detect_studied_countries(std::string_view text,
                                               const Gazetteer& gazetteer) {
  std::set<std::string> found;
  if (gazetteer.empty()) return found;
  const auto tokens = normalize_terms(text);
  const auto& aliases = gazetteer.aliases();
  std::vector<std::string> window;
  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(gazetteer.longest_alias(), tokens.size() - i); len > 0;
         --len) {
      window.assign(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                    tokens.begin() + static_cast<std::ptrdiff_t>(i + len));
      if (const auto it = aliases.find(window); it != aliases.end()) {
        found.insert(it->second);
        matched = len;
        break;
      }
    }
    i += matched == 0 ? 1 : matched;
  }
  return found;
}

}  // namespace biblionet
