#include "biblionet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "biblionet/error.hpp"
#include "utf8.hpp"

namespace biblionet {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::seed: return "seed";
    case Origin::cited: return "cited";
    case Origin::citing: return "citing";
    case Origin::external: return "external";
  }
  return "seed";
}

std::optional<Origin> parse_origin(std::string_view name) {
  if (name == "seed") return Origin::seed;
  if (name == "cited") return Origin::cited;
  if (name == "citing") return Origin::citing;
  if (name == "external") return Origin::external;
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> normalize_keywords(const std::vector<std::string>& keywords) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& raw : keywords) {
    std::string kw = utf8::to_lower(trim(raw));
    if (kw.empty()) continue;
    if (seen.insert(kw).second) out.push_back(std::move(kw));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(std::vector<PaperRecord> papers) {
  for (auto& paper : papers) {
    if (papers_.count(paper.id)) throw InvalidArgument("id", "duplicate id '" + paper.id + "'");
    std::string id = paper.id;
    papers_.emplace(std::move(id), std::move(paper));
  }
  rebuild_indexes();
}

void Corpus::rebuild_indexes() {
  keyword_index_.clear();
  year_index_.clear();
  for (const auto& [id, paper] : papers_) {
    for (const auto& kw : paper.keywords) keyword_index_[kw].insert(id);
    year_index_[paper.year].insert(id);
  }
}

const PaperRecord* Corpus::find(const std::string& id) const {
  const auto it = papers_.find(id);
  return it == papers_.end() ? nullptr : &it->second;
}

std::optional<int> Corpus::min_year() const {
  if (year_index_.empty()) return std::nullopt;
  return year_index_.begin()->first;
}

std::optional<int> Corpus::max_year() const {
  if (year_index_.empty()) return std::nullopt;
  return year_index_.rbegin()->first;
}

bool Corpus::indexes_consistent() const {
  KeywordIndex keywords;
  YearIndex years;
  for (const auto& [id, paper] : papers_) {
    for (const auto& kw : paper.keywords) keywords[kw].insert(id);
    years[paper.year].insert(id);
  }
  return keywords == keyword_index_ && years == year_index_;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

constexpr std::string_view kFields[] = {"id",      "title",    "year", "lang", "affiliations",
                                        "studied", "keywords", "text", "refs", "origin"};

std::string required_string(const nlohmann::json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(line, field, "missing required field");
  if (!it->is_string()) throw ParseError(line, field, "expected string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const nlohmann::json& obj, const char* field,
                                     std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_array()) throw ParseError(line, field, "expected array of strings");
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& item : *it) {
    if (!item.is_string()) throw ParseError(line, field, "expected array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

PaperRecord parse_record(std::string_view json_line, std::size_t line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line, "", std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line, "", "record must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(std::begin(kFields), std::end(kFields), key) == std::end(kFields)) {
      throw ParseError(line, key, "unknown field");
    }
  }

  PaperRecord rec;
  rec.id = required_string(obj, "id", line);
  rec.title = required_string(obj, "title", line);

  const auto year = obj.find("year");
  if (year == obj.end()) throw ParseError(line, "year", "missing required field");
  if (!year->is_number_integer()) throw ParseError(line, "year", "expected integer");
  const auto y = year->get<std::int64_t>();
  if (y < std::numeric_limits<int>::min() || y > std::numeric_limits<int>::max()) {
    throw ParseError(line, "year", "integer out of range");
  }
  rec.year = static_cast<int>(y);

  if (const auto lang = obj.find("lang"); lang != obj.end() && !lang->is_null()) {
    if (!lang->is_string()) throw ParseError(line, "lang", "expected string");
    rec.lang = lang->get<std::string>();
  }
  rec.affiliations = string_list(obj, "affiliations", line);
  rec.studied = string_list(obj, "studied", line);
  rec.keywords = normalize_keywords(string_list(obj, "keywords", line));
  if (const auto text = obj.find("text"); text != obj.end() && !text->is_null()) {
    if (!text->is_string()) throw ParseError(line, "text", "expected string or null");
    rec.text = text->get<std::string>();
  }
  rec.refs = string_list(obj, "refs", line);
  if (const auto origin = obj.find("origin"); origin != obj.end() && !origin->is_null()) {
    if (!origin->is_string()) throw ParseError(line, "origin", "expected string");
    const auto parsed = parse_origin(origin->get<std::string>());
    if (!parsed) {
      throw ParseError(line, "origin", "expected one of seed, cited, citing, external");
    }
    rec.origin = *parsed;
  }
  return rec;
}

std::string serialize_record(const PaperRecord& record) {
  ordered_json obj;
  obj["id"] = record.id;
  obj["title"] = record.title;
  obj["year"] = record.year;
  obj["lang"] = record.lang;
  obj["affiliations"] = record.affiliations;
  obj["studied"] = record.studied;
  obj["keywords"] = record.keywords;
  obj["text"] = record.text ? ordered_json(*record.text) : ordered_json(nullptr);
  obj["refs"] = record.refs;
  obj["origin"] = std::string(to_string(record.origin));
  return obj.dump();
}

Corpus read_corpus(std::istream& in) {
  std::vector<PaperRecord> records;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    auto rec = parse_record(text, line);
    const auto [it, inserted] = first_line.emplace(rec.id, line);
    if (!inserted) {
      throw ParseError(line, "id",
                       "duplicate id '" + rec.id + "' (first seen on line " +
                           std::to_string(it->second) + ")");
    }
    records.push_back(std::move(rec));
  }
  if (in.bad()) throw Error("read error");
  return Corpus(std::move(records));
}

Corpus parse_corpus(std::string_view contents) {
  std::istringstream in{std::string(contents)};
  return read_corpus(in);
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file '" + path.string() + "'");
  return read_corpus(in);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& [id, paper] : corpus.papers()) {
    out += serialize_record(paper);
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write corpus file '" + path.string() + "'");
  out << serialize_corpus(corpus);
  if (!out) throw Error("write error on '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Validation

bool is_country_code(std::string_view code) {
  return code.size() == 2 && code[0] >= 'A' && code[0] <= 'Z' && code[1] >= 'A' &&
         code[1] <= 'Z';
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
  std::vector<Violation> report;
  for (const auto& [id, paper] : corpus.papers()) {
    if (paper.id.empty()) report.push_back({id, std::string(rules::id_nonempty), "empty id"});
    if (paper.year < kMinYear || paper.year > kMaxYear) {
      report.push_back({id, std::string(rules::year_range),
                        "year " + std::to_string(paper.year) + " outside [1900, 2100]"});
    }
    for (const auto* list : {&paper.affiliations, &paper.studied}) {
      const char* role = list == &paper.affiliations ? "affiliations" : "studied";
      for (const auto& code : *list) {
        if (!is_country_code(code)) {
          report.push_back({id, std::string(rules::country_code),
                            std::string(role) + ": '" + code + "'"});
        }
      }
    }
    if (normalize_keywords(paper.keywords) != paper.keywords) {
      report.push_back({id, std::string(rules::keywords_normalized),
                        "keywords not lowercase, trimmed and unique"});
    }
  }
  std::sort(report.begin(), report.end());
  return report;
}

Corpus drop_invalid(const Corpus& corpus, const std::vector<Violation>& report) {
  std::set<std::string> bad;
  for (const auto& v : report) bad.insert(v.id);
  std::vector<PaperRecord> kept;
  for (const auto& [id, paper] : corpus.papers()) {
    if (!bad.count(id)) kept.push_back(paper);
  }
  return Corpus(std::move(kept));
}

// ---------------------------------------------------------------------------
// Period filter

void PeriodFilter::check() const {
  if (from_year > to_year) {
    throw InvalidArgument("period", "from_year " + std::to_string(from_year) +
                                        " is after to_year " + std::to_string(to_year));
  }
}

Corpus filter_period(const Corpus& corpus, const PeriodFilter& period) {
  period.check();
  std::vector<PaperRecord> kept;
  const auto& years = corpus.year_index();
  for (auto it = years.lower_bound(period.from_year);
       it != years.end() && it->first <= period.to_year; ++it) {
    for (const auto& id : it->second) kept.push_back(*corpus.find(id));
  }
  return Corpus(std::move(kept));
}

// ---------------------------------------------------------------------------
// Citation relations

CitationNeighborhood citation_neighborhood(const Corpus& corpus,
                                           const std::set<std::string>& seed_ids) {
  for (const auto& id : seed_ids) {
    if (!corpus.contains(id)) throw InvalidArgument("seed_ids", "unknown seed id '" + id + "'");
  }
  CitationNeighborhood out;
  std::unordered_set<std::string> seed_refs;
  for (const auto& id : seed_ids) {
    for (const auto& ref : corpus.find(id)->refs) {
      seed_refs.insert(ref);
      if (corpus.contains(ref) && !seed_ids.count(ref)) out.cited.insert(ref);
    }
  }
  for (const auto& [id, paper] : corpus.papers()) {
    if (seed_ids.count(id)) continue;
    for (const auto& ref : paper.refs) {
      if (seed_ids.count(ref)) out.citing.insert(id);
      if (seed_refs.count(ref)) out.coupled.insert(id);
    }
  }
  return out;
}

std::vector<CouplingLink> coupling_links(const Corpus& corpus) {
  // Papers are visited in id order, so each posting list is sorted.
  std::unordered_map<std::string, std::vector<std::uint32_t>> citing_papers;
  std::vector<const std::string*> ids;
  ids.reserve(corpus.size());
  for (const auto& [id, paper] : corpus.papers()) {
    const auto index = static_cast<std::uint32_t>(ids.size());
    ids.push_back(&id);
    std::vector<std::string_view> refs(paper.refs.begin(), paper.refs.end());
    std::sort(refs.begin(), refs.end());
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    for (const auto ref : refs) citing_papers[std::string(ref)].push_back(index);
  }

  std::vector<std::uint64_t> pairs;
  for (const auto& [ref, papers] : citing_papers) {
    for (std::size_t i = 0; i < papers.size(); ++i) {
      for (std::size_t j = i + 1; j < papers.size(); ++j) {
        pairs.push_back((std::uint64_t{papers[i]} << 32) | papers[j]);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<CouplingLink> links;
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    links.push_back({*ids[pairs[i] >> 32], *ids[pairs[i] & 0xFFFFFFFFu], j - i});
    i = j;
  }
  return links;
}

}  // namespace biblionet
