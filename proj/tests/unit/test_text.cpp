#include <cmath>
#include <random>

#include "doctest.h"

#include "biblionet/error.hpp"
#include "biblionet/text.hpp"
#include "helpers.hpp"

using namespace biblionet;
using Tokens = std::vector<std::string>;

namespace {

std::string join(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

std::string upper_ascii(std::string s) {
  for (auto& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

}  // namespace

TEST_SUITE("text.tokenize") {
  TEST_CASE("empty text") { CHECK(tokenize("", "en").empty()); }

  TEST_CASE("english lowercasing, punctuation and stopwords") {
    CHECK(tokenize("The urban, URBAN growth!", "en") == Tokens{"urban", "urban", "growth"});
  }

  TEST_CASE("french folding and stopwords") {
    CHECK(tokenize("modèles spatiaux des villes", "fr") == Tokens{"modeles", "spatiaux", "villes"});
  }

  TEST_CASE("short and numeric tokens are dropped") {
    CHECK(tokenize("a 1999 b2 x y 42 3d", "en") == Tokens{"b2", "3d"});
  }

  TEST_CASE("apostrophes and dashes separate tokens") {
    CHECK(tokenize("l'espace géographique—cross-border", "fr") ==
          Tokens{"espace", "geographique", "cross", "border"});
  }

  TEST_CASE("ligatures, eszett and uppercase accents fold") {
    CHECK(tokenize("ŒUVRE Straße ÉLÈVE Æther", "xx") == Tokens{"oeuvre", "strasse", "eleve", "aether"});
  }

  TEST_CASE("combining marks are removed") {
    CHECK(tokenize("Cafe\xCC\x81 noe\xCC\x88l", "xx") == Tokens{"cafe", "noel"});
  }

  TEST_CASE("unknown language keeps stopwords") {
    CHECK(tokenize("the city", "de") == Tokens{"the", "city"});
    CHECK(stopwords("de").empty());
    CHECK(stopwords("en").count("the"));
    CHECK(stopwords("fr").count("des"));
  }

  TEST_CASE("non-Latin scripts are kept as words") {
    CHECK(tokenize("Москва — город", "xx") == Tokens{"москва", "город"});
  }

  TEST_CASE("invalid UTF-8 acts as a separator") {
    CHECK(tokenize("urban\xFF\xFEgrowth", "en") == Tokens{"urban", "growth"});
  }

  TEST_CASE("idempotent on its own output") {
    const std::vector<std::pair<std::string, std::string>> samples = {
        {"The urban, URBAN growth! Les modèles spatiaux des villes.", "en"},
        {"L'analyse des réseaux de co-occurrence — thèmes, 2015.", "fr"},
        {"Straße ŒUVRE Москва x 12 ab", "xx"},
    };
    for (const auto& [text, lang] : samples) {
      const auto once = tokenize(text, lang);
      CHECK(tokenize(join(once), lang) == once);
    }
  }

  TEST_CASE("normalize_terms keeps stopwords") {
    CHECK(normalize_terms("The Netherlands") == Tokens{"the", "netherlands"});
  }
}

TEST_SUITE("text.tfidf") {
  TEST_CASE("term in every document is omitted") {
    const auto v = vectorize_tfidf({"city", "risk"}, {{"city", 4}, {"risk", 1}}, 4);
    CHECK(v.size() == 1);
    CHECK(v["city"] == 0.0);
    CHECK(v.entries().count("city") == 0);
  }

  TEST_CASE("tf 3, df 1, 4 documents") {
    const auto v = vectorize_tfidf({"risk", "risk", "risk"}, {{"risk", 1}}, 4);
    CHECK(v["risk"] == doctest::Approx(4.1589).epsilon(1e-4));
    CHECK(v["risk"] == 3.0 * std::log(4.0));
    CHECK(v.mode() == TermVector::Mode::tfidf);
  }

  TEST_CASE("empty token list") {
    CHECK(vectorize_tfidf({}, {}, 3).empty());
  }

  TEST_CASE("precondition violations") {
    CHECK_THROWS_AS(vectorize_tfidf({"x"}, {}, 3), InvalidArgument);
    CHECK_THROWS_AS(vectorize_tfidf({"x"}, {{"x", 0}}, 3), InvalidArgument);
    CHECK_THROWS_AS(vectorize_tfidf({"x"}, {{"x", 4}}, 3), InvalidArgument);
    CHECK_THROWS_AS(vectorize_tfidf({}, {}, 0), InvalidArgument);
  }

  TEST_CASE("weights are non-negative and scale with tf") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 50; ++round) {
      const std::uint64_t n_docs = 1 + rng() % 20;
      std::map<std::string, std::uint64_t> df;
      Tokens doc;
      for (int t = 0; t < 6; ++t) {
        const std::string term = "t" + std::to_string(t);
        df[term] = 1 + rng() % n_docs;
        const auto tf = rng() % 4;
        for (std::uint64_t i = 0; i < tf; ++i) doc.push_back(term);
      }
      const auto base = vectorize_tfidf(doc, df, n_docs);
      for (const auto& [term, w] : base.entries()) CHECK(w > 0.0);
      for (const std::uint64_t c : {2, 3, 4, 7, 8}) {
        Tokens scaled;
        for (std::uint64_t i = 0; i < c; ++i) scaled.insert(scaled.end(), doc.begin(), doc.end());
        const auto v = vectorize_tfidf(scaled, df, n_docs);
        REQUIRE(v.size() == base.size());
        for (const auto& [term, w] : base.entries()) {
          const double want = static_cast<double>(c) * w;
          if ((c & (c - 1)) == 0) {
            CHECK(v[term] == want);  // power of two: exact in binary floating point
          } else {
            CHECK(v[term] == doctest::Approx(want).epsilon(1e-15));
          }
        }
      }
    }
  }

  TEST_CASE("term counts") {
    const auto v = term_counts({"a1", "b1", "a1"});
    CHECK(v["a1"] == 2.0);
    CHECK(v["b1"] == 1.0);
    CHECK(v["zz"] == 0.0);
    TermVector w;
    w.add("x", 2.0);
    w.add("x", -2.0);
    CHECK(w.empty());
  }
}

TEST_SUITE("text.lexicon") {
  const auto risk = make_lexicon("risk", {"risk", "hazard"});

  TEST_CASE("counts with multiplicity") {
    CHECK(lexicon_counts({"risk", "hazard", "risk"}, {risk}) == std::map<std::string, std::uint64_t>{{"risk", 3}});
  }

  TEST_CASE("disjoint tokens give zero") {
    CHECK(lexicon_counts({"city", "urban"}, {risk}).at("risk") == 0);
  }

  TEST_CASE("random 200-token fixture matches a per-token scan") {
    std::mt19937_64 rng(17);
    const auto a = make_lexicon("a", {"w0", "w1", "w2", "w3"});
    const auto b = make_lexicon("b", {"w4", "w5", "w9"});
    for (int round = 0; round < 20; ++round) {
      Tokens tokens;
      for (int i = 0; i < 200; ++i) tokens.push_back("w" + std::to_string(rng() % 12));
      std::uint64_t want_a = 0, want_b = 0;
      for (const auto& t : tokens) {
        want_a += a.terms.count(t);
        want_b += b.terms.count(t);
      }
      const auto got = lexicon_counts(tokens, {a, b});
      CHECK(got.at("a") == want_a);
      CHECK(got.at("b") == want_b);
    }
  }

  TEST_CASE("a vocabulary partition sums to the token count") {
    Tokens tokens;
    std::mt19937_64 rng(2);
    for (int i = 0; i < 300; ++i) tokens.push_back("v" + std::to_string(rng() % 9));
    const auto low = make_lexicon("low", {"v0", "v1", "v2"});
    const auto mid = make_lexicon("mid", {"v3", "v4", "v5"});
    const auto high = make_lexicon("high", {"v6", "v7", "v8"});
    std::uint64_t sum = 0;
    for (const auto& [name, c] : lexicon_counts(tokens, {low, mid, high})) sum += c;
    CHECK(sum == tokens.size());
  }

  TEST_CASE("lexicon construction rules") {
    CHECK(make_lexicon("r", {"Risque", "RISQUE", "Hazard"}).terms == std::set<std::string>{"hazard", "risque"});
    CHECK_THROWS_AS(make_lexicon("", {"risk"}), InvalidArgument);
    CHECK_THROWS_AS(make_lexicon("r", {}), InvalidArgument);
    CHECK_THROWS_AS(make_lexicon("r", {"two words"}), InvalidArgument);
    CHECK_THROWS_AS(lexicon_counts({}, {risk, risk}), InvalidArgument);
  }

  TEST_CASE("lexicon file parsing") {
    const auto lex = parse_lexicons(R"({"name":"risk","terms":["Risk","hazard"]})"
                                    "\n\n"
                                    R"({"name":"border","terms":["border"]})");
    REQUIRE(lex.size() == 2);
    CHECK(lex[0].name == "risk");
    CHECK(lex[1].terms == std::set<std::string>{"border"});
    CHECK_THROWS_AS(parse_lexicons(R"({"name":"a","terms":["x1"]})"
                                   "\n"
                                   R"({"name":"a","terms":["y1"]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_lexicons(R"({"name":"a"})"), ParseError);
  }

  TEST_CASE("bundled example lexicons load") {
    const auto lex = load_lexicons(std::string(BIBLIONET_DATA_DIR) + "/examples/lexicons.jsonl");
    CHECK(lex.size() >= 2);
  }
}

TEST_SUITE("text.gazetteer") {
  Gazetteer make_gazetteer() {
    Gazetteer g;
    g.add("FR", "France");
    g.add("DE", "Germany");
    g.add("NZ", "New Zealand");
    g.add("NZ", "Zealand");
    g.add("US", "United States");
    g.add("GB", "United Kingdom");
    g.add("CI", "Côte d'Ivoire");
    return g;
  }

  TEST_CASE("exact alias hits") {
    CHECK(detect_studied_countries("comparing France and Germany", make_gazetteer()) ==
          std::set<std::string>{"DE", "FR"});
  }

  TEST_CASE("longest match wins and is counted once") {
    CHECK(detect_studied_countries("New Zealand policy", make_gazetteer()) == std::set<std::string>{"NZ"});
  }

  TEST_CASE("multi-token aliases with folding and punctuation") {
    CHECK(detect_studied_countries("Cote d’Ivoire, the UNITED kingdom.", make_gazetteer()) ==
          std::set<std::string>{"CI", "GB"});
    CHECK(detect_studied_countries("united nations", make_gazetteer()).empty());
  }

  TEST_CASE("empty gazetteer or text") {
    CHECK(detect_studied_countries("France", Gazetteer{}).empty());
    CHECK(detect_studied_countries("", make_gazetteer()).empty());
  }

  TEST_CASE("construction rules") {
    Gazetteer g;
    CHECK_THROWS_AS(g.add("fr", "France"), InvalidArgument);
    CHECK_THROWS_AS(g.add("FR", "!!"), InvalidArgument);
    g.add("FR", "France");
    g.add("FR", "FRANCE");
    CHECK_THROWS_AS(g.add("DE", "france"), InvalidArgument);
    CHECK(g.longest_alias() == 1);
  }

  TEST_CASE("50-sentence fixture matches the all-window oracle") {
    const auto g = make_gazetteer();
    const Tokens filler = {"the",   "study", "of",     "urban", "growth",  "in",   "new",
                           "model", "and",   "united", "river", "policy",  "land", "border"};
    const Tokens planted = {"France", "Germany", "New Zealand", "Zealand", "United States", "Côte d'Ivoire"};
    std::mt19937_64 rng(23);
    for (int s = 0; s < 50; ++s) {
      std::string sentence;
      const int words = 4 + static_cast<int>(rng() % 10);
      for (int w = 0; w < words; ++w) sentence += filler[rng() % filler.size()] + " ";
      sentence += planted[static_cast<std::size_t>(s) % planted.size()] + " ";
      for (int w = 0; w < 3; ++w) sentence += filler[rng() % filler.size()] + " ";
      const auto want = oracle::all_window_aliases(normalize_terms(sentence), g.aliases());
      const auto got = detect_studied_countries(sentence, g);
      CHECK_MESSAGE(got == want, sentence);
      CHECK(detect_studied_countries(upper_ascii(sentence), g) == got);
    }
  }

  TEST_CASE("gazetteer file parsing") {
    const auto g = parse_gazetteer(R"({"code":"FR","aliases":["France","French"]})");
    CHECK(g.aliases().size() == 2);
    CHECK_THROWS_AS(parse_gazetteer(R"({"code":"France","aliases":["x"]})"), ParseError);
    const auto bundled = load_gazetteer(std::string(BIBLIONET_DATA_DIR) + "/examples/gazetteer.jsonl");
    CHECK(detect_studied_countries("Flooding in Brazil", bundled) == std::set<std::string>{"BR"});
  }
}
