#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"

#include "biblionet/corpus.hpp"
#include "biblionet/error.hpp"
#include "biblionet/fixtures.hpp"
#include "helpers.hpp"

using namespace biblionet;
using testing::paper;

namespace {

std::string line(const std::string& id, int year, const std::string& extra = "") {
  return R"({"id":")" + id + R"(","title":"t )" + id + R"(","year":)" + std::to_string(year) + extra + "}";
}

Corpus random_citation_corpus(std::mt19937_64& rng, std::size_t n, std::size_t n_ext_refs) {
  std::vector<PaperRecord> papers;
  for (std::size_t i = 0; i < n; ++i) papers.push_back(paper("P" + std::to_string(i), 2000));
  for (auto& p : papers) {
    const std::size_t count = rng() % 5;
    for (std::size_t r = 0; r < count; ++r) {
      if (rng() % 2 == 0) {
        p.refs.push_back("P" + std::to_string(rng() % n));
      } else {
        p.refs.push_back("R" + std::to_string(rng() % n_ext_refs));
      }
    }
  }
  return Corpus(std::move(papers));
}

}  // namespace

TEST_SUITE("corpus.load") {
  TEST_CASE("empty input yields an empty corpus") {
    const auto c = parse_corpus("");
    CHECK(c.size() == 0);
    CHECK(c.empty());
    CHECK_FALSE(c.min_year().has_value());
  }

  TEST_CASE("two records with their keyword index") {
    const auto c = parse_corpus(line("P1", 2000, R"(,"keywords":["risk","city"])") + "\n" +
                                line("P2", 2001, R"(,"keywords":["risk"])") + "\n");
    REQUIRE(c.size() == 2);
    CHECK(c.keyword_index().at("risk") == std::set<std::string>{"P1", "P2"});
    CHECK(c.keyword_index().at("city") == std::set<std::string>{"P1"});
    CHECK(c.year_index().at(2001) == std::set<std::string>{"P2"});
    CHECK(c.indexes_consistent());
  }

  TEST_CASE("duplicate id names the later line") {
    const std::string text = line("P1", 2000) + "\n" + line("P2", 2000) + "\n" + line("P1", 2001) + "\n";
    try {
      parse_corpus(text);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.field() == "id");
    }
  }

  TEST_CASE("malformed lines name the line and field") {
    auto expect = [](const std::string& text, std::size_t want_line, const std::string& want_field) {
      try {
        parse_corpus(text);
        FAIL("expected ParseError for " << text);
      } catch (const ParseError& e) {
        CHECK(e.line() == want_line);
        CHECK(e.field() == want_field);
      }
    };
    expect(line("P1", 2000) + "\n{not json\n", 2, "");
    expect(R"({"id":"P1","year":2000})", 1, "title");
    expect(R"({"id":"P1","title":"x","year":"2000"})", 1, "year");
    expect(R"({"id":"P1","title":"x","year":2000,"keywords":"risk"})", 1, "keywords");
    expect(R"({"id":"P1","title":"x","year":2000,"keywords":[1]})", 1, "keywords");
    expect(R"({"id":"P1","title":"x","year":2000,"origin":"friend"})", 1, "origin");
    expect(R"({"id":"P1","title":"x","year":2000,"colour":"red"})", 1, "colour");
    expect(R"([1,2])", 1, "");
  }

  TEST_CASE("optional fields take their defaults") {
    const auto c = parse_corpus(line("P1", 2000));
    const auto& p = c.papers().at("P1");
    CHECK(p.lang == "en");
    CHECK(p.affiliations.empty());
    CHECK(p.studied.empty());
    CHECK(p.keywords.empty());
    CHECK_FALSE(p.text.has_value());
    CHECK(p.refs.empty());
    CHECK(p.origin == Origin::seed);
  }

  TEST_CASE("blank lines are skipped but still counted for line numbers") {
    const std::string text = "\n" + line("P1", 2000) + "\n   \n" + line("P1", 2000) + "\n";
    try {
      parse_corpus(text);
      FAIL("expected duplicate");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
    CHECK(parse_corpus("\n\n" + line("P1", 2000) + "\n\n").size() == 1);
  }

  TEST_CASE("keywords are normalized at ingest") {
    const auto c = parse_corpus(line("P1", 2000, R"(,"keywords":["  Risk ","RISK","Ville","ÉTAT",""])"));
    CHECK(c.papers().at("P1").keywords == std::vector<std::string>{"risk", "ville", "état"});
  }

  TEST_CASE("unreadable file") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/dir/corpus.jsonl"), Error);
  }

  TEST_CASE("constructor rejects duplicate ids") {
    CHECK_THROWS_AS(Corpus({paper("A", 2000), paper("A", 2001)}), InvalidArgument);
  }
}

TEST_SUITE("corpus.roundtrip") {
  TEST_CASE("load, serialize, load is the identity on papers") {
    const auto original = micro_corpus();
    const auto again = parse_corpus(serialize_corpus(original));
    CHECK(again.papers() == original.papers());
    CHECK(serialize_corpus(again) == serialize_corpus(original));
  }

  TEST_CASE("round trip through a file on random planted corpora") {
    testing::TempDir dir("corpus");
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SyntheticSpec spec;
      spec.seed = seed;
      spec.p_seed = 0.5;
      const auto c = generate_planted(spec).corpus;
      write_corpus(c, dir / "c.jsonl");
      CHECK(load_corpus(dir / "c.jsonl").papers() == c.papers());
    }
  }

  TEST_CASE("non-ASCII text and control characters survive") {
    auto p = paper("P1", 2000);
    p.text = "Géographie \"quantitative\"\tà Paris\n";
    p.title = "Ville — 城市";
    const Corpus c({p});
    CHECK(parse_corpus(serialize_corpus(c)).papers() == c.papers());
  }
}

TEST_SUITE("corpus.validate") {
  TEST_CASE("valid corpus has an empty report") {
    CHECK(validate_corpus(micro_corpus()).empty());
  }

  TEST_CASE("year out of range") {
    const auto report = validate_corpus(Corpus({paper("P1", 2000), paper("P2", 1776)}));
    REQUIRE(report.size() == 1);
    CHECK(report[0].id == "P2");
    CHECK(report[0].rule == "year_range");
  }

  TEST_CASE("bad country code") {
    auto p = paper("P1", 2000);
    p.affiliations = {"France"};
    const auto report = validate_corpus(Corpus({p}));
    REQUIRE(report.size() == 1);
    CHECK(report[0].rule == "country_code");
  }

  TEST_CASE("several rules, ordered by id then rule") {
    auto a = paper("B", 3000);
    a.studied = {"fr"};
    a.keywords = {"Risk"};
    auto b = paper("A", 1800);
    auto c = paper("", 2000);
    const auto report = validate_corpus(Corpus({a, b, c}));
    REQUIRE(report.size() == 5);
    CHECK(report[0].id == "");
    CHECK(report[0].rule == "id_nonempty");
    CHECK(report[1].id == "A");
    CHECK(report[2].rule == "country_code");
    CHECK(report[3].rule == "keywords_normalized");
    CHECK(report[4].rule == "year_range");
    CHECK(std::is_sorted(report.begin(), report.end()));
  }

  TEST_CASE("drop_invalid removes exactly the reported records") {
    const Corpus c({paper("P1", 2000), paper("P2", 1776), paper("P3", 2001)});
    const auto kept = drop_invalid(c, validate_corpus(c));
    CHECK(kept.size() == 2);
    CHECK_FALSE(kept.contains("P2"));
    CHECK(validate_corpus(kept).empty());
  }

  TEST_CASE("country code shape") {
    CHECK(is_country_code("FR"));
    CHECK_FALSE(is_country_code("fr"));
    CHECK_FALSE(is_country_code("FRA"));
    CHECK_FALSE(is_country_code("F"));
    CHECK_FALSE(is_country_code("F1"));
  }
}

TEST_SUITE("corpus.period") {
  const Corpus years({paper("A", 1999), paper("B", 2000), paper("C", 2005), paper("D", 2012)});

  TEST_CASE("single-year period is inclusive") {
    const auto v = filter_period(Corpus({paper("A", 2000)}), {2000, 2000});
    CHECK(v.size() == 1);
  }

  TEST_CASE("period before all papers is empty") {
    CHECK(filter_period(years, {1990, 1995}).empty());
  }

  TEST_CASE("[2000,2005] keeps exactly the 2000 and 2005 papers") {
    const auto v = filter_period(years, {2000, 2005});
    std::vector<std::string> ids;
    for (const auto& [id, p] : v.papers()) ids.push_back(id);
    CHECK(ids == std::vector<std::string>{"B", "C"});
    CHECK(years.size() == 4);
    CHECK(v.indexes_consistent());
  }

  TEST_CASE("full range keeps everything") {
    CHECK(filter_period(years, {*years.min_year(), *years.max_year()}).papers() == years.papers());
  }

  TEST_CASE("reversed bounds are rejected") {
    CHECK_THROWS_AS(filter_period(years, {2005, 2000}), InvalidArgument);
    CHECK_THROWS_AS((PeriodFilter{2001, 2000}.check()), InvalidArgument);
  }
}

TEST_SUITE("corpus.citations") {
  TEST_CASE("cited, citing and coupled") {
    auto p1 = paper("P1", 2000);
    p1.refs = {"R1"};
    auto p2 = paper("P2", 2001);
    p2.refs = {"P1"};
    auto p3 = paper("P3", 2002);
    p3.refs = {"R1"};
    const auto n = citation_neighborhood(Corpus({p1, p2, p3}), {"P1"});
    CHECK(n.cited.empty());
    CHECK(n.citing == std::set<std::string>{"P2"});
    CHECK(n.coupled == std::set<std::string>{"P3"});
  }

  TEST_CASE("a referenced corpus record is cited") {
    auto p1 = paper("P1", 2000);
    p1.refs = {"P2"};
    const auto n = citation_neighborhood(Corpus({p1, paper("P2", 2001)}), {"P1"});
    CHECK(n.cited == std::set<std::string>{"P2"});
  }

  TEST_CASE("unknown seed id") {
    CHECK_THROWS_AS(citation_neighborhood(micro_corpus(), {"nope"}), InvalidArgument);
  }

  TEST_CASE("random corpora match the set-comprehension oracle") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 30; ++round) {
      const auto c = random_citation_corpus(rng, 10, 6);
      std::set<std::string> seeds;
      for (const auto& [id, p] : c.papers()) {
        if (rng() % 3 == 0) seeds.insert(id);
      }
      CitationNeighborhood want;
      for (const auto& [seed_id, seed] : c.papers()) {
        if (!seeds.count(seed_id)) continue;
        for (const auto& ref : seed.refs) {
          if (c.contains(ref) && !seeds.count(ref)) want.cited.insert(ref);
        }
        for (const auto& [id, p] : c.papers()) {
          if (seeds.count(id)) continue;
          for (const auto& ref : p.refs) {
            if (ref == seed_id) want.citing.insert(id);
            if (std::find(seed.refs.begin(), seed.refs.end(), ref) != seed.refs.end()) {
              want.coupled.insert(id);
            }
          }
        }
      }
      const auto got = citation_neighborhood(c, seeds);
      CHECK(got == want);
      for (const auto& s : seeds) {
        CHECK_FALSE(got.cited.count(s));
        CHECK_FALSE(got.citing.count(s));
        CHECK_FALSE(got.coupled.count(s));
      }
    }
  }

  TEST_CASE("coupling link from one shared reference") {
    auto p1 = paper("P1", 2000);
    p1.refs = {"R1", "R2"};
    auto p3 = paper("P3", 2000);
    p3.refs = {"R1"};
    const auto links = coupling_links(Corpus({p1, p3}));
    REQUIRE(links.size() == 1);
    CHECK(links[0] == CouplingLink{"P1", "P3", 1});
  }

  TEST_CASE("no shared references") {
    auto p1 = paper("P1", 2000);
    p1.refs = {"R1"};
    auto p2 = paper("P2", 2000);
    p2.refs = {"R2"};
    CHECK(coupling_links(Corpus({p1, p2})).empty());
    CHECK(coupling_links(Corpus()).empty());
  }

  TEST_CASE("repeated references count once") {
    auto p1 = paper("P1", 2000);
    p1.refs = {"R1", "R1", "R2"};
    auto p2 = paper("P2", 2000);
    p2.refs = {"R1", "R2", "R2"};
    const auto links = coupling_links(Corpus({p1, p2}));
    REQUIRE(links.size() == 1);
    CHECK(links[0].weight == 2);
  }

  TEST_CASE("random corpora match the pairwise intersection oracle and ignore input order") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 20; ++round) {
      const auto c = random_citation_corpus(rng, 20, 8);
      std::vector<CouplingLink> want;
      for (const auto& [a, pa] : c.papers()) {
        for (const auto& [b, pb] : c.papers()) {
          if (!(a < b)) continue;
          const std::set<std::string> ra(pa.refs.begin(), pa.refs.end());
          const std::set<std::string> rb(pb.refs.begin(), pb.refs.end());
          std::vector<std::string> common;
          std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(common));
          if (!common.empty()) want.push_back({a, b, common.size()});
        }
      }
      CHECK(coupling_links(c) == want);

      std::vector<PaperRecord> reversed;
      for (auto it = c.papers().rbegin(); it != c.papers().rend(); ++it) reversed.push_back(it->second);
      CHECK(coupling_links(Corpus(std::move(reversed))) == want);
    }
  }
}
