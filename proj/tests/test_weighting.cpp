#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "vardf/weighting.hpp"

using vardf::position;
using vardf::term_statistics_index;

TEST_CASE("varwt is documents over distinct terms, zero when unoccupied") {
  auto index = testsup::index_of(testsup::parse_fixture_corpus());
  CHECK_THAT(vardf::varwt(index, position::title),
             Catch::Matchers::WithinAbs(0.6, 1e-12));
  CHECK_THAT(vardf::varwt(index, position::heading),
             Catch::Matchers::WithinAbs(1.5, 1e-12));
  CHECK_THAT(vardf::varwt(index, position::paragraph),
             Catch::Matchers::WithinAbs(0.15, 1e-12));
  CHECK(vardf::varwt(index, position::meta_keywords) == 0.0);
  CHECK(vardf::varwt(term_statistics_index{}, position::title) == 0.0);
}

TEST_CASE("the fixture weight of 'web' is 3.75 with its position breakdown") {
  auto index = testsup::index_of(testsup::parse_fixture_corpus());
  auto w = vardf::vardf(index, "web");
  CHECK(w.term == "web");
  CHECK_THAT(w.weight, Catch::Matchers::WithinAbs(3.75, 1e-9));
  REQUIRE(w.breakdown.size() == 3);
  CHECK_THAT(w.breakdown.at(position::title),
             Catch::Matchers::WithinAbs(1.8, 1e-12));
  CHECK_THAT(w.breakdown.at(position::heading),
             Catch::Matchers::WithinAbs(1.5, 1e-12));
  CHECK_THAT(w.breakdown.at(position::paragraph),
             Catch::Matchers::WithinAbs(0.45, 1e-12));
}

TEST_CASE("unknown terms weigh zero") {
  auto index = testsup::index_of(testsup::parse_fixture_corpus());
  auto w = vardf::vardf(index, "nope");
  CHECK(w.weight == 0.0);
  CHECK(w.breakdown.empty());
}

TEST_CASE("weights match the brute-force recomputation on random documents") {
  std::mt19937 rng(99);
  auto vocab = testsup::make_vocab(30, "t");
  for (int round = 0; round < 50; ++round) {
    std::vector<vardf::parsed_document> docs;
    std::uniform_int_distribution<int> doc_count(1, 15);
    int count = doc_count(rng);
    for (int d = 0; d < count; ++d) {
      docs.push_back(
          testsup::make_random_parsed_doc(rng, "doc" + std::to_string(d), vocab));
    }
    auto index = testsup::index_of(docs);
    for (const auto& term : vocab) {
      double expected = testsup::reference_vardf(docs, term);
      double got = vardf::vardf(index, term).weight;
      INFO("round " << round << " term " << term);
      CHECK_THAT(got, Catch::Matchers::WithinAbs(expected, 1e-9));
    }
  }
}

TEST_CASE("ranking is weight-descending with ascending term tie-break") {
  auto index = testsup::index_of(testsup::parse_fixture_corpus());
  auto ranked = vardf::rank_terms(index);
  REQUIRE_FALSE(ranked.empty());
  CHECK(ranked.front().term == "web");  // 3.75 dominates the fixture
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    bool ordered = ranked[i - 1].weight > ranked[i].weight ||
                   (ranked[i - 1].weight == ranked[i].weight &&
                    ranked[i - 1].term < ranked[i].term);
    CHECK(ordered);
  }
}

TEST_CASE("equal weights order alphabetically") {
  vardf::parsed_document doc;
  doc.doc_id = "a";
  doc.occurrences["zulu"][position::title] = 1;
  doc.occurrences["alpha"][position::title] = 1;
  term_statistics_index index;
  index.add_document(doc);

  auto ranked = vardf::rank_terms(index);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].term == "alpha");
  CHECK(ranked[1].term == "zulu");
  CHECK(ranked[0].weight == ranked[1].weight);
}

TEST_CASE("exclusions drop issued terms from the ranking") {
  auto index = testsup::index_of(testsup::parse_fixture_corpus());
  auto ranked = vardf::rank_terms(index, {"web", "hidden"});
  for (const auto& w : ranked) {
    CHECK(w.term != "web");
    CHECK(w.term != "hidden");
  }
}

TEST_CASE("weights CSV lists every position column") {
  vardf::parsed_document doc;
  doc.doc_id = "a";
  doc.occurrences["web"][position::title] = 1;
  term_statistics_index index;
  index.add_document(doc);

  std::ostringstream out;
  vardf::write_weights_csv(out, vardf::rank_terms(index));
  CHECK(out.str() ==
        "term,weight,title,meta_keywords,meta_description,heading,paragraph,alt\n"
        "web,1,1,0,0,0,0,0\n");
}
