#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "entrel/ner.hpp"
#include "support.hpp"

using namespace entrel;

namespace {

EntityMention mention(const std::string& cat, const std::string& canonical, std::size_t s, std::size_t e) {
  EntityMention m;
  m.doc_id = "d";
  m.category = cat;
  m.canonical = canonical;
  m.surface = canonical;
  m.span = {s, e};
  return m;
}

}  // namespace

TEST_SUITE("ner") {
  TEST_CASE("crop page mentions") {
    const Dictionary p = load_dictionary(testsupport::source_path("resources/dicts/p.dic"), "p");
    const Dictionary m = load_dictionary(testsupport::source_path("resources/dicts/m.dic"), "m");
    const auto matcher = EntityMatcher::compile(std::vector<Dictionary>{p, m});
    const Document doc = ingest_file(testsupport::source_path("tests/fixtures/bsv/bsv_2011_03_15_centre.txt"));
    const auto ms = extract_entities(doc, matcher, nullptr);
    std::vector<std::pair<std::string, std::string>> first_six;
    for (std::size_t i = 0; i < 6 && i < ms.size(); ++i) first_six.emplace_back(ms[i].category, ms[i].surface);
    const std::vector<std::pair<std::string, std::string>> want = {
        {"p", "Blé"}, {"p", "blé"}, {"p", "orge de printemps"}, {"m", "piétin échaudage"}, {"p", "céréale"},
        {"m", "champignon"}};
    CHECK(first_six == want);
    CHECK(ms[0].canonical == "blé");
    for (const auto& x : ms) CHECK(x.text_unit == std::nullopt);
  }

  TEST_CASE("no hits") {
    const Dictionary p = parse_dictionary_text("blé:L:blé:\n", "p");
    const auto matcher = EntityMatcher::compile(std::span<const Dictionary>(&p, 1));
    CHECK(extract_entities(ingest_text("rien ici", "d"), matcher, nullptr).empty());
  }

  TEST_CASE("inclusion removal") {
    const auto out = resolve_overlaps({mention("p", "blé", 5, 5), mention("p", "blé dur", 5, 6)});
    REQUIRE(out.size() == 1);
    CHECK(out[0].canonical == "blé dur");
  }

  TEST_CASE("disjoint, partial and equal spans survive") {
    CHECK(resolve_overlaps({mention("p", "a", 0, 1), mention("p", "b", 3, 4)}).size() == 2);
    CHECK(resolve_overlaps({mention("p", "a", 0, 2), mention("m", "b", 2, 4)}).size() == 2);
    CHECK(resolve_overlaps({mention("p", "a", 0, 2), mention("c", "a", 0, 2)}).size() == 2);
    CHECK(resolve_overlaps({mention("p", "a", 0, 2), mention("p", "a", 0, 2)}).size() == 1);
  }

  TEST_CASE("resolution is order-insensitive and removes every strict inclusion") {
    std::mt19937 rng(4);
    for (int c = 0; c < 500; ++c) {
      std::vector<EntityMention> in;
      for (int i = 0, n = int(rng() % 12); i < n; ++i) {
        const std::size_t s = rng() % 20;
        in.push_back(mention(rng() % 2 ? "p" : "m", "c" + std::to_string(rng() % 3), s, s + rng() % 4));
      }
      auto a = resolve_overlaps(in);
      std::shuffle(in.begin(), in.end(), rng);
      auto b = resolve_overlaps(in);
      sort_mentions(a);
      sort_mentions(b);
      CHECK(a == b);
      for (const auto& x : a) {
        for (const auto& y : a) {
          CHECK_FALSE((y.span.start <= x.span.start && x.span.end <= y.span.end && y.length() > x.length()));
        }
      }
      // Every input mention is either kept or strictly inside a kept one.
      for (const auto& x : in) {
        const bool kept = std::find(a.begin(), a.end(), x) != a.end();
        const bool covered = std::any_of(a.begin(), a.end(), [&](const EntityMention& y) {
          return y.span.start <= x.span.start && x.span.end <= y.span.end && y.length() > x.length();
        });
        CHECK((kept || covered));
      }
    }
  }

  TEST_CASE("grammar mentions join dictionary mentions") {
    const Dictionary p = parse_dictionary_text("colza:L:colza:\n", "p");
    const auto matcher = EntityMatcher::compile(std::span<const Dictionary>(&p, 1));
    const GrammarSet gs = load_grammars({testsupport::source_path("resources/grammars/date.grm")});
    const auto ms = extract_entities(ingest_text("colza le 15 mars 2011", "d"), matcher, &gs);
    REQUIRE(ms.size() == 2);
    CHECK(ms[1].category == "date");
    CHECK(ms[1].source == MentionSource::kGrammar);
    CHECK(ms[1].canonical == "15 mars 2011");
  }

  TEST_CASE("csv and json round trips") {
    std::vector<EntityMention> ms = {mention("p", "blé, dur", 1, 2), mention("m", "piétin \"x\"", 4, 4)};
    ms[1].source = MentionSource::kGrammar;
    std::stringstream ss;
    write_mentions_csv(ss, ms);
    const auto back = read_mentions_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].canonical == "blé, dur");
    CHECK(back[1].surface == "piétin \"x\"");
    CHECK(back[1].source == MentionSource::kGrammar);
    CHECK(mention_from_json(to_json(ms[0])) == ms[0]);
  }
}
