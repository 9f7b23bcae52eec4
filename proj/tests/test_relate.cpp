#include <doctest.h>

#include <random>
#include <sstream>

#include "entrel/error.hpp"
#include "entrel/relate.hpp"
#include "support.hpp"

using namespace entrel;
using testsupport::pair_set;

namespace {

EntityMention at(const std::string& cat, const std::string& canonical, std::size_t w) {
  EntityMention m;
  m.doc_id = "d";
  m.category = cat;
  m.canonical = canonical;
  m.surface = canonical;
  m.span = {w, w};
  return m;
}

Document flat(std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) s += "w" + std::to_string(i) + " ";
  return ingest_text(s, "d");
}

CoocConfig window(WindowBound l, WindowBound r) {
  CoocConfig c;
  c.mode = CoocMode::kWindow;
  c.target_category = "T";
  c.partner_categories = {"P"};
  c.window_left = l;
  c.window_right = r;
  return c;
}

Document with_marker(std::size_t words, std::size_t marker_at) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) s += (i == marker_at ? std::string("contre") : "w") + " ";
  return ingest_text(s, "d");
}

}  // namespace

TEST_SUITE("relate") {
  TEST_CASE("crop section relations") {
    const auto p = load_dictionary(testsupport::source_path("resources/dicts/p.dic"), "p");
    const auto m = load_dictionary(testsupport::source_path("resources/dicts/m.dic"), "m");
    const auto matcher = EntityMatcher::compile(std::vector<Dictionary>{p, m});
    SegmentationConfig seg;
    seg.header_line_count = 4;
    seg.main_entity_category = "p";
    const Document doc =
        segment(ingest_file(testsupport::source_path("tests/fixtures/bsv/bsv_2011_03_15_centre.txt")), seg, matcher);
    CoocConfig cfg;
    cfg.target_category = "p";
    cfg.partner_categories = {"m"};
    const auto rels = extract_relations(doc, extract_entities(doc, matcher, nullptr), cfg);
    std::set<std::string> partners;
    for (const auto& r : rels) {
      CHECK(r.first.surface == "Blé");
      CHECK(r.relation_type == "p-m");
      partners.insert(r.second.canonical);
    }
    CHECK(partners == std::set<std::string>{"piétin échaudage", "champignon", "maladie"});
    CHECK(rels.size() == 3);
  }

  TEST_CASE("target alone gives nothing") {
    const Document d = flat(5);
    CHECK(cooc_text_unit(d, {at("T", "t", 1)}, window(0, 0)).empty());
    CHECK(extract_relations(d, {}, window(std::nullopt, std::nullopt)).empty());
  }

  TEST_CASE("window boundary") {
    const Document d = flat(20);
    CHECK(cooc_window(d, {at("T", "t", 10), at("P", "p", 13)}, window(0, 3)).size() == 1);
    CHECK(cooc_window(d, {at("T", "t", 10), at("P", "p", 14)}, window(0, 3)).empty());
    CHECK(cooc_window(d, {at("T", "t", 10), at("P", "p", 9)}, window(0, 3)).empty());
    CHECK(cooc_window(d, {at("T", "t", 10), at("P", "p", 9)}, window(1, 0)).size() == 1);
  }

  TEST_CASE("unbounded window pairs everything") {
    const Document d = flat(30);
    std::vector<EntityMention> ms = {at("T", "a", 0), at("T", "b", 29), at("P", "x", 5), at("P", "y", 17),
                                     at("Q", "z", 3)};
    CHECK(cooc_window(d, ms, window(std::nullopt, std::nullopt)).size() == 4);
  }

  TEST_CASE("window output grows with the window") {
    std::mt19937 rng(17);
    const std::vector<WindowBound> ladder = {0, 1, 2, 5, 10, std::nullopt};
    for (int c = 0; c < 100; ++c) {
      const auto rd = testsupport::random_document(rng, 150, 15);
      for (std::size_t i = 1; i < ladder.size(); ++i) {
        auto cfg = window(ladder[i - 1], ladder[i - 1]);
        cfg.partner_categories = {"P", "Q"};
        const auto small = pair_set(cooc_window(rd.doc, rd.mentions, cfg));
        cfg.window_left = cfg.window_right = ladder[i];
        const auto big = pair_set(cooc_window(rd.doc, rd.mentions, cfg));
        CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
      }
    }
  }

  TEST_CASE("marker between the mentions") {
    auto cfg = window(std::nullopt, std::nullopt);
    cfg.mode = CoocMode::kConstrained;
    cfg.constrained_scope = CoocMode::kWindow;
    cfg.markers = {"contre"};
    const std::vector<EntityMention> ms = {at("T", "t", 5), at("P", "p", 12)};
    CHECK(cooc_constrained(with_marker(25, 8), ms, cfg).size() == 1);
    CHECK(cooc_constrained(with_marker(25, 20), ms, cfg).empty());
    CHECK(marker_positions(with_marker(25, 8), {"contre"}) == std::vector<std::size_t>{8});
  }

  TEST_CASE("config validation") {
    CoocConfig c;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.target_category = "p";
    c.partner_categories = {"m"};
    CHECK_NOTHROW(c.validate());
    c.mode = CoocMode::kConstrained;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.markers = {"contre"};
    CHECK_NOTHROW(c.validate());
    c.constrained_scope = CoocMode::kConstrained;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(cooc_mode_from_string("text-unit") == CoocMode::kTextUnit);
    CHECK(cooc_mode_from_string("WINDOW") == CoocMode::kWindow);
    CHECK_THROWS_AS(cooc_mode_from_string("nope"), ConfigError);
  }

  TEST_CASE("scope properties on random documents") {
    std::mt19937 rng(23);
    for (int c = 0; c < 150; ++c) {
      const auto rd = testsupport::random_document(rng, 150, 15);
      CoocConfig cfg;
      cfg.target_category = "T";
      cfg.partner_categories = {"P", "Q"};
      cfg.markers = {"contre", "sur"};
      for (int h1 = 0; h1 < 2; ++h1) {
        cfg.h1 = h1;
        cfg.h3 = true;
        const auto on = pair_set(cooc_text_unit(rd.doc, rd.mentions, cfg));
        CHECK(on == testsupport::text_unit_oracle(rd.doc, rd.mentions, cfg));
        cfg.h3 = false;
        const auto off = pair_set(cooc_text_unit(rd.doc, rd.mentions, cfg));
        CHECK(off == testsupport::text_unit_oracle(rd.doc, rd.mentions, cfg));
        // Skipping avoid blocks only removes pairs.
        CHECK(std::includes(off.begin(), off.end(), on.begin(), on.end()));
        for (int scope = 0; scope < 2; ++scope) {
          auto cc = cfg;
          cc.mode = CoocMode::kConstrained;
          cc.constrained_scope = scope ? CoocMode::kWindow : CoocMode::kTextUnit;
          const auto base = pair_set(scope ? cooc_window(rd.doc, rd.mentions, cc) : cooc_text_unit(rd.doc, rd.mentions, cc));
          const auto con = pair_set(cooc_constrained(rd.doc, rd.mentions, cc));
          CHECK(std::includes(base.begin(), base.end(), con.begin(), con.end()));
        }
      }
    }
  }

  TEST_CASE("single unit without h1 equals the unbounded window") {
    std::mt19937 rng(29);
    for (int c = 0; c < 100; ++c) {
      auto rd = testsupport::random_document(rng, 80, 12);
      SegmentationConfig seg;
      seg.header_line_count = 0;
      seg.paragraph_split = ParagraphSplit::kNone;
      rd.doc = segment(std::move(rd.doc), seg, EntityMatcher());
      REQUIRE(rd.doc.text_units.size() == 1);
      CoocConfig tu;
      tu.target_category = "T";
      tu.partner_categories = {"P", "Q"};
      tu.h1 = false;
      auto w = tu;
      w.mode = CoocMode::kWindow;
      CHECK(pair_set(cooc_text_unit(rd.doc, rd.mentions, tu)) == pair_set(cooc_window(rd.doc, rd.mentions, w)));
    }
  }

  TEST_CASE("header context, self relations and deduplication") {
    const Dictionary p = parse_dictionary_text("colza:L:colza:Colza:\n", "p");
    const Dictionary r = parse_dictionary_text("Centre:L:région Centre:\n", "r");
    const Dictionary b = parse_dictionary_text("altise:L:altise:altises:\n", "b");
    const auto matcher = EntityMatcher::compile(std::vector<Dictionary>{p, r, b});
    SegmentationConfig seg;
    seg.header_line_count = 1;
    seg.main_entity_category = "p";
    const Document doc = segment(ingest_text("Bulletin région Centre\nColza\naltises et altise sur colza\n", "d"), seg, matcher);
    CoocConfig cfg;
    cfg.target_category = "p";
    cfg.partner_categories = {"b", "p"};
    cfg.h2 = true;
    cfg.header_categories = {"r"};
    const auto rels = extract_relations(doc, extract_entities(doc, matcher, nullptr), cfg);
    REQUIRE(rels.size() == 1);
    CHECK(rels[0].second.canonical == "altise");
    CHECK(rels[0].context.at("r") == "Centre");
  }

  TEST_CASE("paragraph transform partitions the range") {
    const auto p = load_dictionary(testsupport::source_path("resources/dicts/p.dic"), "p");
    const auto matcher = EntityMatcher::compile(std::span<const Dictionary>(&p, 1));
    const std::vector<std::string> pool = {"Colza", "Blé tendre", "texte libre", "colza en bas", "Orge", "autre",
                                           "Tournesol semé"};
    std::mt19937 rng(41);
    for (int c = 0; c < 200; ++c) {
      std::string raw;
      const int n = 1 + int(rng() % 12);
      for (int i = 0; i < n; ++i) raw += pool[rng() % pool.size()] + "\n";
      const Document doc = ingest_text(raw, "d");
      const std::size_t lo = rng() % doc.lines.size();
      const std::size_t hi = lo + rng() % (doc.lines.size() - lo);
      const auto parts = transform_paragraphs(doc, lo, hi, "p", matcher);
      REQUIRE_FALSE(parts.empty());
      CHECK(parts.front().first_line == lo);
      CHECK(parts.back().last_line == hi);
      for (std::size_t i = 1; i < parts.size(); ++i) {
        CHECK(parts[i].first_line == parts[i - 1].last_line + 1);
        CHECK(parts[i].opening.has_value());
      }
    }
    const Document none = ingest_text("rien\nde plus\n", "d");
    const auto one = transform_paragraphs(none, 0, 1, "p", matcher);
    REQUIRE(one.size() == 1);
    CHECK_FALSE(one[0].opening);
  }

  TEST_CASE("contextual extraction") {
    const auto p = load_dictionary(testsupport::source_path("resources/dicts/p.dic"), "p");
    const auto m = load_dictionary(testsupport::source_path("tests/fixtures/figure9/m.dic"), "m");
    const auto matcher = EntityMatcher::compile(std::vector<Dictionary>{p, m});
    const GrammarSet gs = load_grammars({testsupport::source_path("resources/grammars/damage.grm")});
    const Document doc = ingest_file(testsupport::source_path("tests/fixtures/figure9/bsv_2011_03_08_oleagineux.txt"));
    const auto outer = transform_paragraphs(doc, 0, doc.lines.size() - 1, "p", matcher);
    REQUIRE(outer.size() == 2);
    CHECK(doc.span_text(outer[1].opening->start, outer[1].opening->end) == "Colza");
    CHECK(outer[1].last_line == doc.lines.size() - 1);

    const auto rels = extract_contextual(doc, {"p", "m", "damage"}, matcher, &gs);
    REQUIRE(rels.size() == 1);
    CHECK(rels[0].context.at("damage") == "nuisibilité est élevée");
    CHECK_THROWS_AS(extract_contextual(doc, {"p", "m"}, matcher, &gs), ArityUnsupported);

    const Document outside = ingest_text("Colza\nla nuisibilité est élevée\n", "d");
    CHECK(extract_contextual(outside, {"p", "m", "damage"}, matcher, &gs).empty());
  }

  TEST_CASE("contextual pairs are text-unit relations") {
    const auto p = load_dictionary(testsupport::source_path("resources/dicts/p.dic"), "p");
    const auto m = load_dictionary(testsupport::source_path("resources/dicts/m.dic"), "m");
    const auto extra = load_dictionary(testsupport::source_path("tests/fixtures/figure9/m.dic"), "m2");
    const auto matcher = EntityMatcher::compile(std::vector<Dictionary>{p, m, extra});
    const GrammarSet gs = load_grammars({testsupport::source_path("resources/grammars/damage.grm")});
    SegmentationConfig seg;
    seg.header_line_count = 0;
    seg.main_entity_category = "p";
    for (const std::string f : {"tests/fixtures/figure9/bsv_2011_03_08_oleagineux.txt",
                                "tests/fixtures/bsv/bsv_2011_03_15_centre.txt"}) {
      const Document doc = segment(ingest_file(testsupport::source_path(f)), seg, matcher);
      CoocConfig cfg;
      cfg.target_category = "p";
      cfg.partner_categories = {"m", "m2"};
      std::set<std::pair<std::string, std::string>> pairs;
      for (const auto& r : extract_relations(doc, extract_entities(doc, matcher, &gs), cfg)) {
        pairs.emplace(r.first.canonical, r.second.canonical);
      }
      for (const std::string mid : {"m", "m2"}) {
        for (const auto& r : extract_contextual(doc, {"p", mid, "damage"}, matcher, &gs)) {
          CHECK(pairs.count({r.first.canonical, r.second.canonical}));
        }
      }
    }
  }

  TEST_CASE("relation csv and json round trips") {
    RelationInstance r;
    r.doc_id = "d";
    r.first = at("p", "blé", 1);
    r.second = at("m", "piétin, échaudage", 4);
    r.relation_type = "p-m";
    r.evidence_unit = 2;
    r.context = {{"date", "15 mars 2011"}, {"r", "Centre"}};
    std::stringstream ss;
    write_relations_csv(ss, {r});
    const auto back = read_relations_csv(ss);
    REQUIRE(back.size() == 1);
    CHECK(back[0].second.canonical == "piétin, échaudage");
    CHECK(back[0].context == r.context);
    CHECK(back[0].evidence_unit == 2);
    CHECK(relations_from_json(relations_to_json({r})) == std::vector<RelationInstance>{r});
  }
}
