#include <doctest.h>

#include <algorithm>
#include <random>
#include <fstream>
#include <set>
#include <sstream>

#include "entrel/error.hpp"
#include "entrel/metrics.hpp"
#include "support.hpp"

using namespace entrel;

namespace {

GoldCorpus gold_from(const std::string& text, GoldFormat f, GoldOptions o = {}) {
  std::istringstream in(text);
  return parse_gold(in, f, o);
}

EntityMention pred(const std::string& doc, const std::string& cat, const std::string& canonical, std::size_t s,
                   std::size_t e) {
  EntityMention m;
  m.doc_id = doc;
  m.category = cat;
  m.canonical = canonical;
  m.surface = canonical;
  m.span = {s, e};
  return m;
}

RelationInstance rel(const std::string& doc, const std::string& a, const std::string& b) {
  RelationInstance r;
  r.doc_id = doc;
  r.first = pred(doc, "p", a, 0, 0);
  r.second = pred(doc, "m", b, 1, 1);
  r.relation_type = "p-m";
  return r;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("published row") { CHECK(f_score(96.46, 95.52, 1.0) == doctest::Approx(95.98).epsilon(0.0001)); }

  TEST_CASE("equal precision and recall") {
    for (double x : {0.0, 12.5, 50.0, 99.9, 100.0}) CHECK(f_score(x, x, 1.0) == doctest::Approx(x));
  }

  TEST_CASE("harmonic bounds and beta weighting") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.1, 100.0);
    for (int i = 0; i < 1000; ++i) {
      const double p = u(rng), r = u(rng);
      const double f = f_score(p, r, 1.0);
      CHECK(f <= std::max(p, r) + 1e-9);
      CHECK(f >= std::min(p, r) - 1e-9);
    }
    const ScoreRow a = make_row("x", 2, 4, 3, 1.0);
    const ScoreRow b = make_row("x", 2, 4, 3, 2.0);
    CHECK(a.precision == b.precision);
    CHECK(a.recall == b.recall);
    CHECK(a.f1 != b.f1);
  }

  TEST_CASE("hand-built entity corpus") {
    const GoldCorpus gold = load_gold(testsupport::source_path("tests/fixtures/eval/gold_entities.txt"), GoldFormat::kCsvLike);
    std::ifstream in(testsupport::source_path("tests/fixtures/eval/pred_entities.csv"));
    const auto predicted = read_mentions_csv(in);
    const EvalReport rep = score_entities(gold, predicted, MatchPolicy::kCanonicalSet);
    CHECK(rep.total.correct == 2);
    CHECK(rep.total.produced == 4);
    CHECK(rep.total.possible == 3);
    CHECK(rep.total.precision == doctest::Approx(50.0));
    CHECK(rep.total.recall == doctest::Approx(66.67).epsilon(0.0001));
    CHECK(rep.total.f1 == doctest::Approx(57.14).epsilon(0.0001));
    CHECK_THROWS_AS(score_entities(gold, predicted, MatchPolicy::kExactSpan), Error);
  }

  TEST_CASE("gold equal to predictions scores 100") {
    const GoldCorpus gold = load_gold(testsupport::source_path("tests/fixtures/eval/gold_relations.txt"), GoldFormat::kCsvLike);
    std::vector<RelationInstance> preds;
    for (const auto& [doc, g] : gold.docs) {
      for (const auto& r : g.relations) {
        auto x = rel(doc, r.values[0], r.values[1]);
        x.relation_type = r.relation_type;
        preds.push_back(x);
      }
    }
    const EvalReport rep = score_relations(gold, preds);
    CHECK(rep.total.f1 == doctest::Approx(100.0));
    CHECK(rep.total.correct == 6);
  }

  TEST_CASE("zero denominators are flagged") {
    const ScoreRow r = make_row("x", 0, 0, 0, 1.0);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
    CHECK(r.precision_undefined);
    CHECK(r.recall_undefined);
    std::ostringstream out;
    EvalReport rep;
    rep.rows = {r};
    rep.total = r;
    write_report_csv(out, rep);
    CHECK(out.str().find(",-,") != std::string::npos);
  }

  TEST_CASE("scores ignore collection order") {
    const GoldCorpus gold = gold_from("E:d:p:blé\nE:d:p:orge\nE:d:m:mildiou\nE:e:b:puceron\n", GoldFormat::kCsvLike);
    std::vector<EntityMention> ps = {pred("d", "p", "Blé", 0, 0), pred("d", "m", "rouille", 2, 2),
                                     pred("e", "b", "puceron", 1, 1), pred("d", "p", "orge", 4, 4),
                                     pred("zz", "p", "orge", 0, 0)};
    const auto base = score_entities(gold, ps, MatchPolicy::kCanonicalSet);
    std::mt19937 rng(2);
    for (int i = 0; i < 20; ++i) {
      std::shuffle(ps.begin(), ps.end(), rng);
      const auto rep = score_entities(gold, ps, MatchPolicy::kCanonicalSet);
      CHECK(rep.total.correct == base.total.correct);
      CHECK(rep.total.produced == base.total.produced);
    }
    CHECK(base.total.correct == 3);
    CHECK(base.total.produced == 4);  // document zz has no gold
  }

  TEST_CASE("macro averaging") {
    const EvalReport micro = report_from_counts({{"a", {1, 1, 1}}, {"b", {0, 3, 3}}});
    ScoreOptions o;
    o.averaging = Averaging::kMacro;
    const EvalReport macro = report_from_counts({{"a", {1, 1, 1}}, {"b", {0, 3, 3}}}, o);
    CHECK(micro.total.precision == doctest::Approx(25.0));
    CHECK(macro.total.precision == doctest::Approx(50.0));
    CHECK(macro.total.f1 == doctest::Approx(50.0));
  }

  TEST_CASE("triples through a context key") {
    const GoldCorpus gold = gold_from("R:d:p-m:colza:charançon:nuisibilité est élevée\n", GoldFormat::kCsvLike);
    auto r = rel("d", "colza", "charançon");
    r.context["damage"] = "nuisibilité est élevée";
    ScoreOptions o;
    o.triple_context = "damage";
    const auto rep = score_relations(gold, {r}, o);
    CHECK(rep.total.correct == 1);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].category == "p-m-damage");
  }

  TEST_CASE("bio reading") {
    const GoldCorpus g = load_gold(testsupport::source_path("tests/fixtures/eval/gold_bio.txt"), GoldFormat::kBio);
    const auto& ents = g.docs.at("figure2").entities;
    REQUIRE(ents.size() == 2);
    CHECK(ents[0].category == "m");
    CHECK(ents[0].text == "piétin échaudage");
    CHECK(ents[0].span == WordSpan{1, 2});
    CHECK(gold_from("un\tO\ndeux\tO\n", GoldFormat::kBio).entity_count() == 0);
  }

  TEST_CASE("tag sequence errors and lenient repair") {
    CHECK_THROWS_AS(gold_from("a\tI-m\n", GoldFormat::kBio), TagSequenceError);
    const auto g = gold_from("a\tI-m\nb\tI-m\n", GoldFormat::kBio, GoldOptions{false, "doc"});
    CHECK(g.entity_count() == 1);
    CHECK_THROWS_AS(gold_from("a\tB-m\nb\tO\n", GoldFormat::kBilou), TagSequenceError);
    CHECK(gold_from("a\tB-m\nb\tL-m\nc\tU-p\n", GoldFormat::kBilou).entity_count() == 2);
  }

  TEST_CASE("tagged output round trips on random mentions") {
    std::mt19937 rng(6);
    for (int c = 0; c < 200; ++c) {
      std::string raw;
      for (int i = 0, n = 1 + int(rng() % 20); i < n; ++i) raw += "w" + std::to_string(i) + (rng() % 5 ? " " : "\n");
      const Document doc = ingest_text(raw, "r");
      std::vector<EntityMention> ms;
      std::size_t w = 0;
      while (w < doc.tokens.size()) {
        const std::size_t len = 1 + rng() % 3;
        const std::size_t line = doc.tokens[w].line_index;
        std::size_t end = std::min(w + len - 1, doc.tokens.size() - 1);
        while (doc.tokens[end].line_index != line) --end;
        if (rng() % 2) ms.push_back(pred("r", rng() % 2 ? "p" : "m", "x", w, end));
        w = end + 1 + rng() % 2;
      }
      for (GoldFormat f : {GoldFormat::kBio, GoldFormat::kBilou}) {
        std::stringstream ss;
        write_tagged(ss, doc, ms, f);
        const GoldCorpus g = parse_gold(ss, f);
        std::set<std::pair<std::string, WordSpan>> want, got;
        for (const auto& m : ms) want.emplace(m.category, m.span);
        for (const auto& e : g.docs.at("r").entities) got.emplace(e.category, *e.span);
        CHECK(want == got);
      }
    }
  }

  TEST_CASE("csv-like writer round trip") {
    const GoldCorpus g =
        gold_from("E:d:p:blé:0:0\nE:d:m:mildiou\nR:d:p-m:blé:mildiou\n# note\nR:e:p-b:colza:altise:x\n",
                  GoldFormat::kCsvLike);
    CHECK(g.entity_count() == 2);
    CHECK(g.relation_count() == 2);
    std::stringstream ss;
    write_gold_csv_like(ss, g);
    const GoldCorpus back = parse_gold(ss, GoldFormat::kCsvLike);
    CHECK(back.docs.at("d").entities == g.docs.at("d").entities);
    CHECK(back.docs.at("e").relations == g.docs.at("e").relations);
    CHECK_THROWS_AS(gold_from("X:d:p\n", GoldFormat::kCsvLike), FormatError);
  }

  TEST_CASE("report rendering") {
    const EvalReport rep = report_from_counts({{"m", {1, 2, 2}}, {"p", {2, 2, 3}}});
    const std::string table = format_table(rep);
    CHECK(table.find("TOT") != std::string::npos);
    CHECK(to_json(rep)["total"]["correct"] == 3);
  }
}
