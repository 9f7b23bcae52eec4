#include "entrel/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "entrel/csv.hpp"
#include "entrel/error.hpp"
#include "entrel/text.hpp"

namespace entrel {

GoldFormat gold_format_from_string(std::string_view s) {
  if (s == "csv" || s == "csv-like" || s == "CSV_LIKE") return GoldFormat::kCsvLike;
  if (s == "bio" || s == "BIO") return GoldFormat::kBio;
  if (s == "bilou" || s == "BILOU") return GoldFormat::kBilou;
  throw ConfigError("unknown gold format '" + std::string(s) + "'");
}

MatchPolicy match_policy_from_string(std::string_view s) {
  if (s == "exact-span" || s == "EXACT_SPAN") return MatchPolicy::kExactSpan;
  if (s == "canonical-set" || s == "CANONICAL_SET") return MatchPolicy::kCanonicalSet;
  if (s == "ordered-pair" || s == "ORDERED_PAIR_CANONICAL") return MatchPolicy::kOrderedPairCanonical;
  throw ConfigError("unknown match policy '" + std::string(s) + "'");
}

Averaging averaging_from_string(std::string_view s) {
  if (s == "micro") return Averaging::kMicro;
  if (s == "macro") return Averaging::kMacro;
  throw ConfigError("unknown averaging '" + std::string(s) + "'");
}

std::size_t GoldCorpus::entity_count() const {
  std::size_t n = 0;
  for (const auto& [id, d] : docs) n += d.entities.size();
  return n;
}

std::size_t GoldCorpus::relation_count() const {
  std::size_t n = 0;
  for (const auto& [id, d] : docs) n += d.relations.size();
  return n;
}

namespace {

template <typename T>
void dedup(std::vector<T>& v) {
  std::set<T> seen;
  std::vector<T> out;
  for (auto& x : v) {
    if (seen.insert(x).second) out.push_back(std::move(x));
  }
  v = std::move(out);
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

GoldCorpus parse_csv_like(std::istream& in) {
  GoldCorpus gold;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto f = text::split(t, ':');
    if (f.size() < 4 || f[0].size() != 1) throw FormatError(line_no, "expected E:... or R:...");
    for (auto& x : f) x = text::trim(x);
    if (f[1].empty()) throw FormatError(line_no, "empty document id");
    GoldDocument& doc = gold.docs[f[1]];
    if (f[0] == "E") {
      GoldEntity e;
      e.category = f[2];
      std::size_t text_end = f.size();
      if (f.size() >= 6 && all_digits(f[f.size() - 2]) && all_digits(f.back())) {
        e.span = WordSpan{std::stoul(f[f.size() - 2]), std::stoul(f.back())};
        if (e.span->end < e.span->start) throw FormatError(line_no, "span end before start");
        text_end -= 2;
      }
      e.text = text::join({f.begin() + 3, f.begin() + static_cast<std::ptrdiff_t>(text_end)}, ":");
      if (e.category.empty() || e.text.empty()) throw FormatError(line_no, "empty entity field");
      doc.entities.push_back(std::move(e));
    } else if (f[0] == "R") {
      if (f.size() != 5 && f.size() != 6) throw FormatError(line_no, "relation needs 2 or 3 values");
      GoldRelation r;
      r.relation_type = f[2];
      r.values.assign(f.begin() + 3, f.end());
      for (const auto& v : r.values) {
        if (v.empty()) throw FormatError(line_no, "empty relation value");
      }
      doc.relations.push_back(std::move(r));
    } else {
      throw FormatError(line_no, "unknown record kind '" + f[0] + "'");
    }
  }
  for (auto& [id, d] : gold.docs) {
    dedup(d.entities);
    dedup(d.relations);
  }
  return gold;
}

class TagReader {
 public:
  TagReader(GoldFormat format, const GoldOptions& options) : bilou_(format == GoldFormat::kBilou), opt_(options) {}

  GoldCorpus run(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (text::trim(line).empty()) {
        boundary();
        continue;
      }
      if (line.rfind("-DOCSTART-", 0) == 0) {
        boundary();
        doc_id_ = text::trim(std::string_view(line).substr(10));
        if (doc_id_.empty()) doc_id_ = opt_.default_doc_id;
        gold_.docs[doc_id_];
        word_ = 0;
        continue;
      }
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw FormatError(line_no_, "expected token<TAB>tag");
      token(line.substr(0, tab), text::trim(std::string_view(line).substr(tab + 1)));
    }
    boundary();
    for (auto& [id, d] : gold_.docs) dedup(d.entities);
    return std::move(gold_);
  }

 private:
  void fail(const std::string& what) { throw TagSequenceError(line_no_, what); }

  void token(const std::string& surface, const std::string& tag) {
    if (doc_id_.empty()) {
      doc_id_ = opt_.default_doc_id;
      gold_.docs[doc_id_];
    }
    const std::size_t w = word_++;
    if (tag == "O") {
      if (open_ && bilou_ && opt_.strict) fail("entity not closed before O");
      close();
      return;
    }
    if (tag.size() < 3 || tag[1] != '-') throw FormatError(line_no_, "bad tag '" + tag + "'");
    char kind = tag[0];
    const std::string cat = tag.substr(2);
    if (!bilou_ && (kind == 'L' || kind == 'U')) {
      if (opt_.strict) fail("tag '" + tag + "' is not BIO");
      kind = kind == 'L' ? 'I' : 'B';
    }
    const bool continues = open_ && open_->category == cat;
    switch (kind) {
      case 'B':
        if (open_ && bilou_ && opt_.strict) fail("B- inside an open entity");
        close();
        start(cat, surface, w);
        break;
      case 'I':
        if (!continues) {
          if (opt_.strict) fail("I-" + cat + " without a preceding B-" + cat);
          close();
          start(cat, surface, w);
        } else {
          extend(surface, w);
        }
        break;
      case 'L':
        if (!continues) {
          if (opt_.strict) fail("L-" + cat + " without an open " + cat);
          close();
          start(cat, surface, w);
        } else {
          extend(surface, w);
        }
        close();
        break;
      case 'U':
        if (open_ && opt_.strict) fail("U- inside an open entity");
        close();
        start(cat, surface, w);
        close();
        break;
      default:
        throw FormatError(line_no_, "bad tag '" + tag + "'");
    }
  }

  void start(const std::string& cat, const std::string& surface, std::size_t w) {
    open_ = GoldEntity{cat, surface, WordSpan{w, w}};
  }

  void extend(const std::string& surface, std::size_t w) {
    open_->text += " " + surface;
    open_->span->end = w;
  }

  void close() {
    if (!open_) return;
    gold_.docs[doc_id_].entities.push_back(std::move(*open_));
    open_.reset();
  }

  void boundary() {
    if (open_ && bilou_ && opt_.strict) fail("entity not closed at sentence end");
    close();
  }

  bool bilou_;
  GoldOptions opt_;
  GoldCorpus gold_;
  std::string doc_id_;
  std::size_t word_ = 0;
  std::size_t line_no_ = 0;
  std::optional<GoldEntity> open_;
};

}  // namespace

GoldCorpus parse_gold(std::istream& in, GoldFormat format, const GoldOptions& options) {
  if (format == GoldFormat::kCsvLike) return parse_csv_like(in);
  return TagReader(format, options).run(in);
}

GoldCorpus load_gold(const std::string& path, GoldFormat format, GoldOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open gold file '" + path + "'");
  if (options.default_doc_id == "doc") options.default_doc_id = std::filesystem::path(path).stem().string();
  return parse_gold(in, format, options);
}

void write_tagged(std::ostream& out, const Document& doc, const std::vector<EntityMention>& mentions,
                  GoldFormat scheme) {
  const bool bilou = scheme == GoldFormat::kBilou;
  std::vector<const EntityMention*> chosen;
  {
    std::vector<const EntityMention*> sorted;
    for (const auto& m : mentions) sorted.push_back(&m);
    std::stable_sort(sorted.begin(), sorted.end(), [](const EntityMention* a, const EntityMention* b) {
      return std::make_tuple(a->span.start, b->span.end) < std::make_tuple(b->span.start, a->span.end);
    });
    std::optional<std::size_t> last_end;
    for (const auto* m : sorted) {
      if (last_end && m->span.start <= *last_end) continue;
      if (m->span.end >= doc.tokens.size()) continue;
      chosen.push_back(m);
      last_end = m->span.end;
    }
  }
  std::vector<std::string> tags(doc.tokens.size(), "O");
  std::vector<bool> inside(doc.tokens.size(), false);
  for (const auto* m : chosen) {
    const auto& c = m->category;
    for (std::size_t w = m->span.start; w <= m->span.end; ++w) {
      inside[w] = w != m->span.end;
      if (w == m->span.start) {
        tags[w] = (bilou && m->span.start == m->span.end ? "U-" : "B-") + c;
      } else if (bilou && w == m->span.end) {
        tags[w] = "L-" + c;
      } else {
        tags[w] = "I-" + c;
      }
    }
  }
  out << "-DOCSTART- " << doc.doc_id << "\n\n";
  for (const auto& line : doc.lines) {
    if (line.empty()) continue;
    for (std::size_t w = line.first_word; w < line.first_word + line.word_count; ++w) {
      out << doc.tokens[w].surface << '\t' << tags[w] << '\n';
    }
    // Keep an entity that crosses a line break inside one sentence.
    if (!inside[line.first_word + line.word_count - 1]) out << '\n';
  }
}

void write_gold_csv_like(std::ostream& out, const GoldCorpus& gold) {
  for (const auto& [id, d] : gold.docs) {
    for (const auto& e : d.entities) {
      out << "E:" << id << ':' << e.category << ':' << e.text;
      if (e.span) out << ':' << e.span->start << ':' << e.span->end;
      out << '\n';
    }
    for (const auto& r : d.relations) {
      out << "R:" << id << ':' << r.relation_type;
      for (const auto& v : r.values) out << ':' << v;
      out << '\n';
    }
  }
}

double f_score(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double den = b2 * recall + precision;
  if (den == 0.0) return 0.0;
  return (b2 + 1.0) * precision * recall / den;
}

ScoreRow make_row(std::string category, std::size_t correct, std::size_t produced, std::size_t possible,
                  double beta) {
  ScoreRow r;
  r.category = std::move(category);
  r.correct = correct;
  r.produced = produced;
  r.possible = possible;
  r.precision_undefined = produced == 0;
  r.recall_undefined = possible == 0;
  r.precision = produced ? 100.0 * static_cast<double>(correct) / static_cast<double>(produced) : 0.0;
  r.recall = possible ? 100.0 * static_cast<double>(correct) / static_cast<double>(possible) : 0.0;
  r.f1 = f_score(r.precision, r.recall, beta);
  return r;
}

EvalReport report_from_counts(const std::map<std::string, std::array<std::size_t, 3>>& counts,
                              const ScoreOptions& options) {
  if (!(options.beta > 0.0)) throw ConfigError("beta must be positive");
  EvalReport rep;
  rep.beta = options.beta;
  rep.averaging = options.averaging;
  std::array<std::size_t, 3> sum{0, 0, 0};
  for (const auto& [cat, c] : counts) {
    rep.rows.push_back(make_row(cat, c[0], c[1], c[2], options.beta));
    for (int k = 0; k < 3; ++k) sum[k] += c[k];
  }
  rep.total = make_row("TOT", sum[0], sum[1], sum[2], options.beta);
  if (options.averaging == Averaging::kMacro && !rep.rows.empty()) {
    double p = 0, r = 0, f = 0;
    for (const auto& row : rep.rows) {
      p += row.precision;
      r += row.recall;
      f += row.f1;
    }
    const auto n = static_cast<double>(rep.rows.size());
    rep.total.precision = p / n;
    rep.total.recall = r / n;
    rep.total.f1 = f / n;
  }
  return rep;
}

namespace {

std::string norm(const std::string& s) { return text::join(text::folded_tokens(s), " "); }

using Key = std::vector<std::string>;
using KeySets = std::map<std::string, std::map<std::string, std::set<Key>>>;  // category -> doc -> keys

EvalReport compare(const KeySets& gold, const KeySets& pred, const ScoreOptions& options) {
  std::map<std::string, std::array<std::size_t, 3>> counts;
  for (const auto& [cat, docs] : gold) {
    auto& c = counts[cat];
    for (const auto& [doc, keys] : docs) c[2] += keys.size();
  }
  for (const auto& [cat, docs] : pred) {
    auto& c = counts[cat];
    const auto g = gold.find(cat);
    for (const auto& [doc, keys] : docs) {
      c[1] += keys.size();
      if (g == gold.end()) continue;
      const auto gd = g->second.find(doc);
      if (gd == g->second.end()) continue;
      for (const auto& k : keys) c[0] += gd->second.count(k);
    }
  }
  return report_from_counts(counts, options);
}

}  // namespace

EvalReport score_entities(const GoldCorpus& gold, const std::vector<EntityMention>& predicted, MatchPolicy policy,
                          const ScoreOptions& options) {
  if (policy == MatchPolicy::kOrderedPairCanonical) throw ConfigError("ordered-pair policy applies to relations");
  const bool exact = policy == MatchPolicy::kExactSpan;
  KeySets g, p;
  for (const auto& [doc, d] : gold.docs) {
    for (const auto& e : d.entities) {
      if (exact && !e.span) throw ConfigError("exact-span scoring needs gold spans (document " + doc + ")");
      Key k = exact ? Key{std::to_string(e.span->start), std::to_string(e.span->end)} : Key{norm(e.text)};
      g[e.category][doc].insert(std::move(k));
    }
  }
  // Predictions on documents without gold annotations are not scored.
  for (const auto& m : predicted) {
    if (!gold.docs.count(m.doc_id)) continue;
    Key k = exact ? Key{std::to_string(m.span.start), std::to_string(m.span.end)} : Key{norm(m.canonical)};
    p[m.category][m.doc_id].insert(std::move(k));
  }
  return compare(g, p, options);
}

EvalReport score_relations(const GoldCorpus& gold, const std::vector<RelationInstance>& predicted,
                           const ScoreOptions& options) {
  KeySets g, p;
  for (const auto& [doc, d] : gold.docs) {
    for (const auto& r : d.relations) {
      Key k;
      for (const auto& v : r.values) k.push_back(norm(v));
      std::string label = r.relation_type;
      if (options.triple_context && k.size() == 3) label += "-" + *options.triple_context;
      g[label][doc].insert(std::move(k));
    }
  }
  for (const auto& r : predicted) {
    if (!gold.docs.count(r.doc_id)) continue;
    Key k{norm(r.first.canonical), norm(r.second.canonical)};
    std::string label = r.relation_type;
    if (options.triple_context) {
      const auto it = r.context.find(*options.triple_context);
      if (it != r.context.end()) {
        k.push_back(norm(it->second));
        label += "-" + *options.triple_context;
      }
    }
    p[label][r.doc_id].insert(std::move(k));
  }
  return compare(g, p, options);
}

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<std::vector<std::string>> table_cells(const EvalReport& report) {
  std::vector<std::vector<std::string>> rows;
  auto add = [&](const ScoreRow& r) {
    rows.push_back({r.category, r.precision_undefined ? "-" : fmt2(r.precision),
                    r.recall_undefined ? "-" : fmt2(r.recall), fmt2(r.f1), std::to_string(r.correct),
                    std::to_string(r.produced), std::to_string(r.possible)});
  };
  for (const auto& r : report.rows) add(r);
  add(report.total);
  return rows;
}

}  // namespace

std::string format_table(const EvalReport& report) {
  std::vector<std::vector<std::string>> rows = {{"category", "P", "R", "F1", "correct", "produced", "possible"}};
  for (auto& r : table_cells(report)) rows.push_back(std::move(r));
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], text::codepoint_count(r[i]));
  }
  std::ostringstream os;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const auto& r = rows[ri];
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string pad(width[i] - text::codepoint_count(r[i]), ' ');
      if (i == 0) {
        os << r[i] << pad;
      } else {
        os << "  " << pad << r[i];
      }
    }
    os << '\n';
  }
  return os.str();
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "category,P,R,F1,correct,produced,possible\n";
  for (const auto& r : table_cells(report)) csv::write_row(out, r);
}

nlohmann::json to_json(const EvalReport& report) {
  auto row = [](const ScoreRow& r) {
    return nlohmann::json{{"category", r.category},
                          {"precision", r.precision},
                          {"recall", r.recall},
                          {"f1", r.f1},
                          {"correct", r.correct},
                          {"produced", r.produced},
                          {"possible", r.possible},
                          {"precision_undefined", r.precision_undefined},
                          {"recall_undefined", r.recall_undefined}};
  };
  nlohmann::json j;
  j["beta"] = report.beta;
  j["averaging"] = report.averaging == Averaging::kMicro ? "micro" : "macro";
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) j["rows"].push_back(row(r));
  j["total"] = row(report.total);
  return j;
}

}  // namespace entrel
