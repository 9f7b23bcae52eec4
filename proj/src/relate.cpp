#include "entrel/relate.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "entrel/csv.hpp"
#include "entrel/error.hpp"
#include "entrel/text.hpp"

namespace entrel {

CoocMode cooc_mode_from_string(std::string_view s) {
  if (s == "text-unit" || s == "TEXT_UNIT") return CoocMode::kTextUnit;
  if (s == "window" || s == "WINDOW") return CoocMode::kWindow;
  if (s == "constrained" || s == "CONSTRAINED") return CoocMode::kConstrained;
  throw ConfigError("unknown cooccurrence mode '" + std::string(s) + "'");
}

void CoocConfig::validate() const {
  if (target_category.empty()) throw ConfigError("target category is required");
  if (partner_categories.empty()) throw ConfigError("at least one partner category is required");
  if (mode == CoocMode::kConstrained && markers.empty()) {
    throw ConfigError("constrained cooccurrence needs at least one marker");
  }
  if (mode == CoocMode::kConstrained && constrained_scope == CoocMode::kConstrained) {
    throw ConfigError("constrained scope must be text-unit or window");
  }
}

bool CoocConfig::is_partner(const std::string& category) const {
  return std::find(partner_categories.begin(), partner_categories.end(), category) != partner_categories.end();
}

namespace {

bool same_mention(const EntityMention& a, const EntityMention& b) {
  return a.span == b.span && a.category == b.category && a.canonical == b.canonical;
}

RelationInstance make_relation(const Document& doc, const EntityMention& target, const EntityMention& partner,
                               std::optional<int> unit) {
  RelationInstance r;
  r.doc_id = doc.doc_id;
  r.first = target;
  r.second = partner;
  r.relation_type = target.category + "-" + partner.category;
  r.evidence_unit = unit;
  return r;
}

bool in_avoid(const Document& doc, std::size_t w) {
  const TextUnit* u = doc.unit_of(w);
  return u && u->kind == UnitKind::kAvoid;
}

std::map<std::string, std::string> header_context(const Document& doc, const std::vector<EntityMention>& mentions,
                                                  const std::vector<std::string>& categories) {
  std::map<std::string, std::string> ctx;
  if (doc.text_units.empty() || doc.text_units.front().kind != UnitKind::kHeader) return ctx;
  const TextUnit& header = doc.text_units.front();
  for (const auto& m : mentions) {
    if (!header.contains(m.span.start)) continue;
    if (std::find(categories.begin(), categories.end(), m.category) == categories.end()) continue;
    ctx.emplace(m.category, m.canonical);  // first occurrence wins
  }
  return ctx;
}

void attach_header(const Document& doc, const std::vector<EntityMention>& mentions, const CoocConfig& cfg,
                   std::vector<RelationInstance>& rels) {
  if (!cfg.h2 || rels.empty()) return;
  const auto ctx = header_context(doc, mentions, cfg.header_categories);
  for (auto& r : rels) {
    for (const auto& [k, v] : ctx) r.context.emplace(k, v);
  }
}

std::vector<RelationInstance> text_unit_pairs(const Document& doc, const std::vector<EntityMention>& mentions,
                                              const CoocConfig& cfg, bool h1,
                                              std::optional<UnitKind> only_kind) {
  std::vector<RelationInstance> out;
  const TextUnit* last_section = nullptr;
  for (const auto& unit : doc.text_units) {
    if (unit.kind == UnitKind::kSection) last_section = &unit;
    if (cfg.h3 && unit.kind == UnitKind::kAvoid) continue;
    if (only_kind && unit.kind != *only_kind) continue;
    // Without h3 an avoid block reads as part of the section it interrupts.
    const TextUnit* titled = unit.title_span ? &unit : nullptr;
    if (!titled && unit.kind == UnitKind::kAvoid && last_section) titled = last_section;
    if (h1 && !titled) continue;
    for (const auto& t : mentions) {
      if (t.category != cfg.target_category) continue;
      if (h1 ? !titled->title_span->contains(t.span.start) : !unit.contains(t.span.start)) continue;
      for (const auto& p : mentions) {
        if (!cfg.is_partner(p.category) || !unit.contains(p.span.start)) continue;
        if (same_mention(t, p)) continue;
        out.push_back(make_relation(doc, t, p, unit.unit_id));
      }
    }
  }
  return out;
}

bool within_window(std::size_t target, std::size_t partner, WindowBound left, WindowBound right) {
  const auto pi = static_cast<long long>(target);
  const auto pj = static_cast<long long>(partner);
  if (left && pj < pi - static_cast<long long>(*left)) return false;
  if (right && pj > pi + static_cast<long long>(*right)) return false;
  return true;
}

}  // namespace

std::vector<RelationInstance> cooc_text_unit(const Document& doc, const std::vector<EntityMention>& mentions,
                                             const CoocConfig& cfg) {
  auto out = text_unit_pairs(doc, mentions, cfg, cfg.h1, std::nullopt);
  attach_header(doc, mentions, cfg, out);
  return out;
}

std::vector<RelationInstance> cooc_window(const Document& doc, const std::vector<EntityMention>& mentions,
                                          const CoocConfig& cfg) {
  std::vector<RelationInstance> out;
  for (const auto& t : mentions) {
    if (t.category != cfg.target_category) continue;
    if (cfg.h3 && in_avoid(doc, t.span.start)) continue;
    std::optional<int> unit;
    if (const TextUnit* u = doc.unit_of(t.span.start)) unit = u->unit_id;
    for (const auto& p : mentions) {
      if (!cfg.is_partner(p.category) || same_mention(t, p)) continue;
      if (cfg.h3 && in_avoid(doc, p.span.start)) continue;
      if (!within_window(t.span.start, p.span.start, cfg.window_left, cfg.window_right)) continue;
      out.push_back(make_relation(doc, t, p, unit));
    }
  }
  attach_header(doc, mentions, cfg, out);
  return out;
}

std::vector<std::size_t> marker_positions(const Document& doc, const std::vector<std::string>& markers) {
  std::vector<std::vector<std::string>> phrases;
  for (const auto& m : markers) {
    auto toks = text::folded_tokens(m);
    if (!toks.empty()) phrases.push_back(std::move(toks));
  }
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < doc.tokens.size(); ++w) {
    for (const auto& p : phrases) {
      if (w + p.size() > doc.tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < p.size() && ok; ++k) ok = doc.tokens[w + k].folded == p[k];
      if (ok) {
        out.push_back(w);
        break;
      }
    }
  }
  return out;
}

std::vector<RelationInstance> cooc_constrained(const Document& doc, const std::vector<EntityMention>& mentions,
                                               const CoocConfig& cfg) {
  CoocConfig base = cfg;
  base.mode = cfg.constrained_scope;
  auto candidates = cfg.constrained_scope == CoocMode::kWindow ? cooc_window(doc, mentions, base)
                                                               : cooc_text_unit(doc, mentions, base);
  const auto markers = marker_positions(doc, cfg.markers);
  std::vector<RelationInstance> out;
  for (auto& r : candidates) {
    const std::size_t pi = r.first.span.start;
    const std::size_t pj = r.second.span.start;
    const std::size_t lo = std::min(pi, pj);
    const std::size_t hi = std::max(pi, pj);
    const std::size_t dist = hi - lo;
    // markers is sorted; look only at occurrences inside (lo, hi).
    auto it = std::upper_bound(markers.begin(), markers.end(), lo);
    bool ok = false;
    for (; it != markers.end() && *it < hi; ++it) {
      const std::size_t pk = *it;
      const std::size_t dk = pk > pi ? pk - pi : pi - pk;
      if (dk <= dist) {
        ok = true;
        break;
      }
    }
    if (ok) out.push_back(std::move(r));
  }
  return out;
}

std::vector<RelationInstance> extract_relations(const Document& doc, const std::vector<EntityMention>& mentions,
                                                const CoocConfig& cfg) {
  std::vector<RelationInstance> raw;
  switch (cfg.mode) {
    case CoocMode::kTextUnit: {
      const bool has_sections = std::any_of(doc.text_units.begin(), doc.text_units.end(),
                                            [](const TextUnit& u) { return u.kind == UnitKind::kSection; });
      if (has_sections) {
        raw = text_unit_pairs(doc, mentions, cfg, cfg.h1, std::nullopt);
      } else {
        raw = text_unit_pairs(doc, mentions, cfg, false, UnitKind::kParagraph);
      }
      attach_header(doc, mentions, cfg, raw);
      break;
    }
    case CoocMode::kWindow:
      raw = cooc_window(doc, mentions, cfg);
      break;
    case CoocMode::kConstrained:
      raw = cooc_constrained(doc, mentions, cfg);
      break;
  }

  std::stable_sort(raw.begin(), raw.end(), [](const RelationInstance& a, const RelationInstance& b) {
    return std::tie(a.first.span.start, a.second.span.start) < std::tie(b.first.span.start, b.second.span.start);
  });

  std::vector<RelationInstance> out;
  std::set<std::tuple<std::string, std::string, std::string, int>> seen;
  for (auto& r : raw) {
    if (r.first.category == r.second.category && r.first.canonical == r.second.canonical) continue;
    auto key = std::make_tuple(r.relation_type, r.first.canonical, r.second.canonical, r.evidence_unit.value_or(-1));
    if (!seen.insert(std::move(key)).second) continue;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Paragraph> transform_paragraphs(const Document& doc, std::size_t first_line, std::size_t last_line,
                                            const std::string& category, const EntityMatcher& matcher) {
  std::vector<Paragraph> out;
  if (first_line > last_line || last_line >= doc.lines.size()) return out;
  Paragraph cur{first_line, first_line, std::nullopt};
  for (std::size_t l = first_line; l <= last_line; ++l) {
    auto opening = line_opening_match(doc, l, category, matcher);
    if (opening && l > cur.first_line) {
      cur.last_line = l - 1;
      out.push_back(cur);
      cur = Paragraph{l, l, opening};
    } else if (opening) {
      cur.opening = opening;
    }
  }
  cur.last_line = last_line;
  out.push_back(cur);
  return out;
}

namespace {

std::optional<WordSpan> words_of_lines(const Document& doc, std::size_t first_line, std::size_t last_line) {
  std::optional<WordSpan> span;
  for (std::size_t l = first_line; l <= last_line; ++l) {
    const Line& line = doc.lines[l];
    if (line.empty()) continue;
    if (!span) span = WordSpan{line.first_word, line.first_word};
    span->end = line.first_word + line.word_count - 1;
  }
  return span;
}

EntityMention opening_mention(const Document& doc, const std::vector<EntityMention>& mentions, const WordSpan& span,
                              const std::string& category, const EntityMatcher& matcher) {
  for (const auto& m : mentions) {
    if (m.category == category && m.span.start == span.start) return m;
  }
  // The opening match lost an overlap contest; rebuild it from the matcher.
  auto hit = matcher.longest_at(doc.tokens, span.start, category);
  EntityMention m;
  m.doc_id = doc.doc_id;
  m.category = category;
  m.canonical = hit ? hit->canonical : doc.span_text(span.start, span.end);
  m.span = span;
  m.surface = doc.span_text(span.start, span.end);
  if (const TextUnit* u = doc.unit_of(span.start)) m.text_unit = u->unit_id;
  return m;
}

}  // namespace

std::vector<RelationInstance> extract_contextual(const Document& doc, const std::vector<std::string>& tags,
                                                 const EntityMatcher& matcher, const GrammarSet* grammars) {
  if (tags.size() != 3) throw ArityUnsupported(tags.size());
  const auto mentions = extract_entities(doc, matcher, grammars);
  std::vector<RelationInstance> out;
  if (doc.lines.empty()) return out;

  for (const auto& outer : transform_paragraphs(doc, 0, doc.lines.size() - 1, tags[0], matcher)) {
    if (!outer.opening) continue;
    const EntityMention head = opening_mention(doc, mentions, *outer.opening, tags[0], matcher);
    for (const auto& inner : transform_paragraphs(doc, outer.first_line, outer.last_line, tags[1], matcher)) {
      if (!inner.opening) continue;
      const auto words = words_of_lines(doc, inner.first_line, inner.last_line);
      if (!words) continue;
      const EntityMention sub = opening_mention(doc, mentions, *inner.opening, tags[1], matcher);
      for (const auto& m : mentions) {
        if (m.category != tags[2] || !words->contains(m.span.start)) continue;
        RelationInstance r = make_relation(doc, head, sub, sub.text_unit);
        r.context[tags[2]] = m.canonical;
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

void write_relations_csv(std::ostream& out, const std::vector<RelationInstance>& relations) {
  csv::write_row(out, {"doc_id", "relation_type", "target_canonical", "partner_canonical", "evidence_unit",
                       "context_json"});
  for (const auto& r : relations) {
    csv::write_row(out, {r.doc_id, r.relation_type, r.first.canonical, r.second.canonical,
                         r.evidence_unit ? std::to_string(*r.evidence_unit) : std::string(),
                         nlohmann::json(r.context).dump()});
  }
}

std::vector<RelationInstance> read_relations_csv(std::istream& in) {
  auto header = csv::read_row(in);
  if (!header || header->size() < 6 || (*header)[0] != "doc_id") throw FormatError(1, "expected relation CSV header");
  std::vector<RelationInstance> out;
  std::size_t line_no = 1;
  while (auto row = csv::read_row(in)) {
    ++line_no;
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != 6) throw FormatError(line_no, "expected 6 columns");
    RelationInstance r;
    r.doc_id = (*row)[0];
    r.relation_type = (*row)[1];
    const auto dash = r.relation_type.find('-');
    r.first.category = r.relation_type.substr(0, dash);
    r.second.category = dash == std::string::npos ? std::string() : r.relation_type.substr(dash + 1);
    r.first.doc_id = r.second.doc_id = r.doc_id;
    r.first.canonical = r.first.surface = (*row)[2];
    r.second.canonical = r.second.surface = (*row)[3];
    if (!(*row)[4].empty()) r.evidence_unit = std::stoi((*row)[4]);
    try {
      if (!(*row)[5].empty()) r.context = nlohmann::json::parse((*row)[5]).get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception&) {
      throw FormatError(line_no, "context_json is not a string map");
    }
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json relations_to_json(const std::vector<RelationInstance>& relations) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : relations) {
    nlohmann::json j = {{"doc_id", r.doc_id},
                        {"relation_type", r.relation_type},
                        {"first", to_json(r.first)},
                        {"second", to_json(r.second)},
                        {"context", r.context}};
    j["evidence_unit"] = r.evidence_unit ? nlohmann::json(*r.evidence_unit) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return {{"relations", arr}};
}

std::vector<RelationInstance> relations_from_json(const nlohmann::json& j) {
  std::vector<RelationInstance> out;
  for (const auto& jr : j.at("relations")) {
    RelationInstance r;
    r.doc_id = jr.at("doc_id").get<std::string>();
    r.relation_type = jr.at("relation_type").get<std::string>();
    r.first = mention_from_json(jr.at("first"));
    r.second = mention_from_json(jr.at("second"));
    if (!jr.at("evidence_unit").is_null()) r.evidence_unit = jr.at("evidence_unit").get<int>();
    r.context = jr.at("context").get<std::map<std::string, std::string>>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace entrel
