#include "entrel/ner.hpp"

#include <algorithm>
#include <tuple>

#include "entrel/csv.hpp"
#include "entrel/error.hpp"

namespace entrel {

std::string_view to_string(MentionSource s) {
  return s == MentionSource::kDictionary ? "DICTIONARY" : "GRAMMAR";
}

MentionSource mention_source_from_string(std::string_view s) {
  if (s == "DICTIONARY") return MentionSource::kDictionary;
  if (s == "GRAMMAR") return MentionSource::kGrammar;
  throw Error("unknown mention source '" + std::string(s) + "'");
}

void sort_mentions(std::vector<EntityMention>& mentions) {
  std::sort(mentions.begin(), mentions.end(), [](const EntityMention& a, const EntityMention& b) {
    return std::forward_as_tuple(a.span.start, b.span.end, a.category, a.canonical, a.source) <
           std::forward_as_tuple(b.span.start, a.span.end, b.category, b.canonical, b.source);
  });
}

std::vector<EntityMention> resolve_overlaps(std::vector<EntityMention> mentions) {
  sort_mentions(mentions);

  // Sorted by (start asc, end desc): every strict container of a mention
  // precedes it, so a running max of earlier distinct spans' ends decides.
  std::vector<EntityMention> out;
  std::optional<std::size_t> max_end_before;  // over spans strictly before the current group
  std::size_t i = 0;
  while (i < mentions.size()) {
    std::size_t j = i;
    while (j < mentions.size() && mentions[j].span == mentions[i].span) ++j;
    const WordSpan span = mentions[i].span;
    const bool contained = max_end_before && *max_end_before >= span.end;
    if (!contained) {
      const std::size_t group_begin = out.size();
      for (std::size_t k = i; k < j; ++k) {
        const bool dup = std::any_of(out.begin() + static_cast<std::ptrdiff_t>(group_begin), out.end(),
                                     [&](const EntityMention& m) {
                                       return m.category == mentions[k].category &&
                                              m.canonical == mentions[k].canonical;
                                     });
        if (!dup) out.push_back(std::move(mentions[k]));
      }
    }
    if (!max_end_before || span.end > *max_end_before) max_end_before = span.end;
    i = j;
  }
  return out;
}

std::vector<EntityMention> extract_entities(const Document& doc, const EntityMatcher& matcher,
                                            const GrammarSet* grammars) {
  std::vector<EntityMention> all;
  for (auto& m : matcher.find_all(doc.tokens)) {
    EntityMention e;
    e.doc_id = doc.doc_id;
    e.category = std::move(m.hit.category);
    e.canonical = std::move(m.hit.canonical);
    e.span = {m.start, m.start + m.hit.length - 1};
    e.surface = doc.span_text(e.span.start, e.span.end);
    e.source = MentionSource::kDictionary;
    all.push_back(std::move(e));
  }
  if (grammars) {
    for (auto& g : scan(*grammars, doc, matcher)) {
      EntityMention e;
      e.doc_id = doc.doc_id;
      e.category = std::move(g.category);
      e.span = g.span;
      e.surface = doc.span_text(e.span.start, e.span.end);
      e.canonical = e.surface;
      e.source = MentionSource::kGrammar;
      e.captures = std::move(g.captures);
      all.push_back(std::move(e));
    }
  }
  auto out = resolve_overlaps(std::move(all));
  for (auto& m : out) {
    if (const TextUnit* u = doc.unit_of(m.span.start)) m.text_unit = u->unit_id;
  }
  return out;
}

void write_mentions_csv(std::ostream& out, const std::vector<EntityMention>& mentions) {
  csv::write_row(out, {"doc_id", "category", "canonical", "start_word", "end_word", "surface", "source"});
  for (const auto& m : mentions) {
    csv::write_row(out, {m.doc_id, m.category, m.canonical, std::to_string(m.span.start),
                         std::to_string(m.span.end), m.surface, std::string(to_string(m.source))});
  }
}

std::vector<EntityMention> read_mentions_csv(std::istream& in) {
  std::vector<EntityMention> out;
  auto header = csv::read_row(in);
  if (!header || header->size() < 7 || (*header)[0] != "doc_id") {
    throw FormatError(1, "expected mention CSV header");
  }
  std::size_t line_no = 1;
  while (auto row = csv::read_row(in)) {
    ++line_no;
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != 7) throw FormatError(line_no, "expected 7 columns");
    EntityMention m;
    m.doc_id = (*row)[0];
    m.category = (*row)[1];
    m.canonical = (*row)[2];
    try {
      m.span = {std::stoul((*row)[3]), std::stoul((*row)[4])};
    } catch (const std::exception&) {
      throw FormatError(line_no, "bad word index");
    }
    m.surface = (*row)[5];
    m.source = mention_source_from_string((*row)[6]);
    out.push_back(std::move(m));
  }
  return out;
}

nlohmann::json to_json(const EntityMention& m) {
  nlohmann::json j = {{"doc_id", m.doc_id},
                      {"category", m.category},
                      {"canonical", m.canonical},
                      {"surface", m.surface},
                      {"start_word", m.span.start},
                      {"end_word", m.span.end},
                      {"source", to_string(m.source)}};
  j["text_unit"] = m.text_unit ? nlohmann::json(*m.text_unit) : nlohmann::json(nullptr);
  auto& caps = j["captures"] = nlohmann::json::array();
  for (const auto& c : m.captures) {
    caps.push_back({{"open", c.open}, {"close", c.close}, {"start_word", c.start_word}, {"end_word", c.end_word}});
  }
  return j;
}

EntityMention mention_from_json(const nlohmann::json& j) {
  EntityMention m;
  m.doc_id = j.at("doc_id").get<std::string>();
  m.category = j.at("category").get<std::string>();
  m.canonical = j.at("canonical").get<std::string>();
  m.surface = j.value("surface", "");
  m.span = {j.at("start_word").get<std::size_t>(), j.at("end_word").get<std::size_t>()};
  m.source = mention_source_from_string(j.value("source", "DICTIONARY"));
  if (j.contains("text_unit") && !j.at("text_unit").is_null()) m.text_unit = j.at("text_unit").get<int>();
  if (j.contains("captures")) {
    for (const auto& c : j.at("captures")) {
      m.captures.push_back({c.at("open").get<std::string>(), c.at("close").get<std::string>(),
                            c.at("start_word").get<std::size_t>(), c.at("end_word").get<std::size_t>()});
    }
  }
  return m;
}

}  // namespace entrel
