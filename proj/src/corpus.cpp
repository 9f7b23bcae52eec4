#include "entrel/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "entrel/dict.hpp"
#include "entrel/error.hpp"
#include "entrel/text.hpp"

namespace entrel {

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::kHeader:
      return "HEADER";
    case UnitKind::kSection:
      return "SECTION";
    case UnitKind::kParagraph:
      return "PARAGRAPH";
    case UnitKind::kAvoid:
      return "AVOID";
  }
  return "PARAGRAPH";
}

UnitKind unit_kind_from_string(std::string_view s) {
  if (s == "HEADER") return UnitKind::kHeader;
  if (s == "SECTION") return UnitKind::kSection;
  if (s == "PARAGRAPH") return UnitKind::kParagraph;
  if (s == "AVOID") return UnitKind::kAvoid;
  throw Error("unknown text unit kind '" + std::string(s) + "'");
}

ParagraphSplit paragraph_split_from_string(std::string_view s) {
  if (s == "blank-line" || s == "BLANK_LINE") return ParagraphSplit::kBlankLine;
  if (s == "sentence" || s == "SENTENCE") return ParagraphSplit::kSentence;
  if (s == "none" || s == "NONE") return ParagraphSplit::kNone;
  throw ConfigError("unknown paragraph split '" + std::string(s) + "'");
}

const TextUnit* Document::unit_of(std::size_t w) const {
  auto it = std::upper_bound(text_units.begin(), text_units.end(), w,
                             [](std::size_t word, const TextUnit& u) { return word < u.start_word; });
  if (it == text_units.begin()) return nullptr;
  --it;
  return it->contains(w) ? &*it : nullptr;
}

const TextUnit* Document::unit_by_id(int id) const {
  for (const auto& u : text_units) {
    if (u.unit_id == id) return &u;
  }
  return nullptr;
}

std::string Document::span_text(std::size_t start_word, std::size_t end_word) const {
  std::string out;
  std::size_t w = start_word;
  while (w <= end_word && w < tokens.size()) {
    const Token& first = tokens[w];
    std::size_t last = w;
    while (last + 1 <= end_word && last + 1 < tokens.size() &&
           tokens[last + 1].line_index == first.line_index) {
      ++last;
    }
    const std::string& line = lines[first.line_index].text;
    const std::size_t b = first.char_offset;
    const std::size_t e = tokens[last].char_offset + tokens[last].surface.size();
    if (!out.empty()) out.push_back(' ');
    out.append(line, b, e - b);
    w = last + 1;
  }
  return out;
}

Document ingest_text(std::string_view raw, const std::string& doc_id, const IngestOptions& options) {
  std::string decoded = text::decode_utf8(raw, options.lossy_utf8);
  std::string_view body = decoded;
  if (body.substr(0, 3) == "\xEF\xBB\xBF") body.remove_prefix(3);

  Document doc;
  doc.doc_id = doc_id;

  auto pieces = text::split(body, '\n');
  if (!pieces.empty() && pieces.back().empty()) pieces.pop_back();

  for (auto& piece : pieces) {
    if (!piece.empty() && piece.back() == '\r') piece.pop_back();
    Line line;
    line.index = doc.lines.size();
    line.first_word = doc.tokens.size();
    bool first = true;
    for (auto& raw_token : text::tokenize_line(piece)) {
      Token t;
      t.folded = text::fold(raw_token.surface);
      t.surface = std::move(raw_token.surface);
      t.word_index = doc.tokens.size();
      t.line_index = line.index;
      t.char_offset = raw_token.byte_offset;
      t.is_line_initial = first;
      first = false;
      doc.tokens.push_back(std::move(t));
    }
    line.word_count = doc.tokens.size() - line.first_word;
    line.text = std::move(piece);
    doc.lines.push_back(std::move(line));
  }

  if (doc.tokens.empty()) throw EmptyDocument(doc_id);
  return doc;
}

Document ingest_file(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Document doc = ingest_text(buf.str(), std::filesystem::path(path).stem().string(), options);
  doc.source_path = path;
  return doc;
}

std::optional<WordSpan> line_opening_match(const Document& doc, std::size_t line,
                                           const std::string& category,
                                           const EntityMatcher& matcher) {
  const Line& l = doc.lines[line];
  if (l.empty()) return std::nullopt;
  if (!text::starts_upper(doc.tokens[l.first_word].surface)) return std::nullopt;
  auto hit = matcher.longest_at(doc.tokens, l.first_word, category);
  if (!hit) return std::nullopt;
  return WordSpan{l.first_word, l.first_word + hit->length - 1};
}

namespace {

using Phrase = std::vector<std::string>;

std::vector<Phrase> compile_phrases(const std::vector<std::string>& phrases) {
  std::vector<Phrase> out;
  for (const auto& p : phrases) {
    auto toks = text::folded_tokens(p);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

bool phrase_at(const Document& doc, std::size_t w, std::size_t line_end, const Phrase& p) {
  if (w + p.size() > line_end) return false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (doc.tokens[w + k].folded != p[k]) return false;
  }
  return true;
}

bool line_starts_with_any(const Document& doc, const Line& line, const std::vector<Phrase>& phrases) {
  if (line.empty()) return false;
  const std::size_t end = line.first_word + line.word_count;
  return std::any_of(phrases.begin(), phrases.end(),
                     [&](const Phrase& p) { return phrase_at(doc, line.first_word, end, p); });
}

bool line_contains_any(const Document& doc, const Line& line, std::size_t from,
                       const std::vector<Phrase>& phrases) {
  const std::size_t end = line.first_word + line.word_count;
  for (std::size_t w = std::max(from, line.first_word); w < end; ++w) {
    for (const auto& p : phrases) {
      if (phrase_at(doc, w, end, p)) return true;
    }
  }
  return false;
}

enum class LineStart { kNone, kSection, kAvoid };

struct Block {
  UnitKind kind;
  std::size_t first_line;
  std::size_t last_line;
  std::optional<WordSpan> title;
};

bool ends_sentence(const Document& doc, const Line& line) {
  if (line.empty()) return false;
  const std::string& last = doc.tokens[line.first_word + line.word_count - 1].surface;
  return last == "." || last == "!" || last == "?" || last == "\xE2\x80\xA6";
}

}  // namespace

Document segment(Document doc, const SegmentationConfig& cfg, const EntityMatcher& matcher) {
  doc.text_units.clear();
  const std::size_t n = doc.lines.size();
  const std::size_t header_lines = cfg.header_line_count < n ? cfg.header_line_count : 0;

  const auto avoid_start = compile_phrases(cfg.avoid_start_phrases);
  const auto avoid_end = compile_phrases(cfg.avoid_end_phrases);

  std::vector<LineStart> starts(n, LineStart::kNone);
  std::vector<std::optional<WordSpan>> titles(n);
  for (std::size_t i = header_lines; i < n; ++i) {
    if (line_starts_with_any(doc, doc.lines[i], avoid_start)) {
      starts[i] = LineStart::kAvoid;
    } else if (!cfg.main_entity_category.empty()) {
      titles[i] = line_opening_match(doc, i, cfg.main_entity_category, matcher);
      if (titles[i]) starts[i] = LineStart::kSection;
    }
  }

  std::vector<Block> blocks;
  if (header_lines > 0) blocks.push_back({UnitKind::kHeader, 0, header_lines - 1, std::nullopt});

  auto split_paragraphs = [&](std::size_t first, std::size_t last) {
    if (cfg.paragraph_split == ParagraphSplit::kNone) {
      blocks.push_back({UnitKind::kParagraph, first, last, std::nullopt});
      return;
    }
    std::size_t open = first;
    for (std::size_t i = first; i <= last; ++i) {
      const Line& line = doc.lines[i];
      if (line.empty()) {
        if (i > open) blocks.push_back({UnitKind::kParagraph, open, i - 1, std::nullopt});
        open = i + 1;
      } else if (cfg.paragraph_split == ParagraphSplit::kSentence && ends_sentence(doc, line)) {
        blocks.push_back({UnitKind::kParagraph, open, i, std::nullopt});
        open = i + 1;
      }
    }
    if (open <= last) blocks.push_back({UnitKind::kParagraph, open, last, std::nullopt});
  };

  std::size_t i = header_lines;
  while (i < n) {
    if (starts[i] == LineStart::kAvoid) {
      std::size_t end = n - 1;
      for (std::size_t m = i; m < n; ++m) {
        if (m > i && starts[m] == LineStart::kSection) {
          end = m - 1;
          break;
        }
        if (!avoid_end.empty()) {
          // The opening phrase itself cannot close the block.
          std::size_t from = doc.lines[m].first_word;
          if (m == i) from += 1;
          if (line_contains_any(doc, doc.lines[m], from, avoid_end)) {
            end = m;
            break;
          }
        }
      }
      blocks.push_back({UnitKind::kAvoid, i, end, std::nullopt});
      i = end + 1;
    } else if (starts[i] == LineStart::kSection) {
      std::size_t e = i + 1;
      while (e < n && starts[e] == LineStart::kNone) ++e;
      blocks.push_back({UnitKind::kSection, i, e - 1, titles[i]});
      i = e;
    } else {
      std::size_t e = i;
      while (e < n && starts[e] == LineStart::kNone) ++e;
      split_paragraphs(i, e - 1);
      i = e;
    }
  }

  int next_id = 0;
  for (const auto& b : blocks) {
    std::optional<std::size_t> first_word;
    std::size_t last_word = 0;
    for (std::size_t l = b.first_line; l <= b.last_line; ++l) {
      const Line& line = doc.lines[l];
      if (line.empty()) continue;
      if (!first_word) first_word = line.first_word;
      last_word = line.first_word + line.word_count - 1;
    }
    if (!first_word) continue;
    TextUnit u;
    u.unit_id = next_id++;
    u.kind = b.kind;
    u.start_word = *first_word;
    u.end_word = last_word;
    u.title_span = b.title;
    doc.text_units.push_back(u);
  }
  return doc;
}

nlohmann::json to_json(const Document& doc) {
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["source_path"] = doc.source_path;
  j["metadata"] = doc.metadata;
  auto& lines = j["lines"] = nlohmann::json::array();
  for (const auto& l : doc.lines) {
    lines.push_back({{"index", l.index}, {"text", l.text}, {"first_word", l.first_word},
                     {"word_count", l.word_count}});
  }
  auto& tokens = j["tokens"] = nlohmann::json::array();
  for (const auto& t : doc.tokens) {
    tokens.push_back({{"surface", t.surface},
                      {"folded", t.folded},
                      {"word_index", t.word_index},
                      {"line_index", t.line_index},
                      {"char_offset", t.char_offset},
                      {"is_line_initial", t.is_line_initial}});
  }
  auto& units = j["text_units"] = nlohmann::json::array();
  for (const auto& u : doc.text_units) {
    nlohmann::json ju = {{"unit_id", u.unit_id},
                         {"kind", to_string(u.kind)},
                         {"start_word", u.start_word},
                         {"end_word", u.end_word}};
    ju["title_span"] = u.title_span ? nlohmann::json::array({u.title_span->start, u.title_span->end})
                                    : nlohmann::json(nullptr);
    units.push_back(std::move(ju));
  }
  return j;
}

Document document_from_json(const nlohmann::json& j) {
  Document doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  doc.source_path = j.value("source_path", "");
  if (j.contains("metadata")) doc.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  for (const auto& jl : j.at("lines")) {
    Line l;
    l.index = jl.at("index").get<std::size_t>();
    l.text = jl.at("text").get<std::string>();
    l.first_word = jl.at("first_word").get<std::size_t>();
    l.word_count = jl.at("word_count").get<std::size_t>();
    doc.lines.push_back(std::move(l));
  }
  for (const auto& jt : j.at("tokens")) {
    Token t;
    t.surface = jt.at("surface").get<std::string>();
    t.folded = jt.at("folded").get<std::string>();
    t.word_index = jt.at("word_index").get<std::size_t>();
    t.line_index = jt.at("line_index").get<std::size_t>();
    t.char_offset = jt.at("char_offset").get<std::size_t>();
    t.is_line_initial = jt.at("is_line_initial").get<bool>();
    doc.tokens.push_back(std::move(t));
  }
  for (const auto& ju : j.at("text_units")) {
    TextUnit u;
    u.unit_id = ju.at("unit_id").get<int>();
    u.kind = unit_kind_from_string(ju.at("kind").get<std::string>());
    u.start_word = ju.at("start_word").get<std::size_t>();
    u.end_word = ju.at("end_word").get<std::size_t>();
    if (!ju.at("title_span").is_null()) {
      u.title_span = WordSpan{ju.at("title_span")[0].get<std::size_t>(),
                              ju.at("title_span")[1].get<std::size_t>()};
    }
    doc.text_units.push_back(u);
  }
  return doc;
}

}  // namespace entrel
