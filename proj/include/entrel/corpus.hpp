#ifndef ENTREL_CORPUS_HPP
#define ENTREL_CORPUS_HPP

// Document model: lines, tokens with global word indices, and text units
// produced by the architecture heuristics (header, title-led sections, avoid
// blocks, plain paragraphs).

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace entrel {

class EntityMatcher;

struct Token {
  std::string surface;
  std::string folded;
  std::size_t word_index = 0;
  std::size_t line_index = 0;
  std::size_t char_offset = 0;  // byte offset into the line text
  bool is_line_initial = false;

  bool operator==(const Token&) const = default;
};

struct Line {
  std::size_t index = 0;
  std::string text;
  std::size_t first_word = 0;
  std::size_t word_count = 0;

  bool empty() const { return word_count == 0; }
  bool operator==(const Line&) const = default;
};

enum class UnitKind { kHeader, kSection, kParagraph, kAvoid };

std::string_view to_string(UnitKind kind);
UnitKind unit_kind_from_string(std::string_view s);

struct WordSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive

  bool contains(std::size_t w) const { return w >= start && w <= end; }
  auto operator<=>(const WordSpan&) const = default;
};

struct TextUnit {
  int unit_id = 0;
  UnitKind kind = UnitKind::kParagraph;
  std::size_t start_word = 0;
  std::size_t end_word = 0;  // inclusive
  std::optional<WordSpan> title_span;

  bool contains(std::size_t w) const { return w >= start_word && w <= end_word; }
  bool operator==(const TextUnit&) const = default;
};

struct Document {
  std::string doc_id;
  std::string source_path;
  std::vector<Line> lines;
  std::vector<Token> tokens;
  std::vector<TextUnit> text_units;
  std::map<std::string, std::string> metadata;

  // Unit holding word `w`, or nullptr.
  const TextUnit* unit_of(std::size_t w) const;
  const TextUnit* unit_by_id(int id) const;

  // Original text covered by a word span. Pieces on different lines are
  // joined with a single space.
  std::string span_text(std::size_t start_word, std::size_t end_word) const;

  bool operator==(const Document&) const = default;
};

struct IngestOptions {
  bool lossy_utf8 = false;
};

// Throws EncodingError (strict mode) or EmptyDocument.
Document ingest_text(std::string_view raw, const std::string& doc_id,
                     const IngestOptions& options = {});
Document ingest_file(const std::string& path, const IngestOptions& options = {});

enum class ParagraphSplit { kBlankLine, kSentence, kNone };

ParagraphSplit paragraph_split_from_string(std::string_view s);

struct SegmentationConfig {
  std::size_t header_line_count = 10;
  std::string main_entity_category;
  std::vector<std::string> avoid_start_phrases;
  std::vector<std::string> avoid_end_phrases;
  ParagraphSplit paragraph_split = ParagraphSplit::kBlankLine;
};

// Span of the main-entity match opening line `line`, if that line starts with
// an uppercase-initial dictionary match of `category` (longest match).
std::optional<WordSpan> line_opening_match(const Document& doc, std::size_t line,
                                           const std::string& category,
                                           const EntityMatcher& matcher);

// Recomputes doc.text_units from scratch; existing units are discarded.
Document segment(Document doc, const SegmentationConfig& cfg, const EntityMatcher& matcher);

nlohmann::json to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);

}  // namespace entrel

#endif  // ENTREL_CORPUS_HPP
