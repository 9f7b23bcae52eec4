#ifndef ENTREL_RELATE_HPP
#define ENTREL_RELATE_HPP

// Cooccurrence-based relation extraction.
//
// Positions are mention start words. Three scopes are supported:
//   text unit   both mentions in one unit; with h1 the target sits in the
//               unit's title, with h3 AVOID units are skipped
//   window      P_target - left <= P_partner <= P_target + right
//   constrained one of the above plus a marker strictly between the two
//               mentions and no farther from the target than the partner is
// h2 copies header mentions of the configured categories into each
// relation's context.

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "entrel/corpus.hpp"
#include "entrel/dict.hpp"
#include "entrel/grammar.hpp"
#include "entrel/ner.hpp"

namespace entrel {

enum class CoocMode { kTextUnit, kWindow, kConstrained };

CoocMode cooc_mode_from_string(std::string_view s);

// nullopt is an unbounded side (to the document start or end).
using WindowBound = std::optional<std::size_t>;

struct CoocConfig {
  CoocMode mode = CoocMode::kTextUnit;
  // Scope underlying a constrained run.
  CoocMode constrained_scope = CoocMode::kTextUnit;
  std::string target_category;
  std::vector<std::string> partner_categories;
  WindowBound window_left = std::nullopt;
  WindowBound window_right = std::nullopt;
  std::vector<std::string> markers;
  bool h1 = true;
  bool h2 = false;
  bool h3 = true;
  std::vector<std::string> header_categories;

  // Throws ConfigError.
  void validate() const;
  bool is_partner(const std::string& category) const;
};

struct RelationInstance {
  std::string doc_id;
  EntityMention first;
  EntityMention second;
  std::string relation_type;
  std::optional<int> evidence_unit;
  std::map<std::string, std::string> context;

  bool operator==(const RelationInstance&) const = default;
};

std::vector<RelationInstance> cooc_text_unit(const Document& doc, const std::vector<EntityMention>& mentions,
                                             const CoocConfig& cfg);
std::vector<RelationInstance> cooc_window(const Document& doc, const std::vector<EntityMention>& mentions,
                                          const CoocConfig& cfg);
std::vector<RelationInstance> cooc_constrained(const Document& doc, const std::vector<EntityMention>& mentions,
                                               const CoocConfig& cfg);

// Start positions of every occurrence of any marker phrase.
std::vector<std::size_t> marker_positions(const Document& doc, const std::vector<std::string>& markers);

// Dispatches on cfg.mode, falls back to paragraph scopes without h1 when the
// document has no sections, drops self relations and deduplicates on
// (relation_type, first canonical, second canonical, evidence unit).
std::vector<RelationInstance> extract_relations(const Document& doc, const std::vector<EntityMention>& mentions,
                                                const CoocConfig& cfg);

struct Paragraph {
  std::size_t first_line = 0;
  std::size_t last_line = 0;
  // Opening match of the category, absent for a leading untitled paragraph.
  std::optional<WordSpan> opening;
};

// Splits lines [first_line, last_line] before every line that opens with an
// uppercase-initial match of `category`. The pieces partition the range.
std::vector<Paragraph> transform_paragraphs(const Document& doc, std::size_t first_line, std::size_t last_line,
                                            const std::string& category, const EntityMatcher& matcher);

// Nested paragraph analysis on tags[0] then tags[1]; every tags[2] mention in
// an inner paragraph yields one relation binding the two opening values, with
// context[tags[2]] set. Throws ArityUnsupported unless exactly 3 tags.
std::vector<RelationInstance> extract_contextual(const Document& doc, const std::vector<std::string>& tags,
                                                 const EntityMatcher& matcher, const GrammarSet* grammars);

void write_relations_csv(std::ostream& out, const std::vector<RelationInstance>& relations);
std::vector<RelationInstance> read_relations_csv(std::istream& in);

nlohmann::json relations_to_json(const std::vector<RelationInstance>& relations);
std::vector<RelationInstance> relations_from_json(const nlohmann::json& j);

}  // namespace entrel

#endif  // ENTREL_RELATE_HPP
