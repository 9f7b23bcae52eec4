#ifndef ENTREL_NER_HPP
#define ENTREL_NER_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "entrel/corpus.hpp"
#include "entrel/dict.hpp"
#include "entrel/grammar.hpp"

namespace entrel {

enum class MentionSource { kDictionary, kGrammar };

std::string_view to_string(MentionSource s);
MentionSource mention_source_from_string(std::string_view s);

struct EntityMention {
  std::string doc_id;
  std::string category;
  std::string canonical;
  std::string surface;
  WordSpan span;
  MentionSource source = MentionSource::kDictionary;
  std::vector<Capture> captures;
  std::optional<int> text_unit;

  std::size_t length() const { return span.end - span.start + 1; }
  bool operator==(const EntityMention&) const = default;
};

// Dictionary hits plus grammar scans, overlap-resolved and sorted by
// (start_word, descending length).
std::vector<EntityMention> extract_entities(const Document& doc, const EntityMatcher& matcher,
                                            const GrammarSet* grammars);

// Drops every mention strictly contained in another one (category-blind) and
// exact duplicates. Partial overlaps and equal spans survive.
std::vector<EntityMention> resolve_overlaps(std::vector<EntityMention> mentions);

// Canonical ordering: start asc, length desc, then category, canonical, source.
void sort_mentions(std::vector<EntityMention>& mentions);

// CSV: doc_id,category,canonical,start_word,end_word,surface,source
void write_mentions_csv(std::ostream& out, const std::vector<EntityMention>& mentions);
std::vector<EntityMention> read_mentions_csv(std::istream& in);

nlohmann::json to_json(const EntityMention& m);
EntityMention mention_from_json(const nlohmann::json& j);

}  // namespace entrel

#endif  // ENTREL_NER_HPP
