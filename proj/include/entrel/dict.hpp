#ifndef ENTREL_DICT_HPP
#define ENTREL_DICT_HPP

// Hierarchical colon-delimited dictionaries and the compiled longest-match
// entity matcher built from them.
//
// File format, one entry per line:
//
//   blé:N:blé:BLE:blés:Triticum:blé dur:blé tendre:
//   blé dur:L:BLE DUR:T. durum:Triticum durum:bles durs:blés durs:blé dur:
//
// The first field is the canonical name, the second the kind (N node, L leaf),
// the rest are lexical variants. A trailing ':' is allowed.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "entrel/corpus.hpp"

namespace entrel {

enum class EntryKind { kNode, kLeaf };

struct DictionaryEntry {
  std::string canonical;
  EntryKind kind = EntryKind::kLeaf;
  std::vector<std::string> variants;
  std::optional<std::string> parent;  // leaves only

  bool operator==(const DictionaryEntry&) const = default;
};

struct Dictionary {
  std::string category;
  std::vector<DictionaryEntry> entries;

  const DictionaryEntry* find(std::string_view canonical) const;
};

// Throws FormatError or DuplicateCanonical.
Dictionary parse_dictionary(std::span<const std::string> lines, const std::string& category);
Dictionary parse_dictionary_text(std::string_view text, const std::string& category);
Dictionary load_dictionary(const std::string& path, const std::string& category);

// Inverse of parse_dictionary, one line per entry with a trailing ':'.
std::string serialize_dictionary(const Dictionary& dict);

struct DictionaryStats {
  std::string category;
  std::size_t entries = 0;
  std::size_t leafs = 0;
  std::size_t concepts = 0;
  std::size_t lexemes = 0;
};

std::vector<DictionaryStats> stats(std::span<const Dictionary> dicts);

struct DictHit {
  std::string category;
  std::string canonical;
  std::size_t length = 0;  // tokens consumed

  bool operator==(const DictHit&) const = default;
};

struct DictMatch {
  std::size_t start = 0;  // word index
  DictHit hit;
};

class EntityMatcher {
 public:
  EntityMatcher();

  static EntityMatcher compile(std::span<const Dictionary> dicts);

  // Hits of maximal length starting at `start`, one per category that has a
  // variant of that length. Empty if nothing matches.
  std::vector<DictHit> longest_at(std::span<const Token> tokens, std::size_t start) const;

  // Longest hit of one category at `start`.
  std::optional<DictHit> longest_at(std::span<const Token> tokens, std::size_t start,
                                    std::string_view category) const;

  // Longest hits at every position, in position order.
  std::vector<DictMatch> find_all(std::span<const Token> tokens) const;

  bool empty() const { return pattern_count_ == 0; }
  std::size_t pattern_count() const { return pattern_count_; }

 private:
  struct Node {
    std::unordered_map<std::string, std::uint32_t> next;
    std::map<std::string, std::string> hits;  // category -> canonical
  };

  void insert(const std::vector<std::string>& key, const std::string& category,
              const std::string& canonical);

  std::vector<Node> nodes_;
  std::size_t pattern_count_ = 0;
};

}  // namespace entrel

#endif  // ENTREL_DICT_HPP
