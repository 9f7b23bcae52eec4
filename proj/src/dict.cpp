#include "entrel/dict.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "entrel/error.hpp"
#include "entrel/text.hpp"

namespace entrel {

const DictionaryEntry* Dictionary::find(std::string_view canonical) const {
  for (const auto& e : entries) {
    if (e.canonical == canonical) return &e;
  }
  return nullptr;
}

Dictionary parse_dictionary(std::span<const std::string> lines, const std::string& category) {
  Dictionary dict;
  dict.category = category;
  std::set<std::string> seen;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view raw = lines[i];
    if (i == 0 && raw.substr(0, 3) == "\xEF\xBB\xBF") raw.remove_prefix(3);
    const std::string line = text::trim(raw);
    if (line.empty()) continue;
    const std::size_t line_no = i + 1;

    auto fields = text::split(line, ':');
    if (fields.size() > 1 && text::trim(fields.back()).empty()) fields.pop_back();
    for (auto& f : fields) f = text::trim(f);
    if (fields.size() < 2) throw FormatError(line_no, "expected 'canonical:N|L:variants...'");
    if (fields[0].empty()) throw FormatError(line_no, "empty canonical name");

    DictionaryEntry entry;
    entry.canonical = fields[0];
    if (fields[1] == "N") {
      entry.kind = EntryKind::kNode;
    } else if (fields[1] == "L") {
      entry.kind = EntryKind::kLeaf;
    } else {
      throw FormatError(line_no, "kind label must be N or L, got '" + fields[1] + "'");
    }
    for (std::size_t k = 2; k < fields.size(); ++k) {
      if (!fields[k].empty()) entry.variants.push_back(fields[k]);
    }
    if (entry.variants.empty()) entry.variants.push_back(entry.canonical);

    if (!seen.insert(entry.canonical).second) throw DuplicateCanonical(entry.canonical);
    dict.entries.push_back(std::move(entry));
  }

  // A leaf hangs under the first node listing its canonical among the variants.
  for (auto& leaf : dict.entries) {
    if (leaf.kind != EntryKind::kLeaf) continue;
    const std::string key = text::fold(leaf.canonical);
    for (const auto& node : dict.entries) {
      if (node.kind != EntryKind::kNode) continue;
      bool listed = false;
      for (const auto& v : node.variants) {
        if (text::fold(v) == key) {
          listed = true;
          break;
        }
      }
      if (listed) {
        leaf.parent = node.canonical;
        break;
      }
    }
  }
  return dict;
}

Dictionary parse_dictionary_text(std::string_view text, const std::string& category) {
  auto lines = text::split(text, '\n');
  return parse_dictionary(lines, category);
}

Dictionary load_dictionary(const std::string& path, const std::string& category) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dictionary '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dictionary_text(text::decode_utf8(buf.str(), false), category);
}

std::string serialize_dictionary(const Dictionary& dict) {
  std::string out;
  for (const auto& e : dict.entries) {
    out += e.canonical;
    out += e.kind == EntryKind::kNode ? ":N:" : ":L:";
    for (const auto& v : e.variants) {
      out += v;
      out += ':';
    }
    out += '\n';
  }
  return out;
}

std::vector<DictionaryStats> stats(std::span<const Dictionary> dicts) {
  std::vector<DictionaryStats> out;
  for (const auto& d : dicts) {
    DictionaryStats s;
    s.category = d.category;
    for (const auto& e : d.entries) {
      ++s.entries;
      if (e.kind == EntryKind::kLeaf) {
        ++s.leafs;
      } else {
        ++s.concepts;
      }
      s.lexemes += e.variants.size();
    }
    out.push_back(s);
  }
  return out;
}

EntityMatcher::EntityMatcher() : nodes_(1) {}

EntityMatcher EntityMatcher::compile(std::span<const Dictionary> dicts) {
  EntityMatcher m;
  for (const auto& d : dicts) {
    for (const auto& e : d.entries) {
      m.insert(text::folded_tokens(e.canonical), d.category, e.canonical);
      for (const auto& v : e.variants) m.insert(text::folded_tokens(v), d.category, e.canonical);
    }
  }
  return m;
}

void EntityMatcher::insert(const std::vector<std::string>& key, const std::string& category,
                           const std::string& canonical) {
  if (key.empty()) return;
  std::uint32_t node = 0;
  for (const auto& tok : key) {
    auto it = nodes_[node].next.find(tok);
    if (it == nodes_[node].next.end()) {
      const auto id = static_cast<std::uint32_t>(nodes_.size());
      nodes_[node].next.emplace(tok, id);
      nodes_.emplace_back();
      node = id;
    } else {
      node = it->second;
    }
  }
  auto& hits = nodes_[node].hits;
  auto it = hits.find(category);
  if (it == hits.end()) {
    hits.emplace(category, canonical);
    ++pattern_count_;
    return;
  }
  // Same variant under two canonicals of one category: longest canonical,
  // then lexicographically smallest.
  const std::size_t old_len = text::codepoint_count(it->second);
  const std::size_t new_len = text::codepoint_count(canonical);
  if (new_len > old_len || (new_len == old_len && canonical < it->second)) it->second = canonical;
}

std::vector<DictHit> EntityMatcher::longest_at(std::span<const Token> tokens, std::size_t start) const {
  std::uint32_t node = 0;
  std::uint32_t best = 0;
  std::size_t best_len = 0;
  for (std::size_t k = start; k < tokens.size(); ++k) {
    auto it = nodes_[node].next.find(tokens[k].folded);
    if (it == nodes_[node].next.end()) break;
    node = it->second;
    if (!nodes_[node].hits.empty()) {
      best = node;
      best_len = k - start + 1;
    }
  }
  std::vector<DictHit> out;
  if (best_len == 0) return out;
  for (const auto& [cat, canon] : nodes_[best].hits) out.push_back({cat, canon, best_len});
  return out;
}

std::optional<DictHit> EntityMatcher::longest_at(std::span<const Token> tokens, std::size_t start,
                                                 std::string_view category) const {
  std::uint32_t node = 0;
  std::optional<DictHit> best;
  for (std::size_t k = start; k < tokens.size(); ++k) {
    auto it = nodes_[node].next.find(tokens[k].folded);
    if (it == nodes_[node].next.end()) break;
    node = it->second;
    auto hit = nodes_[node].hits.find(std::string(category));
    if (hit != nodes_[node].hits.end()) best = DictHit{hit->first, hit->second, k - start + 1};
  }
  return best;
}

std::vector<DictMatch> EntityMatcher::find_all(std::span<const Token> tokens) const {
  std::vector<DictMatch> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (auto& h : longest_at(tokens, i)) out.push_back({i, std::move(h)});
  }
  return out;
}

}  // namespace entrel
