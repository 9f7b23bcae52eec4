#ifndef ENTREL_GRAMMAR_HPP
#define ENTREL_GRAMMAR_HPP

// Finite-state local grammars: nondeterministic automata over tokens with
// literal, token-class, dictionary-reference and subgraph-call transitions.
//
// Grammar files are line oriented, '#' starts a comment:
//
//   graph date tag <DATE> </DATE>
//   state 0 initial
//   state 1
//   state 2 final
//   trans 0 1 class:NUMBER
//   trans 1 2 lit:"janvier"
//   trans 0 2 sub:numeric_date
//   entry date date
//
// Labels: lit:"..." | class:NUMBER|WORD|PUNCT|ANY | dict:<category> |
// sub:<graph> | eps. A multi-word literal consumes its whole token sequence.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entrel/corpus.hpp"
#include "entrel/dict.hpp"

namespace entrel {

enum class TokenClass { kNumber, kWord, kPunct, kAny };

bool token_in_class(const Token& token, TokenClass cls);

struct TransitionLabel {
  enum class Type { kLiteral, kClass, kDictRef, kSubgraph, kEpsilon };

  Type type = Type::kEpsilon;
  std::vector<std::string> literal;  // folded tokens
  TokenClass token_class = TokenClass::kAny;
  std::string name;  // category for kDictRef, graph for kSubgraph

  static TransitionLabel lit(std::string_view phrase);
  static TransitionLabel cls(TokenClass c);
  static TransitionLabel dict(std::string category);
  static TransitionLabel sub(std::string graph);
  static TransitionLabel eps();
};

struct Transition {
  TransitionLabel label;
  int to = 0;  // state index
};

struct Automaton {
  std::string name;
  std::vector<int> state_ids;                   // declared id of each state index
  std::vector<std::vector<Transition>> transitions;  // by state index
  std::vector<bool> finals;                     // by state index
  int initial = 0;
  std::optional<std::string> output_open;
  std::optional<std::string> output_close;

  std::size_t state_count() const { return state_ids.size(); }
  bool tagged() const { return output_open.has_value(); }
};

struct EntryPoint {
  std::string graph;
  std::string category;
};

struct GrammarSet {
  std::map<std::string, Automaton> automata;
  std::vector<EntryPoint> entry_points;

  const Automaton& at(const std::string& name) const;
};

class GrammarParser {
 public:
  // Appends one definition text. Graph names must be unique across texts.
  void add(std::string_view definition);
  // Validates cross references and returns the set. Throws SyntaxError,
  // DanglingSubgraph or NoEntryPoint.
  GrammarSet finish();

 private:
  GrammarSet set_;
  std::map<std::string, std::size_t> entry_lines_;
  std::map<std::string, std::size_t> graph_lines_;
};

GrammarSet parse_grammar(std::string_view definition);
GrammarSet load_grammars(const std::vector<std::string>& paths);

struct Capture {
  std::string open;
  std::string close;
  std::size_t start_word = 0;
  std::size_t end_word = 0;  // inclusive

  bool operator==(const Capture&) const = default;
};

struct GrammarMatch {
  std::size_t end_word = 0;  // inclusive
  std::vector<Capture> captures;
};

struct MatchOptions {
  int max_depth = 16;
};

// Longest non-empty accepting span starting at `start`. Throws RecursionLimit.
std::optional<GrammarMatch> match_at(const GrammarSet& gs, const std::string& entry,
                                     std::span<const Token> tokens, std::size_t start,
                                     const EntityMatcher& matcher, const MatchOptions& options = {});

struct GrammarMention {
  std::string category;
  std::string graph;
  WordSpan span;
  std::vector<Capture> captures;
};

// Left-to-right scan per entry point, resuming after each match.
std::vector<GrammarMention> scan(const GrammarSet& gs, const Document& doc,
                                 const EntityMatcher& matcher, const MatchOptions& options = {});

}  // namespace entrel

#endif  // ENTREL_GRAMMAR_HPP
