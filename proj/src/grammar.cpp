#include "entrel/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "entrel/error.hpp"
#include "entrel/text.hpp"

namespace entrel {

bool token_in_class(const Token& token, TokenClass cls) {
  const std::string& s = token.surface;
  switch (cls) {
    case TokenClass::kAny:
      return true;
    case TokenClass::kNumber: {
      if (s.empty() || !text::is_digit(static_cast<unsigned char>(s.front())) ||
          !text::is_digit(static_cast<unsigned char>(s.back()))) {
        return false;
      }
      int separators = 0;
      for (char c : s) {
        if (c == ',' || c == '.') {
          ++separators;
        } else if (!text::is_digit(static_cast<unsigned char>(c))) {
          return false;
        }
      }
      return separators <= 1;
    }
    case TokenClass::kWord: {
      if (s.empty()) return false;
      std::size_t i = 0;
      return text::is_letter(text::next_codepoint(s, i));
    }
    case TokenClass::kPunct: {
      if (s.empty()) return false;
      std::size_t i = 0;
      const char32_t cp = text::next_codepoint(s, i);
      return i == s.size() && (text::is_punct(cp) || text::is_hyphen(cp) || text::is_apostrophe(cp));
    }
  }
  return false;
}

TransitionLabel TransitionLabel::lit(std::string_view phrase) {
  TransitionLabel l;
  l.type = Type::kLiteral;
  l.literal = text::folded_tokens(phrase);
  return l;
}

TransitionLabel TransitionLabel::cls(TokenClass c) {
  TransitionLabel l;
  l.type = Type::kClass;
  l.token_class = c;
  return l;
}

TransitionLabel TransitionLabel::dict(std::string category) {
  TransitionLabel l;
  l.type = Type::kDictRef;
  l.name = std::move(category);
  return l;
}

TransitionLabel TransitionLabel::sub(std::string graph) {
  TransitionLabel l;
  l.type = Type::kSubgraph;
  l.name = std::move(graph);
  return l;
}

TransitionLabel TransitionLabel::eps() { return TransitionLabel{}; }

const Automaton& GrammarSet::at(const std::string& name) const {
  auto it = automata.find(name);
  if (it == automata.end()) throw DanglingSubgraph(name);
  return it->second;
}

namespace {

// Whitespace split that keeps "quoted strings" (with \" escapes) intact.
std::vector<std::string> lex_directive(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quote = false;
  bool has = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quote) {
      if (c == '\\' && i + 1 < line.size()) {
        cur.push_back(c);
        cur.push_back(line[++i]);
      } else {
        cur.push_back(c);
        if (c == '"') in_quote = false;
      }
    } else if (c == '#') {
      break;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      if (has) out.push_back(std::move(cur));
      cur.clear();
      has = false;
    } else {
      cur.push_back(c);
      has = true;
      if (c == '"') in_quote = true;
    }
  }
  if (in_quote) throw SyntaxError(line_no, "unterminated string");
  if (has) out.push_back(std::move(cur));
  return out;
}

int parse_int(const std::string& s, std::size_t line_no) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw SyntaxError(line_no, "expected a state id, got '" + s + "'");
  }
  return std::stoi(s);
}

TransitionLabel parse_label(const std::string& s, std::size_t line_no) {
  if (s == "eps") return TransitionLabel::eps();
  if (s.rfind("lit:", 0) == 0) {
    std::string body = s.substr(4);
    if (body.size() < 2 || body.front() != '"' || body.back() != '"') {
      throw SyntaxError(line_no, "literal must be quoted: " + s);
    }
    std::string unescaped;
    for (std::size_t i = 1; i + 1 < body.size(); ++i) {
      if (body[i] == '\\' && i + 2 < body.size()) ++i;
      unescaped.push_back(body[i]);
    }
    auto label = TransitionLabel::lit(unescaped);
    if (label.literal.empty()) throw SyntaxError(line_no, "empty literal");
    return label;
  }
  if (s.rfind("class:", 0) == 0) {
    const std::string c = s.substr(6);
    if (c == "NUMBER") return TransitionLabel::cls(TokenClass::kNumber);
    if (c == "WORD") return TransitionLabel::cls(TokenClass::kWord);
    if (c == "PUNCT") return TransitionLabel::cls(TokenClass::kPunct);
    if (c == "ANY") return TransitionLabel::cls(TokenClass::kAny);
    throw SyntaxError(line_no, "unknown token class '" + c + "'");
  }
  if (s.rfind("dict:", 0) == 0 && s.size() > 5) return TransitionLabel::dict(s.substr(5));
  if (s.rfind("sub:", 0) == 0 && s.size() > 4) return TransitionLabel::sub(s.substr(4));
  throw SyntaxError(line_no, "unknown transition label '" + s + "'");
}

struct PendingTransition {
  int from_id;
  int to_id;
  TransitionLabel label;
  std::size_t line_no;
};

}  // namespace

void GrammarParser::add(std::string_view definition) {
  const auto lines = text::split(definition, '\n');
  Automaton* current = nullptr;
  std::map<int, int> index_of;
  std::vector<PendingTransition> pending;
  std::size_t graph_line = 0;

  auto close_graph = [&] {
    if (!current) return;
    for (auto& p : pending) {
      auto from = index_of.find(p.from_id);
      auto to = index_of.find(p.to_id);
      if (from == index_of.end() || to == index_of.end()) {
        throw SyntaxError(p.line_no, "transition references an undeclared state");
      }
      current->transitions[from->second].push_back({std::move(p.label), to->second});
    }
    if (current->initial < 0) throw SyntaxError(graph_line, "graph '" + current->name + "' has no initial state");
    pending.clear();
    index_of.clear();
    current = nullptr;
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto words = lex_directive(lines[i], line_no);
    if (words.empty()) continue;
    const std::string& directive = words[0];

    if (directive == "graph") {
      close_graph();
      if (words.size() != 2 && !(words.size() == 5 && words[2] == "tag")) {
        throw SyntaxError(line_no, "expected 'graph <name> [tag <open> <close>]'");
      }
      if (set_.automata.count(words[1])) throw SyntaxError(line_no, "duplicate graph '" + words[1] + "'");
      Automaton a;
      a.name = words[1];
      a.initial = -1;
      if (words.size() == 5) {
        a.output_open = words[3];
        a.output_close = words[4];
      }
      current = &set_.automata.emplace(a.name, std::move(a)).first->second;
      graph_line = line_no;
      graph_lines_[current->name] = line_no;
    } else if (directive == "state") {
      if (!current) throw SyntaxError(line_no, "state outside of a graph");
      if (words.size() < 2) throw SyntaxError(line_no, "expected 'state <id> [initial] [final]'");
      const int id = parse_int(words[1], line_no);
      if (index_of.count(id)) throw SyntaxError(line_no, "duplicate state " + words[1]);
      const int idx = static_cast<int>(current->state_ids.size());
      index_of[id] = idx;
      current->state_ids.push_back(id);
      current->transitions.emplace_back();
      current->finals.push_back(false);
      for (std::size_t k = 2; k < words.size(); ++k) {
        if (words[k] == "initial") {
          if (current->initial >= 0) throw SyntaxError(line_no, "second initial state");
          current->initial = idx;
        } else if (words[k] == "final") {
          current->finals[idx] = true;
        } else {
          throw SyntaxError(line_no, "unknown state flag '" + words[k] + "'");
        }
      }
    } else if (directive == "trans") {
      if (!current) throw SyntaxError(line_no, "trans outside of a graph");
      if (words.size() != 4) throw SyntaxError(line_no, "expected 'trans <from> <to> <label>'");
      pending.push_back({parse_int(words[1], line_no), parse_int(words[2], line_no),
                         parse_label(words[3], line_no), line_no});
    } else if (directive == "entry") {
      if (words.size() != 3) throw SyntaxError(line_no, "expected 'entry <graph> <category>'");
      set_.entry_points.push_back({words[1], words[2]});
      entry_lines_[words[1]] = line_no;
    } else {
      throw SyntaxError(line_no, "unknown directive '" + directive + "'");
    }
  }
  close_graph();
}

GrammarSet GrammarParser::finish() {
  if (set_.entry_points.empty()) throw NoEntryPoint();
  for (const auto& e : set_.entry_points) {
    if (!set_.automata.count(e.graph)) {
      throw SyntaxError(entry_lines_[e.graph], "entry names unknown graph '" + e.graph + "'");
    }
  }
  for (const auto& [name, a] : set_.automata) {
    for (const auto& ts : a.transitions) {
      for (const auto& t : ts) {
        if (t.label.type == TransitionLabel::Type::kSubgraph && !set_.automata.count(t.label.name)) {
          throw DanglingSubgraph(t.label.name);
        }
      }
    }
  }
  return std::move(set_);
}

GrammarSet parse_grammar(std::string_view definition) {
  GrammarParser p;
  p.add(definition);
  return p.finish();
}

GrammarSet load_grammars(const std::vector<std::string>& paths) {
  GrammarParser p;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open grammar '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      p.add(text::decode_utf8(buf.str(), false));
    } catch (const SyntaxError& e) {
      throw Error(path + ": " + e.what());
    }
  }
  return p.finish();
}

namespace {

// Set-of-states simulation over (state, position) pairs. Positions only grow
// on consuming transitions, so the agenda is processed in position order and
// every reachable configuration is visited once. Subgraph calls are memoized
// per (graph, start) and return every position at which the callee accepts.
class Engine {
 public:
  Engine(const GrammarSet& gs, std::span<const Token> tokens, const EntityMatcher& matcher,
         const MatchOptions& options)
      : gs_(gs), tokens_(tokens), matcher_(matcher), options_(options) {}

  std::optional<GrammarMatch> match(const Automaton& root, std::size_t start) {
    if (start >= tokens_.size()) return std::nullopt;
    const Run& r = run(root, start, 0);
    if (r.ends.empty()) return std::nullopt;
    const std::size_t end = r.ends.rbegin()->first;
    if (end <= start) return std::nullopt;
    GrammarMatch m;
    m.end_word = end - 1;
    reconstruct(r, end, m.captures);
    std::sort(m.captures.begin(), m.captures.end(), [](const Capture& a, const Capture& b) {
      if (a.start_word != b.start_word) return a.start_word < b.start_word;
      return a.end_word > b.end_word;
    });
    return m;
  }

 private:
  struct Visit {
    int prev_state = -1;
    std::size_t prev_pos = 0;
    int transition = -1;
    std::size_t sub_end = 0;
  };

  struct Run {
    const Automaton* automaton = nullptr;
    std::size_t start = 0;
    std::map<std::pair<std::size_t, int>, Visit> visits;
    std::map<std::size_t, int> ends;  // end position (exclusive) -> final state reached
  };

  const Run& run(const Automaton& a, std::size_t start, int depth) {
    if (depth > options_.max_depth) throw RecursionLimit(a.name);
    const auto key = std::make_pair(&a, start);
    if (auto it = memo_.find(key); it != memo_.end()) return *it->second;

    auto r = std::make_unique<Run>();
    r->automaton = &a;
    r->start = start;
    std::map<std::size_t, std::vector<int>> agenda;
    auto add = [&](std::size_t pos, int state, Visit v) {
      if (r->visits.emplace(std::make_pair(pos, state), v).second) agenda[pos].push_back(state);
    };
    add(start, a.initial, Visit{});

    while (!agenda.empty()) {
      const std::size_t p = agenda.begin()->first;
      for (std::size_t idx = 0; idx < agenda[p].size(); ++idx) {
        const int s = agenda[p][idx];
        if (a.finals[s]) r->ends.emplace(p, s);
        const auto& ts = a.transitions[s];
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
          const Transition& t = ts[ti];
          const Visit via{s, p, static_cast<int>(ti), 0};
          switch (t.label.type) {
            case TransitionLabel::Type::kEpsilon:
              add(p, t.to, via);
              break;
            case TransitionLabel::Type::kLiteral: {
              const auto& lit = t.label.literal;
              if (p + lit.size() > tokens_.size()) break;
              bool ok = true;
              for (std::size_t k = 0; k < lit.size() && ok; ++k) ok = tokens_[p + k].folded == lit[k];
              if (ok) add(p + lit.size(), t.to, via);
              break;
            }
            case TransitionLabel::Type::kClass:
              if (p < tokens_.size() && token_in_class(tokens_[p], t.label.token_class)) add(p + 1, t.to, via);
              break;
            case TransitionLabel::Type::kDictRef:
              if (p < tokens_.size()) {
                if (auto hit = matcher_.longest_at(tokens_, p, t.label.name)) add(p + hit->length, t.to, via);
              }
              break;
            case TransitionLabel::Type::kSubgraph: {
              const Run& sub = run(gs_.at(t.label.name), p, depth + 1);
              for (const auto& [end, final_state] : sub.ends) {
                Visit v = via;
                v.sub_end = end;
                add(end, t.to, v);
              }
              break;
            }
          }
        }
      }
      agenda.erase(p);
    }

    const Run& out = *r;
    memo_.emplace(key, std::move(r));
    return out;
  }

  void reconstruct(const Run& r, std::size_t end, std::vector<Capture>& out) const {
    const Automaton& a = *r.automaton;
    if (a.tagged() && end > r.start) out.push_back({*a.output_open, *a.output_close, r.start, end - 1});
    int state = r.ends.at(end);
    std::size_t pos = end;
    while (true) {
      const Visit& v = r.visits.at({pos, state});
      if (v.prev_state < 0) break;
      const Transition& t = a.transitions[v.prev_state][v.transition];
      if (t.label.type == TransitionLabel::Type::kSubgraph) {
        const Run& sub = *memo_.at({&gs_.at(t.label.name), v.prev_pos});
        reconstruct(sub, v.sub_end, out);
      }
      state = v.prev_state;
      pos = v.prev_pos;
    }
  }

  const GrammarSet& gs_;
  std::span<const Token> tokens_;
  const EntityMatcher& matcher_;
  MatchOptions options_;
  std::map<std::pair<const Automaton*, std::size_t>, std::unique_ptr<Run>> memo_;
};

}  // namespace

std::optional<GrammarMatch> match_at(const GrammarSet& gs, const std::string& entry,
                                     std::span<const Token> tokens, std::size_t start,
                                     const EntityMatcher& matcher, const MatchOptions& options) {
  Engine engine(gs, tokens, matcher, options);
  return engine.match(gs.at(entry), start);
}

std::vector<GrammarMention> scan(const GrammarSet& gs, const Document& doc,
                                 const EntityMatcher& matcher, const MatchOptions& options) {
  std::vector<GrammarMention> out;
  for (const auto& ep : gs.entry_points) {
    const Automaton& root = gs.at(ep.graph);
    Engine engine(gs, doc.tokens, matcher, options);
    std::size_t pos = 0;
    while (pos < doc.tokens.size()) {
      if (auto m = engine.match(root, pos)) {
        out.push_back({ep.category, ep.graph, WordSpan{pos, m->end_word}, std::move(m->captures)});
        pos = m->end_word + 1;
      } else {
        ++pos;
      }
    }
  }
  return out;
}

}  // namespace entrel
