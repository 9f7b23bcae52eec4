#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "entrel/text.hpp"

namespace testsupport {

using namespace entrel;

std::string source_path(const std::string& rel) { return std::string(ENTREL_SOURCE_DIR) + "/" + rel; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<PairKey> pair_set(const std::vector<RelationInstance>& rels) {
  std::set<PairKey> out;
  for (const auto& r : rels) {
    out.emplace(r.first.span.start, r.first.canonical, r.second.span.start, r.second.category, r.second.canonical);
  }
  return out;
}

namespace {

const TextUnit* unit_scan(const Document& doc, std::size_t w) {
  for (const auto& u : doc.text_units) {
    if (w >= u.start_word && w <= u.end_word) return &u;
  }
  return nullptr;
}

bool avoid_at(const Document& doc, std::size_t w) {
  const TextUnit* u = unit_scan(doc, w);
  return u && u->kind == UnitKind::kAvoid;
}

bool partner_ok(const CoocConfig& cfg, const std::string& c) {
  for (const auto& p : cfg.partner_categories) {
    if (p == c) return true;
  }
  return false;
}

bool same(const EntityMention& a, const EntityMention& b) {
  return a.span.start == b.span.start && a.span.end == b.span.end && a.category == b.category &&
         a.canonical == b.canonical;
}

}  // namespace

std::set<PairKey> window_oracle(const Document& doc, const std::vector<EntityMention>& mentions,
                                const CoocConfig& cfg) {
  std::set<PairKey> out;
  const long long inf = std::numeric_limits<long long>::max() / 4;
  for (const auto& ei : mentions) {
    if (ei.category != cfg.target_category) continue;
    for (const auto& ej : mentions) {
      if (!partner_ok(cfg, ej.category) || same(ei, ej)) continue;
      if (cfg.h3 && (avoid_at(doc, ei.span.start) || avoid_at(doc, ej.span.start))) continue;
      const long long pi = static_cast<long long>(ei.span.start);
      const long long pj = static_cast<long long>(ej.span.start);
      const long long lo = cfg.window_left ? pi - static_cast<long long>(*cfg.window_left) : -inf;
      const long long hi = cfg.window_right ? pi + static_cast<long long>(*cfg.window_right) : inf;
      if (lo <= pj && pj <= hi) out.emplace(ei.span.start, ei.canonical, ej.span.start, ej.category, ej.canonical);
    }
  }
  return out;
}

std::set<PairKey> text_unit_oracle(const Document& doc, const std::vector<EntityMention>& mentions,
                                   const CoocConfig& cfg) {
  std::set<PairKey> out;
  for (const auto& ei : mentions) {
    if (ei.category != cfg.target_category) continue;
    for (const auto& ej : mentions) {
      if (!partner_ok(cfg, ej.category) || same(ei, ej)) continue;
      const TextUnit* uj = unit_scan(doc, ej.span.start);
      if (!uj) continue;
      if (cfg.h3 && uj->kind == UnitKind::kAvoid) continue;
      bool ok = false;
      if (cfg.h1) {
        const TextUnit* titled = uj->title_span ? uj : nullptr;
        if (!titled && uj->kind == UnitKind::kAvoid) {
          for (const auto& u : doc.text_units) {
            if (u.start_word < uj->start_word && u.kind == UnitKind::kSection) titled = &u;
          }
        }
        ok = titled && ei.span.start >= titled->title_span->start && ei.span.start <= titled->title_span->end;
      } else {
        ok = unit_scan(doc, ei.span.start) == uj;
      }
      if (ok) out.emplace(ei.span.start, ei.canonical, ej.span.start, ej.category, ej.canonical);
    }
  }
  return out;
}

std::set<PairKey> constrained_oracle(const Document& doc, const std::vector<EntityMention>& mentions,
                                     const CoocConfig& cfg) {
  const auto base = cfg.constrained_scope == CoocMode::kWindow ? window_oracle(doc, mentions, cfg)
                                                                : text_unit_oracle(doc, mentions, cfg);
  std::vector<long long> marks;
  for (std::size_t w = 0; w < doc.tokens.size(); ++w) {
    for (const auto& m : cfg.markers) {
      const auto ft = text::folded_tokens(m);
      if (ft.empty() || w + ft.size() > doc.tokens.size()) continue;
      bool eq = true;
      for (std::size_t k = 0; k < ft.size(); ++k) eq = eq && doc.tokens[w + k].folded == ft[k];
      if (eq) marks.push_back(static_cast<long long>(w));
    }
  }
  std::set<PairKey> out;
  for (const auto& key : base) {
    const long long pi = static_cast<long long>(std::get<0>(key));
    const long long pj = static_cast<long long>(std::get<2>(key));
    for (long long pk : marks) {
      if (std::min(pi, pj) < pk && pk < std::max(pi, pj) && std::llabs(pi - pk) <= std::llabs(pi - pj)) {
        out.insert(key);
        break;
      }
    }
  }
  return out;
}

RandomDoc random_document(std::mt19937& rng, std::size_t max_tokens, std::size_t max_mentions) {
  static const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "contre", "sur",
                                                 "entre", "omega", "kappa", "sigma"};
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::size_t budget = 1 + pick(max_tokens);
  std::string text;
  while (budget > 0) {
    std::size_t len = std::min<std::size_t>(budget, pick(12));
    std::vector<std::string> words;
    const std::size_t r = pick(10);
    if (len > 0 && r == 0) words.push_back("Titre");
    if (len > 0 && r == 1) words.push_back("Evitez");
    while (words.size() < len) words.push_back(vocab[pick(vocab.size())]);
    budget -= len;
    text += text::join(words, " ") + "\n";
  }
  if (text.find_first_not_of(" \n") == std::string::npos) text = "alpha\n";

  RandomDoc rd;
  rd.doc = ingest_text(text, "rand");
  const std::vector<std::string> lines = {"Titre:L:Titre:"};
  const Dictionary d = parse_dictionary(lines, "T");
  const auto matcher = EntityMatcher::compile(std::span<const Dictionary>(&d, 1));
  SegmentationConfig seg;
  seg.header_line_count = pick(3);
  seg.main_entity_category = "T";
  seg.avoid_start_phrases = {"evitez"};
  if (pick(2)) seg.avoid_end_phrases = {"omega"};
  rd.doc = segment(std::move(rd.doc), seg, matcher);

  const std::size_t n = rd.doc.tokens.size();
  const std::vector<std::string> cats = {"T", "P", "Q"};
  const std::vector<std::string> canon = {"c1", "c2", "c3", "c4"};
  const std::size_t count = pick(max_mentions + 1);
  for (std::size_t i = 0; i < count; ++i) {
    EntityMention m;
    m.doc_id = "rand";
    std::size_t start = pick(n);
    // Bias targets towards title words so h1 has something to find.
    if (pick(2) == 0) {
      for (std::size_t w = 0; w < n; ++w) {
        if (rd.doc.tokens[w].surface == "Titre" && pick(3) == 0) start = w;
      }
      m.category = "T";
    } else {
      m.category = cats[pick(cats.size())];
    }
    m.span = {start, std::min(n - 1, start + pick(3))};
    m.canonical = canon[pick(canon.size())];
    m.surface = rd.doc.span_text(m.span.start, m.span.end);
    rd.mentions.push_back(std::move(m));
  }
  return rd;
}

namespace {

struct DfsOracle {
  const GrammarSet& gs;
  const std::vector<Token>& tokens;
  const EntityMatcher& matcher;

  std::set<std::size_t> call(const std::string& graph, std::size_t pos, int depth) {
    const Automaton& a = gs.at(graph);
    std::set<std::size_t> ends;
    std::set<std::pair<int, std::size_t>> on_path;
    walk(a, a.initial, pos, depth, on_path, ends);
    return ends;
  }

  void walk(const Automaton& a, int state, std::size_t pos, int depth, std::set<std::pair<int, std::size_t>>& on_path,
            std::set<std::size_t>& ends) {
    if (!on_path.insert({state, pos}).second) return;
    if (a.finals[static_cast<std::size_t>(state)]) ends.insert(pos);
    for (const auto& t : a.transitions[static_cast<std::size_t>(state)]) {
      const auto& l = t.label;
      switch (l.type) {
        case TransitionLabel::Type::kEpsilon:
          walk(a, t.to, pos, depth, on_path, ends);
          break;
        case TransitionLabel::Type::kLiteral: {
          bool ok = pos + l.literal.size() <= tokens.size();
          for (std::size_t k = 0; ok && k < l.literal.size(); ++k) ok = tokens[pos + k].folded == l.literal[k];
          if (ok) walk(a, t.to, pos + l.literal.size(), depth, on_path, ends);
          break;
        }
        case TransitionLabel::Type::kClass:
          if (pos < tokens.size() && token_in_class(tokens[pos], l.token_class)) {
            walk(a, t.to, pos + 1, depth, on_path, ends);
          }
          break;
        case TransitionLabel::Type::kDictRef:
          if (pos < tokens.size()) {
            if (auto hit = matcher.longest_at(tokens, pos, l.name)) walk(a, t.to, pos + hit->length, depth, on_path, ends);
          }
          break;
        case TransitionLabel::Type::kSubgraph:
          for (std::size_t e : call(l.name, pos, depth + 1)) walk(a, t.to, e, depth, on_path, ends);
          break;
      }
    }
    on_path.erase({state, pos});
  }
};

}  // namespace

std::optional<std::size_t> grammar_oracle(const GrammarSet& gs, const std::string& entry,
                                          const std::vector<Token>& tokens, std::size_t start,
                                          const EntityMatcher& matcher) {
  DfsOracle o{gs, tokens, matcher};
  const auto ends = o.call(entry, start, 0);
  if (ends.empty() || *ends.rbegin() <= start) return std::nullopt;
  return *ends.rbegin() - 1;
}

std::set<ScanKey> scan_oracle(const GrammarSet& gs, const Document& doc, const EntityMatcher& matcher) {
  std::set<ScanKey> out;
  for (const auto& ep : gs.entry_points) {
    std::size_t pos = 0;
    while (pos < doc.tokens.size()) {
      if (auto e = grammar_oracle(gs, ep.graph, doc.tokens, pos, matcher)) {
        out.emplace(ep.category, pos, *e);
        pos = *e + 1;
      } else {
        ++pos;
      }
    }
  }
  return out;
}

std::vector<VariantHit> variant_scan_oracle(const std::vector<Dictionary>& dicts, const std::vector<Token>& tokens) {
  std::vector<VariantHit> out;
  for (std::size_t s = 0; s < tokens.size(); ++s) {
    std::size_t best = 0;
    std::map<std::string, std::string> hits;  // category -> canonical
    for (const auto& d : dicts) {
      for (const auto& e : d.entries) {
        for (const auto& v : e.variants) {
          const auto ft = text::folded_tokens(v);
          if (ft.empty() || s + ft.size() > tokens.size()) continue;
          bool eq = true;
          for (std::size_t k = 0; k < ft.size() && eq; ++k) eq = tokens[s + k].folded == ft[k];
          if (!eq) continue;
          if (ft.size() > best) {
            best = ft.size();
            hits.clear();
          }
          if (ft.size() < best) continue;
          auto it = hits.find(d.category);
          if (it == hits.end()) {
            hits.emplace(d.category, e.canonical);
          } else {
            const auto a = text::codepoint_count(e.canonical);
            const auto b = text::codepoint_count(it->second);
            if (a > b || (a == b && e.canonical < it->second)) it->second = e.canonical;
          }
        }
      }
    }
    for (const auto& [cat, canon] : hits) out.push_back({s, best, cat, canon});
  }
  return out;
}

std::vector<std::size_t> venn_oracle(const RelationStore& store, const std::vector<std::string>& targets,
                                     const std::vector<std::string>& categories) {
  auto norm = [](const std::string& s) { return text::join(text::folded_tokens(s), " "); };
  std::set<std::pair<std::string, std::string>> partners;
  for (const auto& r : store.rows()) {
    const bool cat_ok = categories.empty() ||
                        std::find(categories.begin(), categories.end(), r.second.category) != categories.end();
    if (cat_ok) partners.emplace(r.second.category, norm(r.second.canonical));
  }
  auto linked = [&](const std::string& t, const std::pair<std::string, std::string>& p) {
    for (const auto& r : store.rows()) {
      if (norm(r.first.canonical) == norm(t) && r.second.category == p.first && norm(r.second.canonical) == p.second) {
        return true;
      }
    }
    return false;
  };
  const std::size_t n = targets.size();
  std::vector<std::size_t> out;
  for (std::size_t mask = 1; mask < (1u << n); ++mask) {
    std::size_t c = 0;
    for (const auto& p : partners) {
      bool ok = true;
      for (std::size_t t = 0; t < n && ok; ++t) ok = linked(targets[t], p) == bool(mask & (1u << t));
      c += ok;
    }
    out.push_back(c);
  }
  return out;
}

double permutation_p(const std::vector<double>& a, const std::vector<double>& b, PermStat stat,
                     std::size_t resamples, std::uint64_t seed) {
  // Pooled values stay sorted; only the group labels are shuffled.
  std::vector<std::pair<double, int>> pooled;
  for (double v : a) pooled.emplace_back(v, 1);
  for (double v : b) pooled.emplace_back(v, 0);
  std::sort(pooled.begin(), pooled.end());
  const std::size_t n = pooled.size();
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  std::vector<double> values(n), midrank(n);
  std::vector<bool> group_end(n, false);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    for (std::size_t k = i; k < j; ++k) midrank[k] = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    group_end[j - 1] = true;
    i = j;
  }
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = pooled[i].first;
    labels[i] = pooled[i].second;
  }

  auto statistic = [&](const std::vector<int>& lab) {
    switch (stat) {
      case PermStat::kKs: {
        double ca = 0, cb = 0, d = 0;
        for (std::size_t i = 0; i < n; ++i) {
          (lab[i] ? ca : cb) += 1;
          if (group_end[i]) d = std::max(d, std::abs(ca / n1 - cb / n2));
        }
        return d;
      }
      case PermStat::kRankSum: {
        double r = 0;
        for (std::size_t i = 0; i < n; ++i) r += lab[i] ? midrank[i] : 0.0;
        return std::abs(r - n1 * (n1 + 1) / 2 - n1 * n2 / 2);
      }
      case PermStat::kWelch: {
        double sa = 0, sb = 0, qa = 0, qb = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (lab[i]) {
            sa += values[i];
            qa += values[i] * values[i];
          } else {
            sb += values[i];
            qb += values[i] * values[i];
          }
        }
        const double ma = sa / n1, mb = sb / n2;
        const double va = (qa - n1 * ma * ma) / (n1 - 1), vb = (qb - n2 * mb * mb) / (n2 - 1);
        const double se = std::sqrt(std::max(0.0, va / n1 + vb / n2));
        if (se == 0) return ma == mb ? 0.0 : std::numeric_limits<double>::infinity();
        return std::abs(ma - mb) / se;
      }
    }
    return 0.0;
  };

  const double observed = statistic(labels);
  std::mt19937_64 rng(seed);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    std::shuffle(labels.begin(), labels.end(), rng);
    if (statistic(labels) >= observed - 1e-9 * std::max(1.0, observed)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(resamples);
}

}  // namespace testsupport
