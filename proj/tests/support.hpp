#ifndef ENTREL_TESTS_SUPPORT_HPP
#define ENTREL_TESTS_SUPPORT_HPP

// Brute-force oracles and random generators shared by the unit and
// acceptance suites. Oracles deliberately avoid the library's indexes and
// fast paths.

#include <cstddef>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "entrel/analytics.hpp"
#include "entrel/corpus.hpp"
#include "entrel/dict.hpp"
#include "entrel/grammar.hpp"
#include "entrel/ner.hpp"
#include "entrel/relate.hpp"

namespace testsupport {

std::string source_path(const std::string& rel);
std::string read_file(const std::string& path);

// (target start, target canonical, partner start, partner category, partner canonical)
using PairKey = std::tuple<std::size_t, std::string, std::size_t, std::string, std::string>;
std::set<PairKey> pair_set(const std::vector<entrel::RelationInstance>& rels);

std::set<PairKey> window_oracle(const entrel::Document& doc, const std::vector<entrel::EntityMention>& mentions,
                                const entrel::CoocConfig& cfg);
std::set<PairKey> text_unit_oracle(const entrel::Document& doc, const std::vector<entrel::EntityMention>& mentions,
                                   const entrel::CoocConfig& cfg);
std::set<PairKey> constrained_oracle(const entrel::Document& doc,
                                     const std::vector<entrel::EntityMention>& mentions,
                                     const entrel::CoocConfig& cfg);

struct RandomDoc {
  entrel::Document doc;
  std::vector<entrel::EntityMention> mentions;
};

// At most `max_tokens` tokens and `max_mentions` mentions of categories
// T, P and Q. Some lines open avoid blocks ("evitez").
RandomDoc random_document(std::mt19937& rng, std::size_t max_tokens, std::size_t max_mentions);

// Longest accepting end (inclusive) from `start` by exhaustive depth-first
// search of the automata.
std::optional<std::size_t> grammar_oracle(const entrel::GrammarSet& gs, const std::string& entry,
                                          const std::vector<entrel::Token>& tokens, std::size_t start,
                                          const entrel::EntityMatcher& matcher);

using ScanKey = std::tuple<std::string, std::size_t, std::size_t>;  // category, start, end
std::set<ScanKey> scan_oracle(const entrel::GrammarSet& gs, const entrel::Document& doc,
                              const entrel::EntityMatcher& matcher);

// Longest folded variant match of any entry per position, by direct
// comparison against every variant.
struct VariantHit {
  std::size_t start;
  std::size_t length;
  std::string category;
  std::string canonical;
};
std::vector<VariantHit> variant_scan_oracle(const std::vector<entrel::Dictionary>& dicts,
                                            const std::vector<entrel::Token>& tokens);

// Exclusive region counts by enumerating subsets and scanning all rows.
std::vector<std::size_t> venn_oracle(const entrel::RelationStore& store, const std::vector<std::string>& targets,
                                     const std::vector<std::string>& categories);

enum class PermStat { kKs, kRankSum, kWelch };

// Two-sided permutation p-value: share of label shuffles whose statistic is at
// least as extreme as the observed one.
double permutation_p(const std::vector<double>& a, const std::vector<double>& b, PermStat stat,
                     std::size_t resamples, std::uint64_t seed);

}  // namespace testsupport

#endif  // ENTREL_TESTS_SUPPORT_HPP
