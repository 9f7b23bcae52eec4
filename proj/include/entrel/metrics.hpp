#ifndef ENTREL_METRICS_HPP
#define ENTREL_METRICS_HPP

// Gold annotations (colon-delimited lines or BIO/BILOU token tags) and
// precision / recall / F-beta scoring of entities and relations.

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "entrel/corpus.hpp"
#include "entrel/ner.hpp"
#include "entrel/relate.hpp"

namespace entrel {

enum class GoldFormat { kCsvLike, kBio, kBilou };

GoldFormat gold_format_from_string(std::string_view s);

struct GoldEntity {
  std::string category;
  std::string text;  // canonical form, or the surface for tagged formats
  std::optional<WordSpan> span;

  auto operator<=>(const GoldEntity&) const = default;
};

struct GoldRelation {
  std::string relation_type;
  std::vector<std::string> values;  // ordered pair or triple of canonicals

  auto operator<=>(const GoldRelation&) const = default;
};

struct GoldDocument {
  std::vector<GoldEntity> entities;
  std::vector<GoldRelation> relations;
};

struct GoldCorpus {
  std::map<std::string, GoldDocument> docs;

  std::size_t entity_count() const;
  std::size_t relation_count() const;
};

struct GoldOptions {
  bool strict = true;
  // Document id for tagged input that carries no -DOCSTART- line.
  std::string default_doc_id = "doc";
};

// Throws FormatError or TagSequenceError. Duplicate items are collapsed.
GoldCorpus parse_gold(std::istream& in, GoldFormat format, const GoldOptions& options = {});
GoldCorpus load_gold(const std::string& path, GoldFormat format, GoldOptions options = {});

// Tagged output, one token per line, a blank line after each source line.
// Mentions must not overlap; later overlapping mentions are skipped.
void write_tagged(std::ostream& out, const Document& doc, const std::vector<EntityMention>& mentions,
                  GoldFormat scheme);

void write_gold_csv_like(std::ostream& out, const GoldCorpus& gold);

enum class MatchPolicy { kExactSpan, kCanonicalSet, kOrderedPairCanonical };
enum class Averaging { kMicro, kMacro };

MatchPolicy match_policy_from_string(std::string_view s);
Averaging averaging_from_string(std::string_view s);

// Percent-valued F-beta; 0 when both inputs are 0.
double f_score(double precision, double recall, double beta);

struct ScoreRow {
  std::string category;
  std::size_t correct = 0;
  std::size_t produced = 0;
  std::size_t possible = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

ScoreRow make_row(std::string category, std::size_t correct, std::size_t produced, std::size_t possible,
                  double beta);

struct EvalReport {
  double beta = 1.0;
  Averaging averaging = Averaging::kMicro;
  std::vector<ScoreRow> rows;  // sorted by category
  ScoreRow total;
};

struct ScoreOptions {
  double beta = 1.0;
  Averaging averaging = Averaging::kMicro;
  // Relations carrying this context key are scored as triples under the
  // label "<relation_type>-<key>".
  std::optional<std::string> triple_context;
};

EvalReport score_entities(const GoldCorpus& gold, const std::vector<EntityMention>& predicted, MatchPolicy policy,
                          const ScoreOptions& options = {});
EvalReport score_relations(const GoldCorpus& gold, const std::vector<RelationInstance>& predicted,
                           const ScoreOptions& options = {});

// Builds a report from per-category (correct, produced, possible) counts.
EvalReport report_from_counts(const std::map<std::string, std::array<std::size_t, 3>>& counts,
                              const ScoreOptions& options = {});

std::string format_table(const EvalReport& report);
void write_report_csv(std::ostream& out, const EvalReport& report);
nlohmann::json to_json(const EvalReport& report);

}  // namespace entrel

#endif  // ENTREL_METRICS_HPP
