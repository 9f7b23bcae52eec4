#ifndef ENTREL_ANALYTICS_HPP
#define ENTREL_ANALYTICS_HPP

// Aggregate tables over a corpus of extracted relations: monthly timelines,
// partner shares, Venn regions, parallel-coordinate matrices and pairwise
// distribution tests.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entrel/relate.hpp"

namespace entrel {

struct Month {
  int year = 0;
  int month = 1;  // 1..12

  Month next() const;
  std::string str() const;  // "MM.YYYY"
  auto operator<=>(const Month&) const = default;
};

// Accepts "MM.YYYY", "MM/YYYY", "MM-YYYY", "YYYY-MM", "DD/MM/YYYY",
// "DD.MM.YYYY", "[DD] <month name> YYYY" (French or English names).
std::optional<Month> parse_month(std::string_view s);

// Parses or throws ConfigError.
Month month_from_string(std::string_view s);

using MonthRange = std::pair<Month, Month>;

class RelationStore {
 public:
  RelationStore() = default;
  explicit RelationStore(std::vector<RelationInstance> rows, std::string date_key = "date");

  // CSV or JSON, chosen by extension.
  static RelationStore load(const std::string& path, std::string date_key = "date");

  const std::vector<RelationInstance>& rows() const { return rows_; }
  const std::string& date_key() const { return date_key_; }
  std::optional<Month> month_of(std::size_t row) const { return months_[row]; }

  // Row indices in ascending order. Canonical keys compare case- and
  // accent-insensitively.
  const std::vector<std::size_t>& by_target(const std::string& canonical) const;
  const std::vector<std::size_t>& by_partner(const std::string& canonical) const;
  const std::vector<std::size_t>& by_partner_category(const std::string& category) const;
  const std::vector<std::size_t>& by_month(const Month& m) const;
  std::vector<std::size_t> by_pair(const std::string& target, const std::string& partner) const;

  std::vector<std::size_t> dated_rows() const;

 private:
  std::vector<RelationInstance> rows_;
  std::string date_key_;
  std::vector<std::optional<Month>> months_;
  std::map<std::string, std::vector<std::size_t>> target_;
  std::map<std::string, std::vector<std::size_t>> partner_;
  std::map<std::string, std::vector<std::size_t>> partner_category_;
  std::map<Month, std::vector<std::size_t>> month_;
};

struct TimeBin {
  Month period;
  std::size_t count = 0;
};

// Key "target:partner". Throws NoDates when no row of the key (inside the
// range, if any) is dated.
std::vector<TimeBin> timeline(const RelationStore& store, const std::string& relation_key,
                              const std::optional<MonthRange>& range = std::nullopt);

struct ProportionRow {
  std::string target;
  std::vector<std::size_t> counts;
  std::vector<double> shares;  // empty when flagged
  bool flagged = false;        // zero total over the listed partners
};

struct ProportionTable {
  std::vector<std::string> partners;
  std::vector<ProportionRow> rows;
};

ProportionTable proportions(const RelationStore& store, const std::vector<std::string>& targets,
                            const std::vector<std::string>& partners);

// Canonical -> number of relation endpoints of `category` carrying it.
std::map<std::string, std::size_t> value_frequencies(const RelationStore& store, const std::string& category);

// Values of `category` occurring strictly more than `min_count` times.
std::vector<std::string> frequent_values(const RelationStore& store, const std::string& category,
                                         std::size_t min_count);

struct VennRegion {
  std::vector<std::string> members;  // targets of the region, in input order
  std::size_t count = 0;
};

// Exclusive regions for every nonempty subset of 1..4 targets; throws
// TooManySets above 4.
std::vector<VennRegion> venn_counts(const RelationStore& store, const std::vector<std::string>& targets,
                                    const std::vector<std::string>& partner_categories);

struct ParallelRow {
  std::string doc_id;
  Month period;
  std::vector<std::size_t> counts;
};

struct ParallelMatrix {
  std::string target;
  std::vector<std::string> partners;
  std::vector<ParallelRow> rows;  // by (period, doc_id)
};

ParallelMatrix parallel_matrix(const RelationStore& store, const std::string& target,
                               const std::vector<std::string>& partners,
                               const std::optional<MonthRange>& range = std::nullopt);

struct TestResult {
  std::string label;  // "target:a / target:b"
  std::string partner_a;
  std::string partner_b;
  std::size_t months = 0;
  std::map<std::string, double> p_values;    // KOLMOGOROV, WILCOXON, STUDENT
  std::map<std::string, double> statistics;
};

struct PairwiseReport {
  std::vector<TestResult> results;  // sorted by label
  std::vector<std::string> skipped;  // labels with too few observations
};

// Monthly count series of `target` with each partner of `partner_category`,
// zero-filled over the union month span of the pair.
PairwiseReport pairwise_tests(const RelationStore& store, const std::string& target,
                              const std::string& partner_category);

std::vector<std::string> saturation_report(const std::vector<TestResult>& results, double threshold = 1.0);

// CSV writers (header row first) and JSON views.
void write_csv(std::ostream& out, const std::vector<TimeBin>& bins);
void write_csv(std::ostream& out, const ProportionTable& table);
void write_csv(std::ostream& out, const std::vector<VennRegion>& regions);
void write_csv(std::ostream& out, const ParallelMatrix& matrix);
void write_csv(std::ostream& out, const PairwiseReport& report);
void write_csv(std::ostream& out, const std::map<std::string, std::size_t>& frequencies);

nlohmann::json to_json(const std::vector<TimeBin>& bins);
nlohmann::json to_json(const ProportionTable& table);
nlohmann::json to_json(const std::vector<VennRegion>& regions);
nlohmann::json to_json(const ParallelMatrix& matrix);
nlohmann::json to_json(const PairwiseReport& report);

}  // namespace entrel

#endif  // ENTREL_ANALYTICS_HPP
