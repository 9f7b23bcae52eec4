#include "entrel/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "entrel/csv.hpp"
#include "entrel/error.hpp"
#include "entrel/stats.hpp"
#include "entrel/text.hpp"

namespace entrel {

Month Month::next() const { return month == 12 ? Month{year + 1, 1} : Month{year, month + 1}; }

std::string Month::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d.%04d", month, year);
  return buf;
}

namespace {

int month_by_name(const std::string& w) {
  static const std::map<std::string, int> names = {
      {"janvier", 1},  {"janv", 1},     {"january", 1},  {"jan", 1},     {"fevrier", 2},   {"fevr", 2},
      {"fev", 2},      {"february", 2}, {"feb", 2},      {"mars", 3},    {"march", 3},     {"mar", 3},
      {"avril", 4},    {"avr", 4},      {"april", 4},    {"apr", 4},     {"mai", 5},       {"may", 5},
      {"juin", 6},     {"june", 6},     {"jun", 6},      {"juillet", 7}, {"juil", 7},      {"july", 7},
      {"jul", 7},      {"aout", 8},     {"august", 8},   {"aug", 8},     {"septembre", 9}, {"sept", 9},
      {"september", 9}, {"sep", 9},     {"octobre", 10}, {"oct", 10},    {"october", 10},  {"novembre", 11},
      {"nov", 11},     {"november", 11}, {"decembre", 12}, {"dec", 12},  {"december", 12}};
  const auto it = names.find(w);
  return it == names.end() ? 0 : it->second;
}

std::string key_of(const std::string& canonical) { return text::join(text::folded_tokens(canonical), " "); }

const std::vector<std::size_t>& lookup(const std::map<std::string, std::vector<std::size_t>>& idx,
                                       const std::string& key) {
  static const std::vector<std::size_t> kEmpty;
  const auto it = idx.find(key);
  return it == idx.end() ? kEmpty : it->second;
}

}  // namespace

std::optional<Month> parse_month(std::string_view s) {
  const std::string f = text::fold(text::trim(s));
  std::vector<std::string> nums;
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    (std::isdigit(static_cast<unsigned char>(cur[0])) ? nums : words).push_back(cur);
    cur.clear();
  };
  for (char c : f) {
    const bool digit = c >= '0' && c <= '9';
    const bool alpha = (c >= 'a' && c <= 'z');
    if ((digit || alpha) && (cur.empty() || (std::isdigit(static_cast<unsigned char>(cur[0])) != 0) == digit)) {
      cur.push_back(c);
    } else if (digit || alpha) {
      flush();
      cur.push_back(c);
    } else {
      flush();
    }
  }
  flush();

  auto valid = [](int y, int m) -> std::optional<Month> {
    if (m < 1 || m > 12 || y < 1000 || y > 9999) return std::nullopt;
    return Month{y, m};
  };
  int named = 0;
  for (const auto& w : words) {
    if (int m = month_by_name(w)) {
      if (named) return std::nullopt;
      named = m;
    } else if (w != "er" && w != "le") {
      return std::nullopt;
    }
  }
  if (named) {
    for (const auto& n : nums) {
      if (n.size() == 4) return valid(std::stoi(n), named);
    }
    return std::nullopt;
  }
  if (nums.size() == 2) {
    if (nums[1].size() == 4 && nums[0].size() <= 2) return valid(std::stoi(nums[1]), std::stoi(nums[0]));
    if (nums[0].size() == 4 && nums[1].size() <= 2) return valid(std::stoi(nums[0]), std::stoi(nums[1]));
  } else if (nums.size() == 3) {
    if (nums[2].size() == 4 && nums[1].size() <= 2) return valid(std::stoi(nums[2]), std::stoi(nums[1]));
    if (nums[0].size() == 4 && nums[1].size() <= 2) return valid(std::stoi(nums[0]), std::stoi(nums[1]));
  }
  return std::nullopt;
}

Month month_from_string(std::string_view s) {
  auto m = parse_month(s);
  if (!m) throw ConfigError("cannot parse month '" + std::string(s) + "'");
  return *m;
}

RelationStore::RelationStore(std::vector<RelationInstance> rows, std::string date_key)
    : rows_(std::move(rows)), date_key_(std::move(date_key)) {
  months_.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    const auto it = r.context.find(date_key_);
    months_.push_back(it == r.context.end() ? std::nullopt : parse_month(it->second));
    target_[key_of(r.first.canonical)].push_back(i);
    partner_[key_of(r.second.canonical)].push_back(i);
    partner_category_[r.second.category].push_back(i);
    if (months_.back()) month_[*months_.back()].push_back(i);
  }
}

RelationStore RelationStore::load(const std::string& path, std::string date_key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open relation file '" + path + "'");
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(0, std::string("invalid JSON: ") + e.what());
    }
    return RelationStore(relations_from_json(j), std::move(date_key));
  }
  return RelationStore(read_relations_csv(in), std::move(date_key));
}

const std::vector<std::size_t>& RelationStore::by_target(const std::string& canonical) const {
  return lookup(target_, key_of(canonical));
}

const std::vector<std::size_t>& RelationStore::by_partner(const std::string& canonical) const {
  return lookup(partner_, key_of(canonical));
}

const std::vector<std::size_t>& RelationStore::by_partner_category(const std::string& category) const {
  return lookup(partner_category_, category);
}

const std::vector<std::size_t>& RelationStore::by_month(const Month& m) const {
  static const std::vector<std::size_t> kEmpty;
  const auto it = month_.find(m);
  return it == month_.end() ? kEmpty : it->second;
}

std::vector<std::size_t> RelationStore::by_pair(const std::string& target, const std::string& partner) const {
  const auto& a = by_target(target);
  const auto& b = by_partner(partner);
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> RelationStore::dated_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < months_.size(); ++i) {
    if (months_[i]) out.push_back(i);
  }
  return out;
}

namespace {

std::pair<std::string, std::string> split_key(const std::string& key) {
  const auto colon = key.find(':');
  if (colon == std::string::npos) throw ConfigError("relation key must be 'target:partner', got '" + key + "'");
  return {text::trim(key.substr(0, colon)), text::trim(key.substr(colon + 1))};
}

bool in_range(const Month& m, const std::optional<MonthRange>& range) {
  return !range || (m >= range->first && m <= range->second);
}

std::vector<Month> month_span(Month from, Month to) {
  std::vector<Month> out;
  for (Month m = from; m <= to; m = m.next()) out.push_back(m);
  return out;
}

}  // namespace

std::vector<TimeBin> timeline(const RelationStore& store, const std::string& relation_key,
                              const std::optional<MonthRange>& range) {
  const auto [target, partner] = split_key(relation_key);
  std::map<Month, std::size_t> counts;
  for (std::size_t i : store.by_pair(target, partner)) {
    const auto m = store.month_of(i);
    if (m && in_range(*m, range)) ++counts[*m];
  }
  if (counts.empty()) throw NoDates();
  const Month from = range ? range->first : counts.begin()->first;
  const Month to = range ? range->second : counts.rbegin()->first;
  std::vector<TimeBin> out;
  for (const Month& m : month_span(from, to)) {
    const auto it = counts.find(m);
    out.push_back({m, it == counts.end() ? 0 : it->second});
  }
  return out;
}

ProportionTable proportions(const RelationStore& store, const std::vector<std::string>& targets,
                            const std::vector<std::string>& partners) {
  if (targets.empty() || partners.empty()) throw ConfigError("proportions need targets and partners");
  ProportionTable table;
  table.partners = partners;
  for (const auto& t : targets) {
    ProportionRow row;
    row.target = t;
    std::size_t total = 0;
    for (const auto& p : partners) {
      row.counts.push_back(store.by_pair(t, p).size());
      total += row.counts.back();
    }
    row.flagged = total == 0;
    if (!row.flagged) {
      for (std::size_t c : row.counts) row.shares.push_back(static_cast<double>(c) / static_cast<double>(total));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::map<std::string, std::size_t> value_frequencies(const RelationStore& store, const std::string& category) {
  // Folded key -> (first spelling seen, count).
  std::map<std::string, std::pair<std::string, std::size_t>> by_key;
  auto add = [&](const std::string& canonical) {
    auto& slot = by_key.try_emplace(key_of(canonical), canonical, 0).first->second;
    ++slot.second;
  };
  for (const auto& r : store.rows()) {
    if (r.first.category == category) add(r.first.canonical);
    if (r.second.category == category) add(r.second.canonical);
  }
  std::map<std::string, std::size_t> out;
  for (const auto& [key, v] : by_key) out[v.first] += v.second;
  return out;
}

std::vector<std::string> frequent_values(const RelationStore& store, const std::string& category,
                                         std::size_t min_count) {
  std::vector<std::string> out;
  for (const auto& [v, n] : value_frequencies(store, category)) {
    if (n > min_count) out.push_back(v);
  }
  return out;
}

std::vector<VennRegion> venn_counts(const RelationStore& store, const std::vector<std::string>& targets,
                                    const std::vector<std::string>& partner_categories) {
  if (targets.size() > 4) throw TooManySets(targets.size());
  if (targets.empty()) throw ConfigError("venn needs at least one target");
  const std::set<std::string> cats(partner_categories.begin(), partner_categories.end());

  // Partner (category, canonical key) -> bitmask of associated targets.
  std::map<std::pair<std::string, std::string>, unsigned> membership;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (std::size_t i : store.by_target(targets[t])) {
      const auto& p = store.rows()[i].second;
      if (!cats.empty() && !cats.count(p.category)) continue;
      membership[{p.category, key_of(p.canonical)}] |= 1u << t;
    }
  }
  const unsigned full = (1u << targets.size()) - 1;
  std::vector<std::size_t> counts(full + 1, 0);
  for (const auto& [partner, mask] : membership) ++counts[mask];

  std::vector<VennRegion> out;
  for (unsigned mask = 1; mask <= full; ++mask) {
    VennRegion r;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (mask & (1u << t)) r.members.push_back(targets[t]);
    }
    r.count = counts[mask];
    out.push_back(std::move(r));
  }
  return out;
}

ParallelMatrix parallel_matrix(const RelationStore& store, const std::string& target,
                               const std::vector<std::string>& partners, const std::optional<MonthRange>& range) {
  if (partners.empty()) throw ConfigError("parallel matrix needs partners");
  ParallelMatrix mat;
  mat.target = target;
  mat.partners = partners;

  std::map<std::string, Month> doc_month;
  std::set<std::string> docs;
  for (std::size_t i : store.by_target(target)) {
    const auto& r = store.rows()[i];
    docs.insert(r.doc_id);
    if (const auto m = store.month_of(i); m && !doc_month.count(r.doc_id)) doc_month.emplace(r.doc_id, *m);
  }
  std::map<std::pair<Month, std::string>, std::size_t> row_of;
  for (const auto& d : docs) {
    const auto it = doc_month.find(d);
    if (it == doc_month.end() || !in_range(it->second, range)) continue;
    row_of.emplace(std::make_pair(it->second, d), 0);
  }
  for (auto& [key, idx] : row_of) {
    idx = mat.rows.size();
    mat.rows.push_back({key.second, key.first, std::vector<std::size_t>(partners.size(), 0)});
  }
  for (std::size_t p = 0; p < partners.size(); ++p) {
    for (std::size_t i : store.by_pair(target, partners[p])) {
      const auto& doc = store.rows()[i].doc_id;
      const auto it = doc_month.find(doc);
      if (it == doc_month.end()) continue;
      const auto row = row_of.find({it->second, doc});
      if (row != row_of.end()) ++mat.rows[row->second].counts[p];
    }
  }
  return mat;
}

PairwiseReport pairwise_tests(const RelationStore& store, const std::string& target,
                              const std::string& partner_category) {
  // partner canonical -> month -> count
  std::map<std::string, std::map<Month, double>> series;
  std::map<std::string, std::string> spelling;  // folded key -> first spelling
  for (std::size_t i : store.by_target(target)) {
    const auto& r = store.rows()[i];
    if (r.second.category != partner_category) continue;
    const auto m = store.month_of(i);
    if (!m) continue;
    const auto& name = spelling.try_emplace(key_of(r.second.canonical), r.second.canonical).first->second;
    series[name][*m] += 1.0;
  }

  PairwiseReport report;
  for (auto a = series.begin(); a != series.end(); ++a) {
    for (auto b = std::next(a); b != series.end(); ++b) {
      const std::string label = target + ":" + a->first + " / " + target + ":" + b->first;
      const Month from = std::min(a->second.begin()->first, b->second.begin()->first);
      const Month to = std::max(a->second.rbegin()->first, b->second.rbegin()->first);
      const auto span = month_span(from, to);
      if (span.size() < 2) {
        report.skipped.push_back(label);
        continue;
      }
      std::vector<double> xa, xb;
      for (const Month& m : span) {
        const auto ia = a->second.find(m);
        const auto ib = b->second.find(m);
        xa.push_back(ia == a->second.end() ? 0.0 : ia->second);
        xb.push_back(ib == b->second.end() ? 0.0 : ib->second);
      }
      TestResult res;
      res.label = label;
      res.partner_a = a->first;
      res.partner_b = b->first;
      res.months = span.size();
      const auto ks = twosample::ks_two_sample(xa, xb);
      const auto wx = twosample::wilcoxon_rank_sum(xa, xb);
      const auto tt = twosample::welch_t(xa, xb);
      res.p_values = {{"KOLMOGOROV", ks.p_value}, {"WILCOXON", wx.p_value}, {"STUDENT", tt.p_value}};
      res.statistics = {{"KOLMOGOROV", ks.statistic}, {"WILCOXON", wx.statistic}, {"STUDENT", tt.statistic}};
      report.results.push_back(std::move(res));
    }
  }
  std::sort(report.results.begin(), report.results.end(),
            [](const TestResult& x, const TestResult& y) { return x.label < y.label; });
  std::sort(report.skipped.begin(), report.skipped.end());
  return report;
}

std::vector<std::string> saturation_report(const std::vector<TestResult>& results, double threshold) {
  std::vector<std::string> out;
  for (const auto& r : results) {
    if (r.p_values.empty()) continue;
    const bool all = std::all_of(r.p_values.begin(), r.p_values.end(),
                                 [&](const auto& kv) { return kv.second >= threshold; });
    if (all) out.push_back(r.label);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* const kTests[] = {"KOLMOGOROV", "WILCOXON", "STUDENT"};

}  // namespace

void write_csv(std::ostream& out, const std::vector<TimeBin>& bins) {
  csv::write_row(out, {"period", "count"});
  for (const auto& b : bins) csv::write_row(out, {b.period.str(), std::to_string(b.count)});
}

void write_csv(std::ostream& out, const ProportionTable& table) {
  std::vector<std::string> header = {"target"};
  for (const auto& p : table.partners) header.push_back(p);
  header.push_back("flagged");
  csv::write_row(out, header);
  for (const auto& r : table.rows) {
    std::vector<std::string> row = {r.target};
    for (std::size_t i = 0; i < table.partners.size(); ++i) row.push_back(r.flagged ? "" : num(r.shares[i]));
    row.push_back(r.flagged ? "1" : "0");
    csv::write_row(out, row);
  }
}

void write_csv(std::ostream& out, const std::vector<VennRegion>& regions) {
  csv::write_row(out, {"region", "count"});
  for (const auto& r : regions) csv::write_row(out, {text::join(r.members, "&"), std::to_string(r.count)});
}

void write_csv(std::ostream& out, const ParallelMatrix& matrix) {
  std::vector<std::string> header = {"doc_id", "period"};
  for (const auto& p : matrix.partners) header.push_back(p);
  csv::write_row(out, header);
  for (const auto& r : matrix.rows) {
    std::vector<std::string> row = {r.doc_id, r.period.str()};
    for (std::size_t c : r.counts) row.push_back(std::to_string(c));
    csv::write_row(out, row);
  }
}

void write_csv(std::ostream& out, const PairwiseReport& report) {
  csv::write_row(out, {"pair", "months", "KOLMOGOROV", "WILCOXON", "STUDENT", "GROWTHCURVES", "KOLMOGOROV_stat",
                       "WILCOXON_stat", "STUDENT_stat"});
  for (const auto& r : report.results) {
    std::vector<std::string> row = {r.label, std::to_string(r.months)};
    for (const char* t : kTests) row.push_back(num(r.p_values.at(t)));
    row.emplace_back();
    for (const char* t : kTests) row.push_back(num(r.statistics.at(t)));
    csv::write_row(out, row);
  }
}

void write_csv(std::ostream& out, const std::map<std::string, std::size_t>& frequencies) {
  csv::write_row(out, {"value", "freq"});
  for (const auto& [v, n] : frequencies) csv::write_row(out, {v, std::to_string(n)});
}

nlohmann::json to_json(const std::vector<TimeBin>& bins) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : bins) arr.push_back({{"period", b.period.str()}, {"count", b.count}});
  return {{"timeline", arr}};
}

nlohmann::json to_json(const ProportionTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"target", r.target}, {"counts", r.counts}, {"shares", r.shares}, {"flagged", r.flagged}});
  }
  return {{"partners", table.partners}, {"rows", rows}};
}

nlohmann::json to_json(const std::vector<VennRegion>& regions) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : regions) arr.push_back({{"members", r.members}, {"count", r.count}});
  return {{"regions", arr}};
}

nlohmann::json to_json(const ParallelMatrix& matrix) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : matrix.rows) {
    rows.push_back({{"doc_id", r.doc_id}, {"period", r.period.str()}, {"counts", r.counts}});
  }
  return {{"target", matrix.target}, {"partners", matrix.partners}, {"rows", rows}};
}

nlohmann::json to_json(const PairwiseReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json p = r.p_values;
    p["GROWTHCURVES"] = nullptr;
    arr.push_back({{"pair", r.label}, {"months", r.months}, {"p_values", p}, {"statistics", r.statistics}});
  }
  return {{"results", arr}, {"skipped", report.skipped}};
}

}  // namespace entrel
