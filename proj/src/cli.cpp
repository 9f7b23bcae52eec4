#include "entrel/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "entrel/analytics.hpp"
#include "entrel/corpus.hpp"
#include "entrel/csv.hpp"
#include "entrel/dict.hpp"
#include "entrel/error.hpp"
#include "entrel/grammar.hpp"
#include "entrel/metrics.hpp"
#include "entrel/ner.hpp"
#include "entrel/pool.hpp"
#include "entrel/relate.hpp"
#include "entrel/text.hpp"

namespace fs = std::filesystem;

namespace entrel::cli {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::size_t jobs = 1;

  std::string corpus;
  std::vector<std::string> inputs;
  std::vector<std::string> dicts;
  std::vector<std::string> segment_dicts;
  std::vector<std::string> grammars;
  bool lossy = false;
  std::size_t header_lines = 10;
  std::string main_category;
  std::vector<std::string> avoid_start;
  std::vector<std::string> avoid_end;
  std::string split = "blank-line";

  std::string mode = "text-unit";
  std::string scope = "text-unit";
  std::string target;
  std::vector<std::string> partners;
  std::string wl = "inf";
  std::string wr = "inf";
  std::vector<std::string> markers;
  bool h1 = true;
  bool h2 = false;
  bool h3 = true;
  std::vector<std::string> header_cats;
  std::vector<std::string> contextual;

  std::string gold;
  std::string pred;
  std::string gold_format = "csv";
  std::string policy = "canonical-set";
  std::string averaging = "micro";
  std::string kind = "auto";
  std::string triple_context;
  double beta = 1.0;
  bool lenient = false;

  std::string relations;
  std::string date_key = "date";
  std::string key;
  std::string from;
  std::string to;
  std::string stat_target;
  std::vector<std::string> targets;
  std::vector<std::string> stat_partners;
  std::vector<std::string> cats;
  std::string cat;
  std::string freq_cat;
  std::size_t min_freq = 2;
  double threshold = 1.0;
};

struct Resources {
  std::vector<Dictionary> dicts;
  EntityMatcher matcher;
  EntityMatcher segment_matcher;
  std::optional<GrammarSet> grammars;
};

template <typename T>
void need(const T& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ConfigError("dictionary spec must be category=path, got '" + spec + "'");
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

std::vector<Dictionary> load_dicts(const std::vector<std::string>& specs, std::set<std::string>& seen) {
  std::vector<Dictionary> out;
  for (const auto& s : specs) {
    auto [cat, path] = split_spec(s);
    if (!seen.insert(cat).second) throw ConfigError("category '" + cat + "' given twice");
    if (!fs::exists(path)) throw ConfigError("dictionary file not found: " + path);
    out.push_back(load_dictionary(path, cat));
  }
  return out;
}

Resources load_resources(const Options& o) {
  Resources r;
  std::set<std::string> seen;
  r.dicts = load_dicts(o.dicts, seen);
  auto seg = load_dicts(o.segment_dicts, seen);
  r.matcher = EntityMatcher::compile(r.dicts);
  std::vector<Dictionary> all = r.dicts;
  all.insert(all.end(), seg.begin(), seg.end());
  r.segment_matcher = EntityMatcher::compile(all);
  if (!o.grammars.empty()) {
    for (const auto& g : o.grammars) {
      if (!fs::exists(g)) throw ConfigError("grammar file not found: " + g);
    }
    r.grammars = load_grammars(o.grammars);
  }
  return r;
}

std::vector<std::string> corpus_files(const Options& o, std::ostream& err) {
  std::vector<std::string> files = o.inputs;
  if (!o.corpus.empty()) {
    if (!fs::is_directory(o.corpus)) throw ConfigError("corpus directory not found: " + o.corpus);
    for (const auto& e : fs::directory_iterator(o.corpus)) {
      const auto name = e.path().filename().string();
      if (e.is_regular_file() && !name.empty() && name[0] != '.') files.push_back(e.path().string());
    }
  }
  for (const auto& f : files) {
    if (!fs::exists(f)) throw ConfigError("input file not found: " + f);
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  if (files.empty()) err << "warning: corpus is empty\n";
  return files;
}

SegmentationConfig segmentation(const Options& o) {
  SegmentationConfig c;
  c.header_line_count = o.header_lines;
  c.main_entity_category = o.main_category;
  c.avoid_start_phrases = o.avoid_start;
  c.avoid_end_phrases = o.avoid_end;
  c.paragraph_split = paragraph_split_from_string(o.split);
  return c;
}

WindowBound parse_bound(const std::string& s) {
  if (s == "inf" || s == "INF" || s == "infinite") return std::nullopt;
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("window bound must be a nonnegative integer or 'inf', got '" + s + "'");
  }
}

CoocConfig cooc_config(const Options& o) {
  CoocConfig c;
  c.mode = cooc_mode_from_string(o.mode);
  c.constrained_scope = cooc_mode_from_string(o.scope);
  c.target_category = o.target;
  c.partner_categories = o.partners;
  c.window_left = parse_bound(o.wl);
  c.window_right = parse_bound(o.wr);
  c.markers = o.markers;
  c.h1 = o.h1;
  c.h2 = o.h2;
  c.h3 = o.h3;
  c.header_categories = o.header_cats;
  c.validate();
  return c;
}

std::string format_or(const Options& o, const std::string& fallback) {
  const std::string f = o.format.empty() ? fallback : o.format;
  if (f != "csv" && f != "json" && f != "table") throw ConfigError("unknown format '" + f + "'");
  return f;
}

// Writes to stdout, to --out as a file, or into --out as a directory.
void emit(const Options& o, std::ostream& out, const std::string& name, const std::string& ext,
          const std::function<void(std::ostream&)>& write) {
  if (o.out.empty() || o.out == "-") {
    write(out);
    return;
  }
  fs::path path = o.out;
  if (fs::is_directory(path)) path /= name + "." + ext;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error("cannot write " + tmp.string());
    write(f);
    if (!f) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct DocResult {
  std::string doc_id;
  std::vector<EntityMention> mentions;
  std::vector<RelationInstance> relations;
  std::string error;
};

std::vector<DocResult> process_corpus(const Options& o, const Resources& res, std::ostream& err,
                                      const std::function<void(const Document&, DocResult&)>& work) {
  const auto files = corpus_files(o, err);
  const auto seg = segmentation(o);
  IngestOptions ingest;
  ingest.lossy_utf8 = o.lossy;
  auto results = parallel_map<DocResult>(files.size(), o.jobs, [&](std::size_t i) {
    DocResult r;
    r.doc_id = fs::path(files[i]).stem().string();
    try {
      const Document doc = segment(ingest_file(files[i], ingest), seg, res.segment_matcher);
      r.mentions = extract_entities(doc, res.matcher, res.grammars ? &*res.grammars : nullptr);
      work(doc, r);
    } catch (const Error& e) {
      r.error = files[i] + ": " + e.what();
      r.mentions.clear();
      r.relations.clear();
    }
    return r;
  });
  std::stable_sort(results.begin(), results.end(),
                   [](const DocResult& a, const DocResult& b) { return a.doc_id < b.doc_id; });
  for (const auto& r : results) {
    if (!r.error.empty()) err << "warning: skipped " << r.error << '\n';
  }
  return results;
}

void write_mentions(const Options& o, std::ostream& out, const std::vector<EntityMention>& mentions,
                    const std::string& name) {
  const std::string fmt = format_or(o, "csv");
  if (fmt == "json") {
    emit(o, out, name, "json", [&](std::ostream& s) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& m : mentions) arr.push_back(to_json(m));
      s << nlohmann::json{{"mentions", arr}}.dump(2) << '\n';
    });
  } else {
    emit(o, out, name, "csv", [&](std::ostream& s) { write_mentions_csv(s, mentions); });
  }
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  const Resources res = load_resources(o);
  auto results = process_corpus(o, res, err, [](const Document&, DocResult&) {});
  std::vector<EntityMention> all;
  for (auto& r : results) {
    for (auto& m : r.mentions) all.push_back(std::move(m));
  }
  write_mentions(o, out, all, "mentions");
  return 0;
}

int cmd_relate(const Options& o, std::ostream& out, std::ostream& err) {
  std::optional<CoocConfig> cfg;
  if (o.contextual.empty()) {
    cfg = cooc_config(o);
  } else if (o.contextual.size() != 3) {
    throw ArityUnsupported(o.contextual.size());
  }
  const Resources res = load_resources(o);
  auto results = process_corpus(o, res, err, [&](const Document& doc, DocResult& r) {
    if (cfg) {
      r.relations = extract_relations(doc, r.mentions, *cfg);
    } else {
      r.relations = extract_contextual(doc, o.contextual, res.matcher, res.grammars ? &*res.grammars : nullptr);
    }
  });
  std::vector<RelationInstance> all;
  for (auto& r : results) {
    for (auto& x : r.relations) all.push_back(std::move(x));
  }
  const std::string fmt = format_or(o, "csv");
  if (fmt == "json") {
    emit(o, out, "relations", "json", [&](std::ostream& s) { s << relations_to_json(all).dump(2) << '\n'; });
  } else {
    emit(o, out, "relations", "csv", [&](std::ostream& s) { write_relations_csv(s, all); });
  }
  return 0;
}

bool predicted_are_relations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open predictions: " + path);
  if (fs::path(path).extension() == ".json") {
    const auto j = nlohmann::json::parse(in);
    return j.contains("relations");
  }
  std::string header;
  std::getline(in, header);
  return header.rfind("doc_id,relation_type", 0) == 0;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream&) {
  need(o.gold, "--gold");
  need(o.pred, "--pred");
  if (!fs::exists(o.gold)) throw ConfigError("gold file not found: " + o.gold);
  if (!fs::exists(o.pred)) throw ConfigError("prediction file not found: " + o.pred);
  GoldOptions gopt;
  gopt.strict = !o.lenient;
  const GoldCorpus gold = load_gold(o.gold, gold_format_from_string(o.gold_format), gopt);
  ScoreOptions sopt;
  sopt.beta = o.beta;
  sopt.averaging = averaging_from_string(o.averaging);
  if (!o.triple_context.empty()) sopt.triple_context = o.triple_context;

  bool relations = o.kind == "relations";
  if (o.kind == "auto") {
    relations = predicted_are_relations(o.pred);
  } else if (o.kind != "entities" && o.kind != "relations") {
    throw ConfigError("--kind must be auto, entities or relations");
  }

  EvalReport report;
  std::ifstream in(o.pred, std::ios::binary);
  const bool json = fs::path(o.pred).extension() == ".json";
  if (relations) {
    const auto rels = json ? relations_from_json(nlohmann::json::parse(in)) : read_relations_csv(in);
    report = score_relations(gold, rels, sopt);
  } else {
    std::vector<EntityMention> ms;
    if (json) {
      for (const auto& j : nlohmann::json::parse(in).at("mentions")) ms.push_back(mention_from_json(j));
    } else {
      ms = read_mentions_csv(in);
    }
    const auto policy = match_policy_from_string(o.policy);
    report = score_entities(gold, ms, policy, sopt);
  }

  const std::string fmt = format_or(o, "table");
  if (fmt == "json") {
    emit(o, out, "eval", "json", [&](std::ostream& s) { s << to_json(report).dump(2) << '\n'; });
  } else if (fmt == "csv") {
    emit(o, out, "eval", "csv", [&](std::ostream& s) { write_report_csv(s, report); });
  } else {
    emit(o, out, "eval", "txt", [&](std::ostream& s) { s << format_table(report); });
  }
  return 0;
}

std::optional<MonthRange> month_range(const Options& o) {
  if (o.from.empty() && o.to.empty()) return std::nullopt;
  if (o.from.empty() || o.to.empty()) throw ConfigError("--from and --to go together");
  MonthRange r{month_from_string(o.from), month_from_string(o.to)};
  if (r.second < r.first) throw ConfigError("--from is after --to");
  return r;
}

template <typename T>
void emit_table(const Options& o, std::ostream& out, const std::string& name, const T& value) {
  if (format_or(o, "csv") == "json") {
    emit(o, out, name, "json", [&](std::ostream& s) { s << to_json(value).dump(2) << '\n'; });
  } else {
    emit(o, out, name, "csv", [&](std::ostream& s) { write_csv(s, value); });
  }
}

int cmd_stats(const std::string& sub, const Options& o, std::ostream& out) {
  need(o.relations, "--relations");
  if (sub == "timeline") need(o.key, "--key");
  if (sub == "prop" || sub == "parallel") need(o.stat_partners, "--partners");
  if (sub == "freq" || sub == "test" || sub == "saturation") need(o.cat, "--cat");
  if (sub == "venn") need(o.targets, "--targets");
  if (sub == "parallel" || sub == "test" || sub == "saturation") need(o.stat_target, "--target");
  if (!fs::exists(o.relations)) throw ConfigError("relation file not found: " + o.relations);
  const RelationStore store = RelationStore::load(o.relations, o.date_key);
  if (sub == "timeline") {
    emit_table(o, out, "timeline", timeline(store, o.key, month_range(o)));
  } else if (sub == "prop") {
    auto targets = o.targets;
    if (!o.freq_cat.empty()) {
      for (auto& v : frequent_values(store, o.freq_cat, o.min_freq)) targets.push_back(std::move(v));
    }
    emit_table(o, out, "proportions", proportions(store, targets, o.stat_partners));
  } else if (sub == "freq") {
    const auto freq = value_frequencies(store, o.cat);
    if (format_or(o, "csv") == "json") {
      emit(o, out, "frequencies", "json", [&](std::ostream& s) { s << nlohmann::json(freq).dump(2) << '\n'; });
    } else {
      emit(o, out, "frequencies", "csv", [&](std::ostream& s) { write_csv(s, freq); });
    }
  } else if (sub == "venn") {
    emit_table(o, out, "venn", venn_counts(store, o.targets, o.cats));
  } else if (sub == "parallel") {
    emit_table(o, out, "parallel", parallel_matrix(store, o.stat_target, o.stat_partners, month_range(o)));
  } else if (sub == "test") {
    emit_table(o, out, "tests", pairwise_tests(store, o.stat_target, o.cat));
  } else if (sub == "saturation") {
    const auto labels = saturation_report(pairwise_tests(store, o.stat_target, o.cat).results, o.threshold);
    if (format_or(o, "csv") == "json") {
      emit(o, out, "saturation", "json",
           [&](std::ostream& s) { s << nlohmann::json{{"saturated", labels}}.dump(2) << '\n'; });
    } else {
      emit(o, out, "saturation", "csv", [&](std::ostream& s) {
        s << "pair\n";
        for (const auto& l : labels) csv::write_row(s, {l});
      });
    }
  }
  return 0;
}

int cmd_dict_stats(const Options& o, std::ostream& out) {
  need(o.dicts, "--dict");
  std::set<std::string> seen;
  const auto dicts = load_dicts(o.dicts, seen);
  const auto rows = stats(dicts);
  const std::string fmt = format_or(o, "table");
  if (fmt == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"category", r.category},
                     {"entries", r.entries},
                     {"leafs", r.leafs},
                     {"concepts", r.concepts},
                     {"lexemes", r.lexemes}});
    }
    emit(o, out, "dict-stats", "json", [&](std::ostream& s) { s << nlohmann::json{{"dictionaries", arr}}.dump(2) << '\n'; });
    return 0;
  }
  emit(o, out, "dict-stats", fmt == "csv" ? "csv" : "txt", [&](std::ostream& s) {
    const char* sep = fmt == "csv" ? "," : "\t";
    s << "category" << sep << "entries" << sep << "leafs" << sep << "concepts" << sep << "lexemes\n";
    for (const auto& r : rows) {
      s << r.category << sep << r.entries << sep << r.leafs << sep << r.concepts << sep << r.lexemes << '\n';
    }
  });
  return 0;
}

void add_corpus_options(CLI::App* c, Options& o) {
  c->add_option("inputs", o.inputs, "Input text files");
  c->add_option("--corpus", o.corpus, "Directory of UTF-8 text documents");
  c->add_option("--dict", o.dicts, "Dictionary as category=path (repeatable)")->allow_extra_args(false);
  c->add_option("--segment-dict", o.segment_dicts, "Dictionary used only for segmentation, category=path")->allow_extra_args(false);
  c->add_option("--grammar", o.grammars, "Grammar file (repeatable)")->allow_extra_args(false);
  c->add_flag("--lossy", o.lossy, "Replace invalid UTF-8 instead of failing");
  c->add_option("--header-lines", o.header_lines, "Lines forming the header unit");
  c->add_option("--main-category", o.main_category, "Category whose line-initial match opens a section");
  c->add_option("--avoid-start", o.avoid_start, "Phrase opening an avoid block")->allow_extra_args(false)->delimiter(',');
  c->add_option("--avoid-end", o.avoid_end, "Phrase closing an avoid block")->allow_extra_args(false)->delimiter(',');
  c->add_option("--split", o.split, "Paragraph split: blank-line, sentence or none");
}

// Fills options not given on the command line from a flat JSON object.
void apply_config(CLI::App& app, CLI::App* sub, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::vector<CLI::App*> scopes;
  for (CLI::App* s = sub; s; s = s->get_parent()) scopes.push_back(s);
  if (scopes.empty()) scopes.push_back(&app);
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = nullptr;
    for (auto* s : scopes) {
      if ((opt = s->get_option_no_throw("--" + key))) break;
    }
    if (!opt) continue;  // options of other commands
    if (opt->count() > 0) continue;
    std::vector<std::string> vals;
    auto scalar = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array()) {
      for (const auto& v : value) vals.push_back(scalar(v));
    } else {
      vals.push_back(scalar(value));
    }
    for (const auto& v : vals) opt->add_result(v);
    opt->run_callback();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Dictionary and grammar driven entity and relation extraction"};
  app.name("entrel");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "JSON config file; command-line flags take precedence");
  app.add_option("--out", o.out, "Output file or directory (default stdout)");
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "csv, json or table");

  auto* extract = app.add_subcommand("extract", "Extract entity mentions from a corpus");
  add_corpus_options(extract, o);

  auto* relate = app.add_subcommand("relate", "Extract relations from a corpus");
  add_corpus_options(relate, o);
  relate->add_option("--mode", o.mode, "text-unit, window or constrained");
  relate->add_option("--scope", o.scope, "Scope under constrained mode: text-unit or window");
  relate->add_option("--target", o.target, "Target (main entity) category");
  relate->add_option("--partners", o.partners, "Partner categories")->allow_extra_args(false)->delimiter(',');
  relate->add_option("--wl", o.wl, "Left window bound or inf");
  relate->add_option("--wr", o.wr, "Right window bound or inf");
  relate->add_option("--markers", o.markers, "Marker phrases")->allow_extra_args(false)->delimiter(',');
  relate->add_flag("--h1,!--no-h1", o.h1, "Require the target in the unit title");
  relate->add_flag("--h2,!--no-h2", o.h2, "Attach header mentions to every relation");
  relate->add_flag("--h3,!--no-h3", o.h3, "Skip avoid blocks");
  relate->add_option("--header-cats", o.header_cats, "Categories copied from the header")->allow_extra_args(false)->delimiter(',');
  relate->add_option("--contextual", o.contextual, "Three categories for nested contextual extraction")->allow_extra_args(false)
      ->delimiter(',');

  auto* eval = app.add_subcommand("eval", "Score predictions against gold annotations");
  eval->add_option("--gold", o.gold, "Gold file");
  eval->add_option("--pred", o.pred, "Predicted mentions or relations (CSV or JSON)");
  eval->add_option("--gold-format", o.gold_format, "csv, bio or bilou");
  eval->add_option("--policy", o.policy, "exact-span or canonical-set (entities)");
  eval->add_option("--beta", o.beta, "F-measure beta")->check(CLI::PositiveNumber);
  eval->add_option("--averaging", o.averaging, "micro or macro TOT row");
  eval->add_option("--kind", o.kind, "auto, entities or relations");
  eval->add_option("--triple-context", o.triple_context, "Context key scored as a relation's third value");
  eval->add_flag("--lenient", o.lenient, "Repair invalid tag sequences instead of failing");

  auto* stats_cmd = app.add_subcommand("stats", "Aggregate tables over a relation file");
  stats_cmd->require_subcommand(1);
  stats_cmd->add_option("--relations", o.relations, "Relation CSV or JSON");
  stats_cmd->add_option("--date-key", o.date_key, "Context key holding the date");
  auto* s_time = stats_cmd->add_subcommand("timeline", "Monthly counts of one relation");
  s_time->add_option("--key", o.key, "target:partner");
  s_time->add_option("--from", o.from, "First month MM.YYYY");
  s_time->add_option("--to", o.to, "Last month MM.YYYY");
  auto* s_prop = stats_cmd->add_subcommand("prop", "Partner shares per target");
  s_prop->add_option("--targets", o.targets, "Target canonicals")->allow_extra_args(false)->delimiter(',');
  s_prop->add_option("--partners", o.stat_partners, "Partner canonicals")->allow_extra_args(false)->delimiter(',');
  s_prop->add_option("--freq-cat", o.freq_cat, "Add targets of this category above --min-freq");
  s_prop->add_option("--min-freq", o.min_freq, "Frequency threshold (strictly greater)");
  auto* s_freq = stats_cmd->add_subcommand("freq", "Value frequencies of a category");
  s_freq->add_option("--cat", o.cat, "Category");
  auto* s_venn = stats_cmd->add_subcommand("venn", "Exclusive Venn region counts");
  s_venn->add_option("--targets", o.targets, "Target canonicals (1 to 4)")->allow_extra_args(false)->delimiter(',');
  s_venn->add_option("--cats", o.cats, "Partner categories")->allow_extra_args(false)->delimiter(',');
  auto* s_par = stats_cmd->add_subcommand("parallel", "Document by partner count matrix");
  s_par->add_option("--target", o.stat_target, "Target canonical");
  s_par->add_option("--partners", o.stat_partners, "Partner canonicals")->allow_extra_args(false)->delimiter(',');
  s_par->add_option("--from", o.from, "First month MM.YYYY");
  s_par->add_option("--to", o.to, "Last month MM.YYYY");
  auto* s_test = stats_cmd->add_subcommand("test", "Pairwise distribution tests");
  s_test->add_option("--target", o.stat_target, "Target canonical");
  s_test->add_option("--cat", o.cat, "Partner category");
  auto* s_sat = stats_cmd->add_subcommand("saturation", "Pairs whose p-values all reach a threshold");
  s_sat->add_option("--target", o.stat_target, "Target canonical");
  s_sat->add_option("--cat", o.cat, "Partner category");
  s_sat->add_option("--threshold", o.threshold, "p-value threshold");

  auto* dict_stats = app.add_subcommand("dict-stats", "Entry counts per dictionary");
  dict_stats->add_option("--dict", o.dicts, "Dictionary as category=path (repeatable)")->allow_extra_args(false);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    CLI::App* leaf = nullptr;
    for (auto* s : app.get_subcommands()) {
      leaf = s;
      for (auto* t : s->get_subcommands()) leaf = t;
    }
    if (!o.config.empty()) apply_config(app, leaf, o.config);

    if (extract->parsed()) return cmd_extract(o, out, err);
    if (relate->parsed()) return cmd_relate(o, out, err);
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (dict_stats->parsed()) return cmd_dict_stats(o, out);
    if (stats_cmd->parsed()) {
      for (auto* s : stats_cmd->get_subcommands()) return cmd_stats(s->get_name(), o, out);
    }
    err << app.help();
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace entrel::cli
