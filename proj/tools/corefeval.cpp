// corefeval: validate, fix, strip, score and analyze CorefUD files.
//
// Exit status: 0 success, 1 data or validation failure, 2 usage or I/O
// failure.

#include <chrono>
#include <algorithm>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corefeval.hpp"

namespace fs = std::filesystem;
using namespace corefeval;

namespace {

constexpr int kOk = 0;
constexpr int kDataFailure = 1;
constexpr int kUsage = 2;

/// Data failure, reported with exit status 1.
struct DataFailure : Error {
  using Error::Error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// File name without directories and without .conllu / .gz suffixes.
std::string dataset_name(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  for (const char* suffix : {".gz", ".conllu"})
    if (name.size() > std::strlen(suffix) && name.ends_with(suffix)) name.resize(name.size() - std::strlen(suffix));
  return name;
}

void print_violations(const std::string& path, const std::vector<Violation>& violations) {
  for (const auto& v : violations) std::cerr << path << ": " << v.str() << "\n";
}

Corpus load(const std::string& path, bool fix = false) {
  std::string text = read_text(path);
  if (fix) text = autofix(text);
  auto result = parse_corpus(text);
  if (!result.ok()) {
    print_violations(path, result.violations);
    throw DataFailure(path + " is not valid CoNLL-U");
  }
  return std::move(result.corpus);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) std::cout << text;
  else write_text(out_path, text);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct ScoreOptions {
  std::string gold, pred, match = "head", zero_match = "dependency", metrics = "all", format = "tsv", out, system,
                      dataset;
  bool keep_singletons = false;
  bool autofix = false;
};

int cmd_validate(const std::vector<std::string>& paths) {
  bool clean = true;
  for (const auto& p : paths) {
    const auto violations = validate(read_text(p));
    print_violations(p, violations);
    if (has_errors(violations)) clean = false;
  }
  return clean ? kOk : kDataFailure;
}

int cmd_fix(const std::string& in, const std::string& out) {
  const auto fixed = autofix(read_text(in));
  write_text(out, fixed);
  const auto remaining = validate(fixed);
  print_violations(out, remaining);
  return has_errors(remaining) ? kDataFailure : kOk;
}

int cmd_strip(const std::string& in, const std::string& out, bool drop_zeros) {
  write_text(out, serialize_corpus(strip_for_input(load(in), drop_zeros)));
  return kOk;
}

int cmd_score(const ScoreOptions& o) {
  ScoreConfig config;
  config.strategy = parse_strategy(o.match);
  config.zero_matching = parse_zero_matching(o.zero_match);
  config.keep_singletons = o.keep_singletons;
  std::vector<std::string> metrics;
  if (o.metrics != "all") {
    metrics = split_list(o.metrics);
    for (const auto& m : metrics)
      if (std::find(metric_names().begin(), metric_names().end(), m) == metric_names().end())
        throw CLI::ValidationError("--metrics", "unknown metric " + m);
  }
  const auto gold = load(o.gold);
  const auto pred = load(o.pred, o.autofix);
  auto report = score_dataset(gold, pred, config, o.dataset.empty() ? dataset_name(o.gold) : o.dataset);
  report.system = o.system;
  for (const auto& d : report.diagnostics) std::cerr << "note: " << d << "\n";
  if (o.format == "json") {
    RunManifest manifest{"score", {o.gold, o.pred}, config, kVersion, utc_now(), o.system};
    emit(report_json(report, manifest, metrics).dump(2) + "\n", o.out);
  } else {
    emit(report_tsv(report, metrics), o.out);
  }
  return kOk;
}

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

int cmd_stats(const std::string& path, bool include_singletons, const std::string& format) {
  const auto s = dataset_stats(load(path), include_singletons);
  if (format == "json") {
    nlohmann::json j{{"docs", s.docs},
                     {"sentences", s.sentences},
                     {"words", s.words},
                     {"empty_nodes", s.empty_nodes},
                     {"entities",
                      {{"total", s.entities},
                       {"per_1k_words", s.entities_per_1k()},
                       {"max_len", s.entity_max_len},
                       {"avg_len", s.entity_avg_len()}}},
                     {"mentions",
                      {{"total", s.mentions},
                       {"per_1k_words", s.mentions_per_1k()},
                       {"max_len_words", s.mention_max_len},
                       {"avg_len_words", s.mention_avg_len()}}},
                     {"entity_size_histogram", s.entity_size_histogram},
                     {"mention_length_histogram", s.mention_length_histogram},
                     {"with_empty_pct", s.share(s.with_empty)},
                     {"with_gap_pct", s.share(s.with_gap)},
                     {"non_treelet_pct", s.share(s.non_treelet)},
                     {"head_upos", s.head_upos_distribution()}};
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::cout << "field\tvalue\n";
  auto row = [](const std::string& k, const std::string& v) { std::cout << k << "\t" << v << "\n"; };
  row("docs", std::to_string(s.docs));
  row("sentences", std::to_string(s.sentences));
  row("words", std::to_string(s.words));
  row("empty_nodes", std::to_string(s.empty_nodes));
  row("entities", std::to_string(s.entities));
  row("entities_per_1k", fixed1(s.entities_per_1k()));
  row("entity_max_len", std::to_string(s.entity_max_len));
  row("entity_avg_len", fixed1(s.entity_avg_len()));
  row("mentions", std::to_string(s.mentions));
  row("mentions_per_1k", fixed1(s.mentions_per_1k()));
  row("mention_max_len", std::to_string(s.mention_max_len));
  row("mention_avg_len", fixed1(s.mention_avg_len()));
  const char* sizes[] = {"1", "2", "3", "4", "5+"};
  for (std::size_t i = 0; i < 5; ++i)
    row(std::string("entity_size_") + sizes[i], fixed1(s.entities ? 100.0 * s.entity_size_histogram[i] / s.entities : 0.0));
  const char* lengths[] = {"0", "1", "2", "3", "4", "5+"};
  for (std::size_t i = 0; i < 6; ++i) row(std::string("mention_len_") + lengths[i], fixed1(s.share(s.mention_length_histogram[i])));
  row("with_empty_pct", fixed1(s.share(s.with_empty)));
  row("with_gap_pct", fixed1(s.share(s.with_gap)));
  row("non_treelet_pct", fixed1(s.share(s.non_treelet)));
  for (const auto& [upos, share] : s.head_upos_distribution()) row("head_upos_" + upos, fixed1(100.0 * share));
  return kOk;
}

std::vector<std::pair<std::string, std::size_t>> profile_rows(const ErrorProfile& p) {
  return {{"span", p.span_errors},
          {"extra-entity", p.extra_entity},
          {"extra-mention", p.extra_mention},
          {"conflated-entities", p.conflated_entities},
          {"missing-entity", p.missing_entity},
          {"missing-mention", p.missing_mention},
          {"divided-entity", p.divided_entity}};
}

int cmd_errors(const std::string& gold_path, const std::string& pred_path, const std::string& max_row) {
  const auto profile = error_decomposition(load(gold_path), load(pred_path));
  std::map<std::string, double> maxima;
  if (!max_row.empty()) {
    std::stringstream in(read_text(max_row));
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      try {
        maxima[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
      } catch (const std::exception&) {
      }
    }
  }
  std::cout << "error\tcount" << (max_row.empty() ? "" : "\tshare") << "\n";
  for (const auto& [name, count] : profile_rows(profile)) {
    std::cout << name << "\t" << count;
    if (!max_row.empty()) {
      auto it = maxima.find(name);
      if (it == maxima.end() || it->second <= 0.0) std::cout << "\t-";
      else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", static_cast<double>(count) / it->second);
        std::cout << "\t" << buf;
      }
    }
    std::cout << "\n";
  }
  return kOk;
}

int cmd_upos(const std::string& gold_path, const std::string& pred_path, const std::string& level,
             const std::string& tags_arg) {
  const auto gold = load(gold_path);
  const auto pred = load(pred_path);
  const auto tags = split_list(tags_arg);
  auto filter = [&](const Corpus& c, const std::string& tag) {
    return level == "mention" ? filter_mentions_by_upos(c, tag) : filter_entities_by_upos(c, tag);
  };
  auto has_entities = [](const Corpus& c) {
    for (const auto& d : c.documents)
      for (const auto& e : d.entities)
        if (e.mentions.size() >= 2) return true;
    return false;
  };
  std::cout << "level";
  for (const auto& t : tags) std::cout << "\t" << t;
  std::cout << "\n" << level;
  for (const auto& t : tags) {
    const auto g = filter(gold, t), p = filter(pred, t);
    if (!has_entities(g) && !has_entities(p)) std::cout << "\t-";
    else std::cout << "\t" << percent(score_dataset(g, p).conll_f1);
  }
  std::cout << "\n";
  return kOk;
}

std::vector<std::string> conllu_files(const std::string& dir) {
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && (name.ends_with(".conllu") || name.ends_with(".conllu.gz")))
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_leaderboard(const std::vector<std::string>& report_paths, const std::string& gold_dir,
                    const std::vector<std::string>& preds, bool wide) {
  std::vector<ScoreReport> reports;
  for (const auto& path : report_paths) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text(path));
      reports.push_back(report_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw DataFailure(path + ": not a score report (" + e.what() + ")");
    }
  }
  if (!preds.empty() && gold_dir.empty()) throw CLI::ValidationError("--pred", "requires --gold-dir");
  if (!gold_dir.empty()) {
    const auto gold_files = conllu_files(gold_dir);
    for (const auto& entry : preds) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--pred", "expected SYSTEM=DIR, got " + entry);
      const std::string system = entry.substr(0, eq), dir = entry.substr(eq + 1);
      if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
      for (const auto& gold_path : gold_files) {
        const auto pred_path = (fs::path(dir) / fs::path(gold_path).filename()).string();
        if (!fs::exists(pred_path)) continue;  // counted as 0 by the averaging
        Corpus pred;
        try {
          pred = load(pred_path);
        } catch (const DataFailure& e) {
          std::cerr << "warning: " << e.what() << "; dataset scored 0\n";
          continue;
        }
        const auto gold = load(gold_path);
        for (auto [strategy, keep] : {std::pair{MatchStrategy::head, false}, {MatchStrategy::partial, false},
                                      {MatchStrategy::exact, false}, {MatchStrategy::head, true}}) {
          ScoreConfig c;
          c.strategy = strategy;
          c.keep_singletons = keep;
          auto r = score_dataset(gold, pred, c, dataset_name(gold_path));
          r.system = system;
          reports.push_back(std::move(r));
        }
      }
      bool any = std::any_of(reports.begin(), reports.end(), [&](const ScoreReport& r) { return r.system == system; });
      if (!any) {
        ScoreReport placeholder;
        placeholder.system = system;
        placeholder.dataset_id = gold_files.empty() ? "" : dataset_name(gold_files.front());
        reports.push_back(placeholder);
      }
    }
  }
  if (reports.empty()) throw DataFailure("no score reports given");

  const auto board = macro_average(reports);
  for (const auto& w : board.warnings) std::cerr << "warning: " << w << "\n";
  auto opt = [](const std::optional<double>& v) { return v ? percent(*v) : std::string("-"); };
  std::cout << "rank\tsystem\tprimary\tpartial\texact\twith-singletons";
  if (wide)
    for (const auto& d : board.datasets) std::cout << "\t" << d;
  std::cout << "\n";
  for (const auto& row : board.rows) {
    std::cout << row.rank << "\t" << row.system << "\t" << percent(row.primary) << "\t" << opt(row.partial) << "\t"
              << opt(row.exact) << "\t" << opt(row.with_singletons);
    if (wide)
      for (const auto& d : board.datasets) {
        auto it = row.per_dataset.find(d);
        std::cout << "\t" << percent(it == row.per_dataset.end() ? 0.0 : it->second);
      }
    std::cout << "\n";
  }
  return kOk;
}

int cmd_perturb(const std::string& gold, const std::string& out, const PerturbOptions& options) {
  for (double rate : {options.trim, options.drop, options.split, options.merge, options.displace})
    if (!(rate >= 0.0 && rate <= 1.0)) throw CLI::ValidationError("rates", "rates must lie in [0, 1]");
  write_text(out, serialize_corpus(perturb(load(gold), options)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coreference evaluation for CorefUD data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::vector<std::string> paths;
  auto* validate_cmd = app.add_subcommand("validate", "Check files for format violations");
  validate_cmd->add_option("files", paths, "CoNLL-U files")->required();

  std::string in, out;
  bool drop_zeros = false;
  auto* fix_cmd = app.add_subcommand("fix", "Apply automatic corrections");
  fix_cmd->add_option("input", in)->required();
  fix_cmd->add_option("output", out)->required();

  auto* strip_cmd = app.add_subcommand("strip", "Remove the coreference layer, as in system input");
  strip_cmd->add_option("input", in)->required();
  strip_cmd->add_option("output", out)->required();
  strip_cmd->add_flag("--drop-zeros", drop_zeros, "Remove empty nodes as well");

  ScoreOptions so;
  auto* score_cmd = app.add_subcommand("score", "Score a prediction against gold data");
  score_cmd->add_option("gold", so.gold)->required();
  score_cmd->add_option("pred", so.pred)->required();
  score_cmd->add_option("--match", so.match, "head, partial or exact")
      ->check(CLI::IsMember({"head", "partial", "exact"}));
  score_cmd->add_flag("--keep-singletons", so.keep_singletons);
  score_cmd->add_option("--zero-match", so.zero_match, "dependency or linear")
      ->check(CLI::IsMember({"dependency", "linear"}));
  score_cmd->add_option("--metrics", so.metrics, "comma-separated metrics or 'all'");
  score_cmd->add_option("--format", so.format)->check(CLI::IsMember({"tsv", "json"}));
  score_cmd->add_option("--out", so.out, "write the report here instead of standard output");
  score_cmd->add_flag("--autofix", so.autofix, "apply automatic corrections to the prediction first");
  score_cmd->add_option("--system", so.system, "system name recorded in the report");
  score_cmd->add_option("--dataset", so.dataset, "dataset id (default: gold file name)");

  bool include_singletons = false;
  std::string format = "tsv";
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("input", in)->required();
  stats_cmd->add_flag("--include-singletons", include_singletons);
  stats_cmd->add_option("--format", format)->check(CLI::IsMember({"tsv", "json"}));

  std::string gold, pred, max_row;
  auto* errors_cmd = app.add_subcommand("errors", "Error-type decomposition");
  errors_cmd->add_option("gold", gold)->required();
  errors_cmd->add_option("pred", pred)->required();
  errors_cmd->add_option("--max-row", max_row, "TSV of maximal counts for normalized shares");

  std::string level = "entity", tags = "NOUN,PRON,PROPN,DET,ADJ,VERB,ADV,NUM";
  auto* upos_cmd = app.add_subcommand("upos", "CoNLL F1 restricted to head UPOS tags");
  upos_cmd->add_option("gold", gold)->required();
  upos_cmd->add_option("pred", pred)->required();
  upos_cmd->add_option("--level", level)->check(CLI::IsMember({"entity", "mention"}));
  upos_cmd->add_option("--tags", tags, "comma-separated UPOS tags");

  std::vector<std::string> reports, preds;
  std::string gold_dir;
  bool wide = false;
  auto* board_cmd = app.add_subcommand("leaderboard", "Macro-averaged ranking");
  board_cmd->add_option("reports", reports, "JSON score reports");
  board_cmd->add_option("--gold-dir", gold_dir, "directory of gold files");
  board_cmd->add_option("--pred", preds, "SYSTEM=DIR with predictions named like the gold files");
  board_cmd->add_flag("--wide", wide, "add per-dataset columns");

  PerturbOptions po;
  auto* perturb_cmd = app.add_subcommand("perturb", "Generate a synthetic prediction");
  perturb_cmd->add_option("gold", gold)->required();
  perturb_cmd->add_option("output", out)->required();
  perturb_cmd->add_option("--trim", po.trim);
  perturb_cmd->add_option("--drop", po.drop);
  perturb_cmd->add_option("--split", po.split);
  perturb_cmd->add_option("--merge", po.merge);
  perturb_cmd->add_option("--displace", po.displace);
  perturb_cmd->add_option("--seed", po.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(paths);
    if (*fix_cmd) return cmd_fix(in, out);
    if (*strip_cmd) return cmd_strip(in, out, drop_zeros);
    if (*score_cmd) return cmd_score(so);
    if (*stats_cmd) return cmd_stats(in, include_singletons, format);
    if (*errors_cmd) return cmd_errors(gold, pred, max_row);
    if (*upos_cmd) return cmd_upos(gold, pred, level, tags);
    if (*board_cmd) return cmd_leaderboard(reports, gold_dir, preds, wide);
    if (*perturb_cmd) return cmd_perturb(gold, out, po);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataFailure;
  }
  return kUsage;
}
