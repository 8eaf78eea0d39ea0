#pragma once

// Machine- and human-readable score reports. Scores are percentages; TSV
// rounds to two decimals, JSON keeps full precision.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corefeval/align.hpp"
#include "corefeval/errors.hpp"
#include "corefeval/score.hpp"

namespace corefeval {

inline constexpr const char* kVersion = "1.0.0";

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  ScoreConfig config;
  std::string version = kVersion;
  std::string timestamp;
  std::string system;
};

inline std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

inline MatchStrategy parse_strategy(const std::string& s) {
  if (s == "head") return MatchStrategy::head;
  if (s == "partial") return MatchStrategy::partial;
  if (s == "exact") return MatchStrategy::exact;
  throw Error("unknown match strategy " + s);
}

inline ZeroMatching parse_zero_matching(const std::string& s) {
  if (s == "dependency") return ZeroMatching::dependency;
  if (s == "linear") return ZeroMatching::linear;
  throw Error("unknown zero matching " + s);
}

inline nlohmann::json config_json(const ScoreConfig& c) {
  return {{"match", std::string(to_string(c.strategy))},
          {"keep_singletons", c.keep_singletons},
          {"zero_match", std::string(to_string(c.zero_matching))}};
}

inline ScoreConfig config_from_json(const nlohmann::json& j) {
  ScoreConfig c;
  c.strategy = parse_strategy(j.value("match", "head"));
  c.keep_singletons = j.value("keep_singletons", false);
  c.zero_matching = parse_zero_matching(j.value("zero_match", "dependency"));
  return c;
}

inline nlohmann::json triple_json(const ScoreTriple& t) {
  return {{"recall", 100.0 * t.recall}, {"precision", 100.0 * t.precision}, {"f1", 100.0 * t.f1}};
}

inline ScoreTriple triple_from_json(const nlohmann::json& j) {
  return {j.at("recall").get<double>() / 100.0, j.at("precision").get<double>() / 100.0,
          j.at("f1").get<double>() / 100.0, false};
}

inline nlohmann::json manifest_json(const RunManifest& m) {
  return {{"command", m.command}, {"inputs", m.inputs},   {"config", config_json(m.config)},
          {"version", m.version}, {"timestamp", m.timestamp}, {"system", m.system}};
}

inline nlohmann::json profile_json(const ErrorProfile& p) {
  return {{"span", p.span_errors},
          {"extra_entity", p.extra_entity},
          {"extra_mention", p.extra_mention},
          {"conflated_entities", p.conflated_entities},
          {"missing_entity", p.missing_entity},
          {"missing_mention", p.missing_mention},
          {"divided_entity", p.divided_entity}};
}

/// `metrics` limits the per-metric block; empty means all.
inline nlohmann::json report_json(const ScoreReport& r, const RunManifest& manifest,
                                  const std::vector<std::string>& metrics = {},
                                  const std::optional<ErrorProfile>& profile = std::nullopt) {
  nlohmann::json j;
  j["manifest"] = manifest_json(manifest);
  j["dataset_id"] = r.dataset_id;
  j["system"] = r.system;
  nlohmann::json scores = nlohmann::json::object();
  for (const auto& [name, triple] : r.per_metric)
    if (metrics.empty() || std::find(metrics.begin(), metrics.end(), name) != metrics.end())
      scores[name] = triple_json(triple);
  j["scores"] = scores;
  j["conll_f1"] = 100.0 * r.conll_f1;
  j["mor"] = triple_json(r.mor);
  j["zero_anaphora"] = r.zero_anaphora ? triple_json(*r.zero_anaphora) : nlohmann::json(nullptr);
  j["empty_nodes"] = r.empty_nodes ? triple_json(*r.empty_nodes) : nlohmann::json(nullptr);
  j["diagnostics"] = r.diagnostics;
  if (profile) j["error_profile"] = profile_json(*profile);
  return j;
}

inline ScoreReport report_from_json(const nlohmann::json& j) {
  ScoreReport r;
  r.dataset_id = j.value("dataset_id", "");
  r.system = j.value("system", "");
  if (j.contains("manifest")) {
    const auto& m = j.at("manifest");
    if (m.contains("config")) r.config = config_from_json(m.at("config"));
    if (r.system.empty()) r.system = m.value("system", "");
  }
  for (const auto& [name, t] : j.at("scores").items()) r.per_metric[name] = triple_from_json(t);
  r.conll_f1 = j.at("conll_f1").get<double>() / 100.0;
  if (j.contains("mor")) r.mor = triple_from_json(j.at("mor"));
  if (j.contains("zero_anaphora") && !j.at("zero_anaphora").is_null())
    r.zero_anaphora = triple_from_json(j.at("zero_anaphora"));
  if (j.contains("empty_nodes") && !j.at("empty_nodes").is_null())
    r.empty_nodes = triple_from_json(j.at("empty_nodes"));
  return r;
}

inline std::string report_tsv(const ScoreReport& r, const std::vector<std::string>& metrics = {}) {
  std::string out = "metric\trecall\tprecision\tf1\n";
  auto row = [&](const std::string& name, const std::optional<ScoreTriple>& t) {
    if (t) out += name + "\t" + percent(t->recall) + "\t" + percent(t->precision) + "\t" + percent(t->f1) + "\n";
    else out += name + "\t-\t-\t-\n";
  };
  for (const auto& name : metric_names()) {
    if (!metrics.empty() && std::find(metrics.begin(), metrics.end(), name) == metrics.end()) continue;
    auto it = r.per_metric.find(name);
    row(name, it == r.per_metric.end() ? std::nullopt : std::optional<ScoreTriple>(it->second));
  }
  out += "conll-f1\t-\t-\t" + percent(r.conll_f1) + "\n";
  row("mor", r.mor);
  row("zero-anaphora", r.zero_anaphora);
  row("empty-nodes", r.empty_nodes);
  return out;
}

}  // namespace corefeval
