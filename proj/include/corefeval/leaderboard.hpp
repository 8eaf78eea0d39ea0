#pragma once

// Macro-averaged ranking of systems over datasets.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "corefeval/score.hpp"

namespace corefeval {

/// Which leaderboard column a report feeds, decided by its configuration.
enum class Column { primary, partial, exact, with_singletons, other };

inline Column column_of(const ScoreConfig& c) {
  if (c.zero_matching != ZeroMatching::dependency) return Column::other;
  if (c.keep_singletons) return c.strategy == MatchStrategy::head ? Column::with_singletons : Column::other;
  switch (c.strategy) {
    case MatchStrategy::head: return Column::primary;
    case MatchStrategy::partial: return Column::partial;
    case MatchStrategy::exact: return Column::exact;
  }
  return Column::other;
}

struct LeaderboardRow {
  std::size_t rank = 0;
  std::string system;
  double primary = 0.0;
  std::optional<double> partial;
  std::optional<double> exact;
  std::optional<double> with_singletons;
  /// Primary CoNLL F1 per dataset id.
  std::map<std::string, double> per_dataset;
};

struct Leaderboard {
  std::vector<std::string> datasets;
  std::vector<LeaderboardRow> rows;
  std::vector<std::string> warnings;
};

inline double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

/// Rows are ordered by descending primary score; equal scores keep their
/// first-appearance order and share a rank.
inline Leaderboard macro_average(const std::vector<ScoreReport>& reports) {
  Leaderboard board;
  std::vector<std::string> systems;
  std::set<std::string> dataset_set;
  std::map<std::string, std::map<Column, std::map<std::string, double>>> scores;
  for (const auto& r : reports) {
    if (std::find(systems.begin(), systems.end(), r.system) == systems.end()) systems.push_back(r.system);
    const Column c = column_of(r.config);
    if (c == Column::other) {
      board.warnings.push_back("report for " + r.system + "/" + r.dataset_id +
                               " uses a configuration without a leaderboard column; ignored");
      continue;
    }
    dataset_set.insert(r.dataset_id);
    scores[r.system][c][r.dataset_id] = r.conll_f1;
  }
  board.datasets.assign(dataset_set.begin(), dataset_set.end());

  for (const auto& system : systems) {
    LeaderboardRow row;
    row.system = system;
    const auto& by_column = scores[system];
    auto average = [&](Column c, const char* label) -> std::optional<double> {
      auto it = by_column.find(c);
      if (it == by_column.end()) return std::nullopt;
      std::vector<double> values;
      for (const auto& d : board.datasets) {
        auto v = it->second.find(d);
        if (v == it->second.end()) {
          board.warnings.push_back(system + " has no " + label + " score for " + d + "; counted as 0");
          values.push_back(0.0);
        } else {
          values.push_back(v->second);
        }
      }
      return mean(values);
    };
    row.primary = average(Column::primary, "primary").value_or(0.0);
    if (!by_column.count(Column::primary))
      board.warnings.push_back(system + " has no primary scores; counted as 0");
    row.partial = average(Column::partial, "partial");
    row.exact = average(Column::exact, "exact");
    row.with_singletons = average(Column::with_singletons, "with-singletons");
    if (auto it = by_column.find(Column::primary); it != by_column.end()) row.per_dataset = it->second;
    board.rows.push_back(std::move(row));
  }

  std::stable_sort(board.rows.begin(), board.rows.end(),
                   [](const LeaderboardRow& a, const LeaderboardRow& b) { return a.primary > b.primary; });
  for (std::size_t i = 0; i < board.rows.size(); ++i)
    board.rows[i].rank = i > 0 && board.rows[i].primary == board.rows[i - 1].primary ? board.rows[i - 1].rank : i + 1;
  return board;
}

}  // namespace corefeval
