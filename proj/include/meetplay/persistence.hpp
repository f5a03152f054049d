#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "meetplay/games.hpp"

namespace meetplay {

struct ResultsRecord {
  std::int64_t timestamp_ms = 0;
  std::string session_id;
  GameResults results;

  friend bool operator==(const ResultsRecord&, const ResultsRecord&) = default;
};

nlohmann::json to_json(const ResultsRecord& record);
ResultsRecord results_record_from_json(const nlohmann::json& j);

struct LeaderboardTotal {
  double total = 0.0;
  std::uint32_t episodes = 0;

  friend bool operator==(const LeaderboardTotal&, const LeaderboardTotal&) = default;
};

/// Keyed by nickname.
using CumulativeLeaderboard = std::map<std::string, LeaderboardTotal>;

void accumulate(CumulativeLeaderboard& board, const GameResults& results);
nlohmann::json to_json(const CumulativeLeaderboard& board);

/// Replays a results log. A missing file yields an empty board; an
/// unparseable line throws Error("corrupt-log").
CumulativeLeaderboard rebuild_leaderboard(const std::filesystem::path& results_log);

/// results.jsonl (append-only) plus leaderboard.json (rewritten after each
/// append) inside one directory.
class ResultsStore {
 public:
  /// Creates the directory if needed and rebuilds totals from the existing log.
  explicit ResultsStore(std::filesystem::path dir);

  /// Throws Error("io-error").
  void append(const ResultsRecord& record);

  const CumulativeLeaderboard& leaderboard() const { return board_; }
  std::filesystem::path results_path() const { return dir_ / "results.jsonl"; }
  std::filesystem::path leaderboard_path() const { return dir_ / "leaderboard.json"; }

 private:
  void write_leaderboard() const;

  std::filesystem::path dir_;
  CumulativeLeaderboard board_;
};

}  // namespace meetplay
