#include "meetplay/persistence.hpp"

#include <fstream>

#include "meetplay/error.hpp"

namespace meetplay {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const ResultsRecord& record) {
  json j = to_json(record.results);
  j["timestamp"] = record.timestamp_ms;
  j["session_id"] = record.session_id;
  return j;
}

ResultsRecord results_record_from_json(const json& j) {
  ResultsRecord r;
  r.timestamp_ms = j.at("timestamp").get<std::int64_t>();
  r.session_id = j.at("session_id").get<std::string>();
  r.results = game_results_from_json(j);
  return r;
}

void accumulate(CumulativeLeaderboard& board, const GameResults& results) {
  for (const auto& p : results.participants) {
    auto& row = board[p.nickname];
    row.total += p.score;
    ++row.episodes;
  }
}

json to_json(const CumulativeLeaderboard& board) {
  json out = json::object();
  for (const auto& [nickname, row] : board) {
    out[nickname] = {{"total", row.total}, {"episodes", row.episodes}};
  }
  return out;
}

CumulativeLeaderboard rebuild_leaderboard(const fs::path& results_log) {
  CumulativeLeaderboard board;
  std::ifstream in(results_log);
  if (!in) return board;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      accumulate(board, results_record_from_json(json::parse(line)).results);
    } catch (const std::exception& e) {
      throw Error("corrupt-log", results_log.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return board;
}

ResultsStore::ResultsStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error("io-error", "cannot create " + dir_.string() + ": " + ec.message());
  board_ = rebuild_leaderboard(results_path());
}

void ResultsStore::append(const ResultsRecord& record) {
  {
    std::ofstream out(results_path(), std::ios::app);
    out << to_json(record).dump() << '\n';
    out.flush();
    if (!out) throw Error("io-error", "cannot append to " + results_path().string());
  }
  accumulate(board_, record.results);
  write_leaderboard();
}

void ResultsStore::write_leaderboard() const {
  const auto tmp = dir_ / "leaderboard.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << to_json(board_).dump(2) << '\n';
    out.flush();
    if (!out) throw Error("io-error", "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, leaderboard_path(), ec);
  if (ec) throw Error("io-error", "cannot replace " + leaderboard_path().string() + ": " + ec.message());
}

}  // namespace meetplay
