#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "meetplay/catalog.hpp"
#include "meetplay/games.hpp"
#include "meetplay/gesture.hpp"
#include "meetplay/persistence.hpp"

namespace meetplay {

enum class Phase { Lobby, Meeting, Break, InGame, Ended };

std::string_view phase_name(Phase phase);
/// lobby->meeting<->break, {meeting,break}->in_game->{meeting,break}, any->ended.
bool phase_transition_allowed(Phase from, Phase to);

struct BreakSchedule {
  std::uint32_t interval_s = 1200;
  std::uint32_t break_len_s = 300;
};

struct SessionConfig {
  BreakSchedule breaks;
  std::uint32_t tick_ms = kTickMs;
  std::uint32_t max_catch_up_ticks = 10;
  GameConfig game;
  GestureParams gestures;
  /// Context used for break prompts.
  Layout layout = Layout::Symmetric;
  double privacy = 0.5;
  double attention_budget = 0.5;
};

/// Throws Error("invalid-config").
void validate(const SessionConfig& config);

struct Participant {
  ParticipantId id;
  std::string nickname;
  std::uint64_t join_seq = 0;
  bool present = true;
};

/// A message produced by the session. `to` empty means every present member.
struct Outbound {
  std::optional<ParticipantId> to;
  std::string type;
  nlohmann::json payload;
};

using Outbox = std::vector<Outbound>;

/// Trims and validates (1-24 printable characters). Throws
/// Error("invalid-nickname").
std::string normalize_nickname(std::string_view raw);

class Session {
 public:
  Session(std::string id, SessionConfig config, std::uint64_t seed, std::int64_t created_ms,
          ResultsStore* store = nullptr);

  const std::string& id() const { return id_; }
  Phase phase() const { return phase_; }
  const std::vector<Participant>& roster() const { return roster_; }
  const SessionConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t tick() const { return tick_; }
  std::uint64_t next_break_at() const { return next_break_at_; }
  std::uint32_t episodes() const { return episode_; }
  const GameState* game() const { return game_ ? &*game_ : nullptr; }
  const GestureTracker& gestures() const { return tracker_; }
  const std::vector<std::pair<Phase, Phase>>& transitions() const { return transitions_; }
  const Participant* participant(const ParticipantId& id) const;

  /// Throws Error("session-ended") or Error("invalid-nickname").
  ParticipantId join(std::string_view nickname, Outbox& out);
  /// Throws Error("participant-unknown").
  void leave(const ParticipantId& id, Outbox& out);
  /// Queued until the next tick. Throws Error("participant-unknown").
  void queue_pose(PoseFrame frame);

  /// Throws Error("session-ended"), Error("game-active") or
  /// Error("too-few-participants").
  void start_game(GameKind kind, MeetingMoment trigger, Outbox& out);
  /// Throws Error("no-active-game").
  GameResults end_game(Outbox& out);

  /// Runs the ticks owed up to now_ms; returns how many ran.
  std::size_t advance(std::int64_t now_ms, Outbox& out);
  void end(Outbox& out);

 private:
  void set_phase(Phase next, Outbox& out);
  void run_tick(Outbox& out);
  void broadcast_roster(Outbox& out) const;
  std::vector<RosterEntry> present_roster() const;

  std::string id_;
  SessionConfig config_;
  std::uint64_t seed_;
  ResultsStore* store_;
  Phase phase_ = Phase::Lobby;
  std::vector<std::pair<Phase, Phase>> transitions_;
  std::vector<Participant> roster_;
  std::uint64_t next_pid_ = 0;
  GestureTracker tracker_;
  std::map<ParticipantId, std::vector<PoseFrame>> inbox_;

  std::int64_t clock_ms_;
  std::uint64_t tick_ = 0;
  std::uint64_t next_break_at_ = 0;
  std::uint64_t break_ends_at_ = 0;

  std::optional<GameState> game_;
  Phase resume_phase_ = Phase::Meeting;
  std::uint32_t episode_ = 0;
  std::map<ParticipantId, RepCounts> reps_at_start_;
};

class SessionManager {
 public:
  /// Without a data directory nothing is persisted.
  explicit SessionManager(std::optional<std::filesystem::path> data_dir = std::nullopt,
                          std::uint64_t seed = 0);

  /// Ids are "s1", "s2", ... Throws Error("invalid-config").
  std::string create_session(const SessionConfig& config, std::int64_t now_ms);
  /// Throws Error("no-such-session").
  Session& get(const std::string& id);
  Session* find(const std::string& id);
  /// Throws Error("no-such-session"), Error("session-ended") or
  /// Error("invalid-nickname").
  ParticipantId join(const std::string& session_id, std::string_view nickname, Outbox& out);
  std::vector<std::string> ids() const;
  ResultsStore* store() { return store_ ? &*store_ : nullptr; }

 private:
  std::optional<ResultsStore> store_;
  std::uint64_t seed_;
  std::uint64_t created_ = 0;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
};

}  // namespace meetplay
