#include "meetplay/session.hpp"

#include <algorithm>

#include "meetplay/error.hpp"
#include "meetplay/prng.hpp"

namespace meetplay {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxNicknameChars = 24;
constexpr std::size_t kInboxLimit = 256;

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return !is_continuation(static_cast<unsigned char>(c)); }));
}

// Longest prefix of s with at most n code points.
std::string_view take_code_points(std::string_view s, std::size_t n) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_continuation(static_cast<unsigned char>(s[i])) && seen++ == n) return s.substr(0, i);
  }
  return s;
}

}  // namespace

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::Lobby: return "lobby";
    case Phase::Meeting: return "meeting";
    case Phase::Break: return "break";
    case Phase::InGame: return "in_game";
    case Phase::Ended: return "ended";
  }
  return "ended";
}

bool phase_transition_allowed(Phase from, Phase to) {
  if (from == Phase::Ended) return false;
  if (to == Phase::Ended) return true;
  switch (from) {
    case Phase::Lobby: return to == Phase::Meeting;
    case Phase::Meeting: return to == Phase::Break || to == Phase::InGame;
    case Phase::Break: return to == Phase::Meeting || to == Phase::InGame;
    case Phase::InGame: return to == Phase::Meeting || to == Phase::Break;
    case Phase::Ended: return false;
  }
  return false;
}

void validate(const SessionConfig& config) {
  if (config.tick_ms != kTickMs) throw Error("invalid-config", "tick must be 50 ms");
  if (config.breaks.break_len_s == 0 || config.breaks.break_len_s >= config.breaks.interval_s) {
    throw Error("invalid-config", "need interval_s > break_len_s > 0");
  }
  if (config.max_catch_up_ticks == 0) throw Error("invalid-config", "catch-up cap must be positive");
  if (!(config.privacy >= 0 && config.privacy <= 1) ||
      !(config.attention_budget >= 0 && config.attention_budget <= 1) ||
      config.layout == Layout::Either) {
    throw Error("invalid-config", "break prompt context out of range");
  }
  try {
    validate(config.game);
    validate(config.gestures);
  } catch (const Error& e) {
    throw Error("invalid-config", e.what());
  }
}

std::string normalize_nickname(std::string_view raw) {
  const auto first = raw.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw Error("invalid-nickname", "nickname is empty");
  const auto last = raw.find_last_not_of(" \t\r\n");
  const auto name = raw.substr(first, last - first + 1);
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u == 0x7F) throw Error("invalid-nickname", "nickname has control characters");
  }
  if (code_points(name) > kMaxNicknameChars) {
    throw Error("invalid-nickname", "nickname longer than 24 characters");
  }
  return std::string(name);
}

Session::Session(std::string id, SessionConfig config, std::uint64_t seed, std::int64_t created_ms,
                 ResultsStore* store)
    : id_(std::move(id)),
      config_(std::move(config)),
      seed_(seed),
      store_(store),
      tracker_(config_.gestures),
      clock_ms_(created_ms) {
  validate(config_);
}

const Participant* Session::participant(const ParticipantId& id) const {
  auto it = std::find_if(roster_.begin(), roster_.end(), [&](const Participant& p) { return p.id == id; });
  return it == roster_.end() ? nullptr : &*it;
}

std::vector<RosterEntry> Session::present_roster() const {
  std::vector<RosterEntry> entries;
  for (const auto& p : roster_) {
    if (p.present) entries.push_back({p.id, p.nickname});
  }
  return entries;
}

void Session::broadcast_roster(Outbox& out) const {
  json list = json::array();
  for (const auto& p : roster_) {
    if (p.present) list.push_back({{"pid", p.id}, {"nickname", p.nickname}, {"join_seq", p.join_seq}});
  }
  out.push_back({std::nullopt, "roster", {{"participants", std::move(list)}}});
}

void Session::set_phase(Phase next, Outbox& out) {
  if (!phase_transition_allowed(phase_, next)) {
    throw Error("bad-transition", std::string(phase_name(phase_)) + " -> " + std::string(phase_name(next)));
  }
  transitions_.emplace_back(phase_, next);
  out.push_back({std::nullopt, "phase", {{"phase", phase_name(next)}, {"previous", phase_name(phase_)}}});
  phase_ = next;
}

ParticipantId Session::join(std::string_view nickname, Outbox& out) {
  if (phase_ == Phase::Ended) throw Error("session-ended", "session " + id_ + " has ended");
  const auto base = normalize_nickname(nickname);
  auto taken = [&](const std::string& name) {
    return std::any_of(roster_.begin(), roster_.end(), [&](const Participant& p) { return p.nickname == name; });
  };
  std::string name = base;
  for (std::size_t k = 2; taken(name); ++k) {
    const auto suffix = "#" + std::to_string(k);
    name = std::string(take_code_points(base, kMaxNicknameChars - suffix.size())) + suffix;
  }

  Participant p{"p" + std::to_string(++next_pid_), name, roster_.size(), true};
  tracker_.register_participant(p.id);
  roster_.push_back(p);
  if (phase_ == Phase::Lobby) {
    set_phase(Phase::Meeting, out);
    next_break_at_ = tick_ + std::uint64_t{config_.breaks.interval_s} * 1000 / config_.tick_ms;
  }
  broadcast_roster(out);
  return p.id;
}

void Session::leave(const ParticipantId& id, Outbox& out) {
  auto it = std::find_if(roster_.begin(), roster_.end(),
                         [&](const Participant& p) { return p.id == id && p.present; });
  if (it == roster_.end()) throw Error("participant-unknown", "no participant " + id);
  it->present = false;
  inbox_.erase(id);
  broadcast_roster(out);
  if (phase_ != Phase::Ended && present_roster().empty()) end(out);
}

void Session::queue_pose(PoseFrame frame) {
  const auto* p = participant(frame.participant_id);
  if (!p || !p->present) throw Error("participant-unknown", "no participant " + frame.participant_id);
  auto& queue = inbox_[frame.participant_id];
  if (queue.size() >= kInboxLimit) queue.erase(queue.begin());
  queue.push_back(std::move(frame));
}

void Session::start_game(GameKind kind, MeetingMoment trigger, Outbox& out) {
  if (phase_ == Phase::Ended) throw Error("session-ended", "session " + id_ + " has ended");
  if (game_) throw Error("game-active", "a game is already running");
  auto entries = present_roster();
  if (entries.empty()) throw Error("too-few-participants", "nobody has joined");

  const auto game_seed = Prng(seed_ + episode_).next();
  game_ = game_init(kind, entries, config_.game, game_seed);
  ++episode_;
  reps_at_start_.clear();
  for (const auto& e : entries) reps_at_start_[e.id] = tracker_.rep_counts(e.id);
  resume_phase_ = phase_;
  set_phase(Phase::InGame, out);

  const auto& profiles = default_catalog();
  const auto profile = std::find_if(profiles.begin(), profiles.end(),
                                    [&](const GameProfile& p) { return p.game == kind; });
  const bool warning = profile != profiles.end() && start_time_conflicts(profile->start_time, trigger);
  out.push_back({std::nullopt, "game_started",
                 {{"game", game_name(kind)},
                  {"seed", game_seed},
                  {"config", to_json(config_.game)},
                  {"warning", warning},
                  {"trigger", moment_name(trigger)}}});
}

GameResults Session::end_game(Outbox& out) {
  if (!game_) throw Error("no-active-game", "no game is running");
  std::map<ParticipantId, RepCounts> reps;
  for (const auto& entry : game_->roster) {
    const auto& now = tracker_.rep_counts(entry.id);
    const auto& then = reps_at_start_[entry.id];
    RepCounts delta{};
    for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = now[k] - then[k];
    reps[entry.id] = delta;
  }
  auto summary = results(*game_, reps);
  game_.reset();
  set_phase(resume_phase_, out);

  if (store_) {
    try {
      store_->append({clock_ms_, id_, summary});
    } catch (const Error& e) {
      out.push_back({std::nullopt, "error", {{"code", e.code()}, {"msg", e.what()}}});
    }
  }
  out.push_back({std::nullopt, "game_over", {{"results", to_json(summary)}}});
  return summary;
}

void Session::end(Outbox& out) {
  if (phase_ == Phase::Ended) return;
  if (game_) end_game(out);
  inbox_.clear();
  set_phase(Phase::Ended, out);
}

std::size_t Session::advance(std::int64_t now_ms, Outbox& out) {
  if (phase_ == Phase::Ended || now_ms <= clock_ms_) return 0;
  const auto owed = static_cast<std::uint64_t>(now_ms - clock_ms_) / config_.tick_ms;
  clock_ms_ += static_cast<std::int64_t>(owed * config_.tick_ms);
  const auto due = std::min<std::uint64_t>(owed, config_.max_catch_up_ticks);
  std::size_t ran = 0;
  for (; ran < due && phase_ != Phase::Ended; ++ran) run_tick(out);
  return ran;
}

void Session::run_tick(Outbox& out) {
  ++tick_;

  std::vector<PoseFrame> frames;
  for (const auto& p : roster_) {
    auto it = inbox_.find(p.id);
    if (it == inbox_.end()) continue;
    for (auto& f : it->second) frames.push_back(std::move(f));
  }
  inbox_.clear();
  // Roster order already breaks ties; stable sort keeps per-sender order.
  std::stable_sort(frames.begin(), frames.end(),
                   [](const PoseFrame& a, const PoseFrame& b) { return a.t_ms < b.t_ms; });

  TickInput input;
  for (const auto& f : frames) {
    try {
      auto events = tracker_.ingest_frame(f);
      input.events.insert(input.events.end(), events.begin(), events.end());
      input.frames[f.participant_id] = f;
    } catch (const Error&) {
      // stale frames are dropped
    }
  }

  if (phase_ == Phase::InGame && game_) {
    auto in_game = [&](const ParticipantId& id) {
      return std::any_of(game_->roster.begin(), game_->roster.end(),
                         [&](const RosterEntry& e) { return e.id == id; });
    };
    std::erase_if(input.events, [&](const GestureEvent& e) { return !in_game(e.participant_id); });
    std::erase_if(input.frames, [&](const auto& kv) { return !in_game(kv.first); });
    game_tick(*game_, input);
    out.push_back({std::nullopt, "snapshot",
                   {{"tick", game_->tick}, {"game", game_name(game_->kind)}, {"state", snapshot_json(*game_)}}});
    if (game_->terminal) end_game(out);
    return;
  }

  const auto ticks_for = [&](std::uint32_t seconds) {
    return std::uint64_t{seconds} * 1000 / config_.tick_ms;
  };
  if (phase_ == Phase::Meeting && tick_ >= next_break_at_) {
    set_phase(Phase::Break, out);
    break_ends_at_ = tick_ + ticks_for(config_.breaks.break_len_s);
    MeetingContext ctx{MeetingMoment::Break, config_.layout, config_.privacy, config_.attention_budget,
                       std::nullopt, config_.breaks.break_len_s / 60.0};
    const auto catalog = default_catalog();
    out.push_back({std::nullopt, "break_prompt",
                   {{"suggestions", to_json(recommend(ctx, catalog))},
                    {"break_len_s", config_.breaks.break_len_s}}});
  } else if (phase_ == Phase::Break && tick_ >= break_ends_at_) {
    set_phase(Phase::Meeting, out);
    next_break_at_ = tick_ + ticks_for(config_.breaks.interval_s);
  }
}

SessionManager::SessionManager(std::optional<std::filesystem::path> data_dir, std::uint64_t seed)
    : seed_(seed) {
  if (data_dir) store_.emplace(*data_dir);
}

std::string SessionManager::create_session(const SessionConfig& config, std::int64_t now_ms) {
  validate(config);
  const auto id = "s" + std::to_string(++created_);
  const auto session_seed = Prng(seed_ + created_).next();
  sessions_.emplace(id, std::make_unique<Session>(id, config, session_seed, now_ms, store()));
  return id;
}

Session* SessionManager::find(const std::string& id) {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

Session& SessionManager::get(const std::string& id) {
  auto* s = find(id);
  if (!s) throw Error("no-such-session", "no session '" + id + "'");
  return *s;
}

ParticipantId SessionManager::join(const std::string& session_id, std::string_view nickname, Outbox& out) {
  return get(session_id).join(nickname, out);
}

std::vector<std::string> SessionManager::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

}  // namespace meetplay
