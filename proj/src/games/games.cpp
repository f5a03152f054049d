#include <algorithm>
#include <cctype>
#include <cmath>

#include "engines.hpp"
#include "meetplay/error.hpp"

namespace meetplay {

namespace detail {

std::uint64_t to_ms(double seconds) { return static_cast<std::uint64_t>(std::llround(seconds * 1000.0)); }

}  // namespace detail

std::string_view game_name(GameKind kind) {
  switch (kind) {
    case GameKind::Frost: return "frost";
    case GameKind::FoodRain: return "food_rain";
    case GameKind::VirusHitter: return "virus_hitter";
  }
  return "frost";
}

std::optional<GameKind> game_from_name(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (ch == '_' || ch == '-' || ch == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (key == "frost") return GameKind::Frost;
  if (key == "foodrain") return GameKind::FoodRain;
  if (key == "virushitter") return GameKind::VirusHitter;
  return std::nullopt;
}

std::string_view food_name(FoodType type) { return type == FoodType::Fruit ? "fruit" : "dessert"; }

std::string_view outcome_name(VirusOutcome outcome) {
  switch (outcome) {
    case VirusOutcome::Ongoing: return "ongoing";
    case VirusOutcome::Won: return "won";
    case VirusOutcome::Lost: return "lost";
  }
  return "ongoing";
}

std::string_view output_name(OutputKind kind) {
  switch (kind) {
    case OutputKind::ItemSpawned: return "ItemSpawned";
    case OutputKind::ItemCaught: return "ItemCaught";
    case OutputKind::ItemMissed: return "ItemMissed";
    case OutputKind::FrostCleared: return "FrostCleared";
    case OutputKind::BombLoaded: return "BombLoaded";
    case OutputKind::BombLaunched: return "BombLaunched";
    case OutputKind::GameWon: return "GameWon";
    case OutputKind::GameLost: return "GameLost";
    case OutputKind::GameFinished: return "GameFinished";
  }
  return "GameFinished";
}

void validate(const GameConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error("invalid-config", what);
  };
  require(c.tick_ms == kTickMs, "engines run at a fixed 50 ms tick");
  const auto& f = c.frost;
  require(f.grid_cols >= 2 && f.grid_rows >= 2, "frost grid must be at least 2x2");
  require(f.edge_growth_per_s > 0 && f.interior_growth_per_s > 0, "frost growth must be positive");
  require(f.clear_radius > 0 && f.clear_displacement > 0, "frost clearing must be positive");
  require(f.interior_gate >= 0 && f.interior_gate <= 1, "frost gate must be in [0,1]");
  require(f.covered_threshold >= 0 && f.covered_threshold <= 1, "covered threshold in [0,1]");
  const auto& r = c.food_rain;
  require(r.duration_s > 0 && r.spawn_interval_s > 0 && r.fall_speed > 0,
          "food rain durations and rates must be positive");
  require(r.fruit_probability >= 0 && r.fruit_probability <= 1, "fruit probability in [0,1]");
  require(r.catch_half_width > 0 && r.catch_half_height > 0, "catch box must be positive");
  require(r.spawn_x_min >= 0 && r.spawn_x_min <= r.spawn_x_max && r.spawn_x_max <= 1,
          "spawn range must lie in [0,1]");
  require(detail::to_ms(r.spawn_interval_s) > 0, "spawn interval below 1 ms");
  const auto& v = c.virus_hitter;
  require(v.duration_s > 0 && v.bomb_cap > 0 && v.aim_dwell_ms > 0 && v.hp_per_assistant > 0,
          "virus hitter durations and counts must be positive");
  require(v.torch_smoothing > 0 && v.torch_smoothing <= 1, "torch smoothing in (0,1]");
}

GameState game_init(GameKind kind, std::vector<RosterEntry> participants, const GameConfig& config,
                    std::uint64_t seed) {
  validate(config);
  if (participants.empty()) throw Error("empty-roster", "a game needs at least one participant");
  GameState state;
  state.kind = kind;
  state.config = config;
  state.seed = seed;
  switch (kind) {
    case GameKind::Frost:
      state.detail = detail::frost_init(participants, config.frost);
      break;
    case GameKind::FoodRain:
      state.detail = detail::food_rain_init(participants, config.food_rain, seed);
      break;
    case GameKind::VirusHitter:
      state.detail = detail::virus_hitter_init(participants, config.virus_hitter, seed);
      break;
  }
  state.roster = std::move(participants);
  return state;
}

void sort_tick_events(std::vector<GestureEvent>& events, std::span<const RosterEntry> roster) {
  auto position = [&](const ParticipantId& id) {
    for (std::size_t i = 0; i < roster.size(); ++i) {
      if (roster[i].id == id) return i;
    }
    return roster.size();
  };
  std::stable_sort(events.begin(), events.end(), [&](const GestureEvent& a, const GestureEvent& b) {
    if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
    return position(a.participant_id) < position(b.participant_id);
  });
}

std::vector<GameOutput> game_tick(GameState& state, const TickInput& input) {
  if (state.terminal) throw Error("terminal-state", "game already finished");
  TickInput ordered = input;
  sort_tick_events(ordered.events, state.roster);

  ++state.tick;
  const std::uint64_t now = state.elapsed_ms();
  std::vector<GameOutput> out;
  std::visit(
      [&](auto& game) {
        using T = std::decay_t<decltype(game)>;
        if constexpr (std::is_same_v<T, FrostState>) {
          detail::frost_tick(game, state.config.frost, ordered, out);
        } else if constexpr (std::is_same_v<T, FoodRainState>) {
          state.terminal = detail::food_rain_tick(game, state.config.food_rain, now, ordered, out);
        } else {
          state.terminal =
              detail::virus_hitter_tick(game, state.config.virus_hitter, now, ordered, out);
        }
      },
      state.detail);
  return out;
}

std::vector<LeaderboardRow> rank_scores(
    std::span<const std::pair<std::string, std::int64_t>> scores) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].second > scores[b].second; });
  std::vector<LeaderboardRow> rows;
  rows.reserve(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& [name, score] = scores[order[pos]];
    int rank = static_cast<int>(pos) + 1;
    if (pos > 0 && rows.back().score == score) rank = rows.back().rank;
    rows.push_back({rank, name, score});
  }
  return rows;
}

std::vector<LeaderboardRow> leaderboard(const FoodRainState& state,
                                        std::span<const RosterEntry> roster) {
  std::vector<std::pair<std::string, std::int64_t>> scores;
  for (const auto& entry : roster) {
    for (const auto& p : state.players) {
      if (p.id == entry.id) scores.emplace_back(entry.nickname, p.score);
    }
  }
  return rank_scores(scores);
}

GameResults results(const GameState& state, const std::map<ParticipantId, RepCounts>& reps) {
  GameResults r;
  r.kind = state.kind;
  r.duration_ms = state.elapsed_ms();
  r.outcome = state.terminal ? "completed" : "ended";

  for (const auto& entry : state.roster) {
    ParticipantResult p;
    p.id = entry.id;
    p.nickname = entry.nickname;
    RepCounts counts{};
    if (auto it = reps.find(entry.id); it != reps.end()) counts = it->second;
    for (auto kind : kAllGestureKinds) {
      p.reps[std::string(gesture_name(kind))] = counts[static_cast<std::size_t>(kind)];
    }
    r.participants.push_back(std::move(p));
  }

  auto find = [&](const ParticipantId& id) -> ParticipantResult& {
    return *std::find_if(r.participants.begin(), r.participants.end(),
                         [&](const ParticipantResult& p) { return p.id == id; });
  };

  if (const auto* frost = std::get_if<FrostState>(&state.detail)) {
    for (const auto& player : frost->players) {
      auto& p = find(player.id);
      p.score = player.clears;
      p.metrics["coverage"] = frost_coverage(player, state.config.frost);
      p.metrics["clears"] = player.clears;
    }
  } else if (const auto* rain = std::get_if<FoodRainState>(&state.detail)) {
    for (const auto& player : rain->players) {
      auto& p = find(player.id);
      p.score = player.score;
      p.metrics["fruits_caught"] = player.fruits_caught;
      p.metrics["desserts_caught"] = player.desserts_caught;
      p.metrics["missed"] = player.missed;
      p.metrics["spawned"] = player.spawned;
    }
  } else if (const auto* virus = std::get_if<VirusHitterState>(&state.detail)) {
    if (virus->outcome != VirusOutcome::Ongoing) r.outcome = std::string(outcome_name(virus->outcome));
    auto& hitter = find(virus->hitter);
    hitter.score = virus->launches;
    hitter.metrics["hitter"] = 1;
    hitter.metrics["launches"] = virus->launches;
    hitter.metrics["virus_hp"] = virus->hp;
    hitter.metrics["virus_max_hp"] = virus->max_hp;
    for (const auto& tower : virus->towers) {
      auto& p = find(tower.assistant);
      p.score = tower.bombs_loaded;
      p.metrics["hitter"] = 0;
      p.metrics["color"] = tower.color;
      p.metrics["bombs_loaded"] = tower.bombs_loaded;
      p.metrics["launches"] = tower.launches;
    }
  }
  return r;
}

}  // namespace meetplay
