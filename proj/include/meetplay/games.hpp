#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "meetplay/gesture.hpp"
#include "meetplay/pose.hpp"
#include "meetplay/prng.hpp"

namespace meetplay {

enum class GameKind { Frost, FoodRain, VirusHitter };

std::string_view game_name(GameKind kind);
/// Accepts the canonical names ("frost", "food_rain", "virus_hitter") and
/// separator-free spellings such as "foodrain".
std::optional<GameKind> game_from_name(std::string_view name);

/// The only timestep the engines run at.
inline constexpr std::uint32_t kTickMs = 50;
inline constexpr double kTickSeconds = kTickMs / 1000.0;

struct FrostConfig {
  int grid_cols = 32;
  int grid_rows = 18;
  double edge_growth_per_s = 0.15;
  double interior_growth_per_s = 0.25;
  /// Interior cells grow only when their strongest 4-neighbor is at least this.
  double interior_gate = 0.5;
  double clear_radius = 0.12;
  /// Per-frame keypoint displacement needed to wipe frost.
  double clear_displacement = 0.01;
  /// A cell counts as covered at or above this intensity.
  double covered_threshold = 0.5;
};

struct FoodRainConfig {
  double duration_s = 90.0;
  double spawn_interval_s = 1.2;
  double fruit_probability = 0.7;
  /// Tile heights per second.
  double fall_speed = 0.25;
  double catch_half_width = 0.08;
  double catch_half_height = 0.06;
  double spawn_x_min = 0.1;
  double spawn_x_max = 0.9;
};

struct VirusHitterConfig {
  double duration_s = 120.0;
  int bomb_cap = 3;
  std::uint32_t aim_dwell_ms = 600;
  int hp_per_assistant = 2;
  /// Exponential smoothing factor applied to the torch each tick.
  double torch_smoothing = 0.3;
};

struct GameConfig {
  std::uint32_t tick_ms = kTickMs;
  FrostConfig frost;
  FoodRainConfig food_rain;
  VirusHitterConfig virus_hitter;
};

/// Throws Error("invalid-config") on non-positive rates or durations,
/// probabilities outside [0,1], grids smaller than 2x2, or a tick other than
/// 50 ms.
void validate(const GameConfig& config);

struct RosterEntry {
  ParticipantId id;
  std::string nickname;

  friend bool operator==(const RosterEntry&, const RosterEntry&) = default;
};

// --- Frost -----------------------------------------------------------------

struct FrostPlayer {
  ParticipantId id;
  /// Row-major intensities in [0,1], grid_rows x grid_cols.
  std::vector<double> cells;
  /// Covered cells wiped so far.
  std::uint32_t clears = 0;
  std::optional<KeypointSet> previous;
};

struct FrostState {
  std::vector<FrostPlayer> players;
};

// --- Food Rain -------------------------------------------------------------

enum class FoodType { Fruit, Dessert };
std::string_view food_name(FoodType type);

struct FoodItem {
  std::uint64_t id = 0;
  FoodType type = FoodType::Fruit;
  double x = 0.0;
  double y = 0.0;
};

struct MouthPoint {
  double x = 0.0;
  double y = 0.0;
};

struct FoodRainPlayer {
  ParticipantId id;
  std::vector<FoodItem> items;
  std::int64_t score = 0;
  std::uint32_t spawned = 0;
  std::uint32_t fruits_caught = 0;
  std::uint32_t desserts_caught = 0;
  std::uint32_t missed = 0;
  bool mouth_open = false;
  std::optional<MouthPoint> mouth_center;
};

struct FoodRainState {
  Prng prng;
  std::uint64_t next_item_id = 0;
  std::uint64_t next_spawn_ms = 0;
  std::vector<FoodRainPlayer> players;
};

// --- Virus Hitter ----------------------------------------------------------

inline constexpr int kPaletteSize = 8;

enum class VirusOutcome { Ongoing, Won, Lost };
std::string_view outcome_name(VirusOutcome outcome);

struct Watchtower {
  ParticipantId assistant;
  int color = 0;
  int bombs = 0;
  std::uint32_t bombs_loaded = 0;
  std::uint32_t launches = 0;
  std::uint32_t dwell_ms = 0;
};

struct VirusHitterState {
  ParticipantId hitter;
  std::vector<Watchtower> towers;
  double torch_x = 0.5;
  int hp = 0;
  int max_hp = 0;
  std::uint32_t launches = 0;
  VirusOutcome outcome = VirusOutcome::Ongoing;
};

struct RoleAssignment {
  ParticipantId hitter;
  /// Assistants in roster order with palette colors 0..k-1.
  std::vector<std::pair<ParticipantId, int>> assistants;
};

/// Picks the hitter with prng.below(n). Throws Error("too-few-participants")
/// below 2 and Error("too-many-participants") above 9.
RoleAssignment assign_roles(std::span<const RosterEntry> participants, Prng& prng);

// --- Shared ----------------------------------------------------------------

struct GameState {
  GameKind kind = GameKind::Frost;
  GameConfig config;
  std::vector<RosterEntry> roster;
  std::uint64_t seed = 0;
  std::uint64_t tick = 0;
  bool terminal = false;
  std::variant<FrostState, FoodRainState, VirusHitterState> detail;

  std::uint64_t elapsed_ms() const { return tick * config.tick_ms; }
};

/// Input for one 50 ms tick: the gesture events detected during it and the
/// newest pose frame per participant.
struct TickInput {
  std::vector<GestureEvent> events;
  std::map<ParticipantId, PoseFrame> frames;
};

enum class OutputKind {
  ItemSpawned,
  ItemCaught,
  ItemMissed,
  FrostCleared,
  BombLoaded,
  BombLaunched,
  GameWon,
  GameLost,
  GameFinished,
};
std::string_view output_name(OutputKind kind);

struct GameOutput {
  OutputKind kind = OutputKind::GameFinished;
  ParticipantId participant;
  /// Item id, tower index, or cleared-cell count depending on kind.
  std::int64_t ref = 0;
  /// Score change for ItemCaught.
  int delta = 0;

  friend bool operator==(const GameOutput&, const GameOutput&) = default;
};

/// Throws Error("empty-roster"), Error("too-few-participants"), or
/// Error("invalid-config").
GameState game_init(GameKind kind, std::vector<RosterEntry> participants,
                    const GameConfig& config, std::uint64_t seed);

/// Advances one tick. Events are ordered by (t_ms, join order) before use.
/// Throws Error("terminal-state") when the game has already finished.
std::vector<GameOutput> game_tick(GameState& state, const TickInput& input);

/// Orders events by timestamp, then by the participant's roster position.
void sort_tick_events(std::vector<GestureEvent>& events, std::span<const RosterEntry> roster);

/// Fraction of cells at or above the covered threshold. Throws
/// Error("unknown-participant").
double frost_coverage(const GameState& state, const ParticipantId& participant);
double frost_coverage(const FrostPlayer& player, const FrostConfig& config);

struct LeaderboardRow {
  int rank = 0;
  std::string nickname;
  std::int64_t score = 0;

  friend bool operator==(const LeaderboardRow&, const LeaderboardRow&) = default;
};

/// Descending by score with competition ranking (1-2-2-4); equal scores keep
/// roster order.
std::vector<LeaderboardRow> rank_scores(
    std::span<const std::pair<std::string, std::int64_t>> scores_in_join_order);
std::vector<LeaderboardRow> leaderboard(const FoodRainState& state,
                                        std::span<const RosterEntry> roster);

struct ParticipantResult {
  ParticipantId id;
  std::string nickname;
  /// Leaderboard contribution: Food Rain score, Frost clears, Virus Hitter
  /// bombs loaded (assistants) or launches (hitter).
  std::int64_t score = 0;
  std::map<std::string, double> metrics;
  std::map<std::string, std::uint32_t> reps;

  friend bool operator==(const ParticipantResult&, const ParticipantResult&) = default;
};

struct GameResults {
  GameKind kind = GameKind::Frost;
  /// "completed", "won", "lost", or "ended" when stopped early.
  std::string outcome;
  std::uint64_t duration_ms = 0;
  std::vector<ParticipantResult> participants;

  friend bool operator==(const GameResults&, const GameResults&) = default;
};

/// Immutable summary of an episode. `reps` maps participants to their gesture
/// tallies; participants without an entry get zeros.
GameResults results(const GameState& state, const std::map<ParticipantId, RepCounts>& reps);

// --- JSON ------------------------------------------------------------------

nlohmann::json to_json(const GameConfig& config);
GameConfig game_config_from_json(const nlohmann::json& j);
/// The `state` object of a snapshot message.
nlohmann::json snapshot_json(const GameState& state);
nlohmann::json to_json(const GameResults& results);
GameResults game_results_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<LeaderboardRow>& rows);

}  // namespace meetplay
