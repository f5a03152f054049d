#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "meetplay/games.hpp"
#include "meetplay/gesture.hpp"

namespace meetplay {

enum class SegmentKind { Still, Sway, Twist, Nod, Mouth, ChaseItems };

std::string_view segment_name(SegmentKind kind);
std::optional<SegmentKind> segment_from_name(std::string_view name);

struct TraceSegment {
  SegmentKind kind = SegmentKind::Still;
  double start_s = 0.0;
  double len_s = 1.0;
  double amplitude = 0.1;
  double period_s = 2.0;
  double open_s = 0.5;
  double closed_s = 0.5;
  /// chase_items: largest horizontal head speed, in frame widths per second.
  double speed = 0.6;

  friend bool operator==(const TraceSegment&, const TraceSegment&) = default;
};

struct ScenarioParticipant {
  std::string name;
  std::vector<TraceSegment> trace;

  friend bool operator==(const ScenarioParticipant&, const ScenarioParticipant&) = default;
};

struct Scenario {
  std::uint64_t seed = 0;
  GameKind game = GameKind::Frost;
  double duration_s = 60.0;
  std::vector<ScenarioParticipant> participants;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws Error("invalid-segment").
void validate(const TraceSegment& segment);
/// Throws Error("scenario-invalid").
void validate(const Scenario& scenario);

/// Throws Error("scenario-invalid").
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& scenario);
/// Throws Error("io-error") or Error("scenario-invalid").
Scenario load_scenario(const std::filesystem::path& path);

/// Seated, facing the camera, mouth closed.
KeypointSet neutral_pose();
/// Moves every face point with the nose.
KeypointSet shift_face(KeypointSet pose, double dx, double dy);
/// Mouth opened to the given aspect ratio around its current center.
KeypointSet with_mouth_ratio(KeypointSet pose, double ratio);

/// Closed-form pose t_s seconds into the segment. chase_items yields the
/// neutral pose; its motion comes from the closed-loop policy during a run.
KeypointSet synth_pose(const TraceSegment& segment, double t_s);

/// One frame per tick from the segment start. Throws Error("invalid-segment").
std::vector<PoseFrame> synth_frames(const TraceSegment& segment, const ParticipantId& participant,
                                    std::uint32_t tick_ms = kTickMs);

struct ChaseState {
  double x = 0.5;
};

/// Steers toward the lowest fruit that can still be caught and opens the mouth
/// only when the next tick would catch a fruit and no dessert.
KeypointSet chase_pose(const FoodRainPlayer& player, const FoodRainConfig& config,
                       const TraceSegment& segment, ChaseState& state);

struct ParticipantMetrics {
  std::string name;
  RepCounts reps{};
  double movement_s = 0.0;
};

struct MetricsReport {
  std::uint64_t seed = 0;
  GameKind game = GameKind::Frost;
  double duration_s = 0.0;
  std::uint64_t ticks = 0;
  std::vector<ParticipantMetrics> participants;
  GameResults results;
  /// Frost only: per tick, each participant's coverage in roster order.
  std::vector<std::vector<double>> frost_coverage;
  /// Virus Hitter only: HP after each tick.
  std::vector<std::uint32_t> virus_hp;
  std::vector<LeaderboardRow> leaderboard;
};

nlohmann::json to_json(const MetricsReport& report);

struct SimRun {
  MetricsReport report;
  /// One compact JSON line per tick: {"tick":N,"state":{...}}.
  std::vector<std::string> snapshots;
  /// Exactly what game_tick received on each tick.
  std::vector<TickInput> inputs;
  std::vector<GestureEvent> events;
  GameState final_state;
};

/// Throws Error("scenario-invalid") or the game_init error.
SimRun run_scenario(const Scenario& scenario);

/// Pretty JSON with sorted keys. Throws Error("io-error").
void write_report(const MetricsReport& report, const std::filesystem::path& path);
/// One line per snapshot. Throws Error("io-error").
void write_snapshots(const std::vector<std::string>& snapshots, const std::filesystem::path& path);

}  // namespace meetplay
