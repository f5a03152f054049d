#include "meetplay/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "meetplay/error.hpp"

namespace meetplay {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kSegmentNames = {"still", "sway", "twist", "nod", "mouth",
                                                           "chase_items"};
constexpr double kOpenRatio = 0.5;
constexpr double kMouthWidth = 0.08;
constexpr double kNeutralSpan = 0.30;

double wave(double t_s, double period_s) { return std::sin(2.0 * std::numbers::pi * t_s / period_s); }

void set_point(KeypointSet& pose, KeypointId id, double x, double y) {
  pose.set(id, {x, y, pose[id].confidence});
}

}  // namespace

std::string_view segment_name(SegmentKind kind) { return kSegmentNames[static_cast<std::size_t>(kind)]; }

std::optional<SegmentKind> segment_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kSegmentNames.size(); ++i) {
    if (kSegmentNames[i] == name) return static_cast<SegmentKind>(i);
  }
  return std::nullopt;
}

void validate(const TraceSegment& s) {
  auto fail = [&](const std::string& why) {
    throw Error("invalid-segment", std::string(segment_name(s.kind)) + " segment: " + why);
  };
  if (!(s.start_s >= 0) || !std::isfinite(s.start_s)) fail("start_s must be >= 0");
  if (!(s.len_s > 0) || !std::isfinite(s.len_s)) fail("len_s must be > 0");
  switch (s.kind) {
    case SegmentKind::Sway:
    case SegmentKind::Nod:
      if (!(s.amplitude > 0 && s.amplitude <= 0.5)) fail("amplitude must be in (0, 0.5]");
      [[fallthrough]];
    case SegmentKind::Twist:
      if (!(s.period_s > 0) || !std::isfinite(s.period_s)) fail("period_s must be > 0");
      break;
    case SegmentKind::Mouth:
      if (!(s.open_s > 0) || !(s.closed_s > 0)) fail("open_s and closed_s must be > 0");
      break;
    case SegmentKind::ChaseItems:
      if (!(s.speed > 0) || !std::isfinite(s.speed)) fail("speed must be > 0");
      break;
    case SegmentKind::Still:
      break;
  }
}

void validate(const Scenario& sc) {
  auto fail = [](const std::string& why) { throw Error("scenario-invalid", why); };
  if (!(sc.duration_s > 0) || !std::isfinite(sc.duration_s)) fail("duration_s must be > 0");
  if (sc.participants.empty()) fail("scenario needs at least one participant");
  for (std::size_t i = 0; i < sc.participants.size(); ++i) {
    const auto& p = sc.participants[i];
    if (p.name.empty()) fail("participant name is empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (sc.participants[j].name == p.name) fail("duplicate participant name " + p.name);
    }
    double end = 0.0;
    for (const auto& seg : p.trace) {
      try {
        validate(seg);
      } catch (const Error& e) {
        fail(p.name + ": " + e.what());
      }
      if (seg.start_s < end) fail(p.name + ": segments overlap or are out of order");
      end = seg.start_s + seg.len_s;
    }
  }
}

Scenario scenario_from_json(const json& j) {
  try {
    Scenario sc;
    sc.seed = j.at("seed").get<std::uint64_t>();
    const auto game = game_from_name(j.at("game").get<std::string>());
    if (!game) throw Error("scenario-invalid", "unknown game " + j.at("game").dump());
    sc.game = *game;
    sc.duration_s = j.at("duration_s").get<double>();
    for (const auto& pj : j.at("participants")) {
      ScenarioParticipant p;
      p.name = pj.at("name").get<std::string>();
      for (const auto& sj : pj.value("trace", json::array())) {
        TraceSegment seg;
        const auto kind = segment_from_name(sj.at("kind").get<std::string>());
        if (!kind) throw Error("scenario-invalid", "unknown segment kind " + sj.at("kind").dump());
        seg.kind = *kind;
        seg.start_s = sj.at("start_s").get<double>();
        seg.len_s = sj.at("len_s").get<double>();
        seg.amplitude = sj.value("amplitude", seg.amplitude);
        seg.period_s = sj.value("period_s", seg.period_s);
        seg.open_s = sj.value("open_s", seg.open_s);
        seg.closed_s = sj.value("closed_s", seg.closed_s);
        seg.speed = sj.value("speed", seg.speed);
        p.trace.push_back(seg);
      }
      sc.participants.push_back(std::move(p));
    }
    validate(sc);
    return sc;
  } catch (const json::exception& e) {
    throw Error("scenario-invalid", e.what());
  }
}

json to_json(const Scenario& sc) {
  json participants = json::array();
  for (const auto& p : sc.participants) {
    json trace = json::array();
    for (const auto& s : p.trace) {
      trace.push_back({{"kind", segment_name(s.kind)},
                       {"start_s", s.start_s},
                       {"len_s", s.len_s},
                       {"amplitude", s.amplitude},
                       {"period_s", s.period_s},
                       {"open_s", s.open_s},
                       {"closed_s", s.closed_s},
                       {"speed", s.speed}});
    }
    participants.push_back({{"name", p.name}, {"trace", std::move(trace)}});
  }
  return {{"seed", sc.seed},
          {"game", game_name(sc.game)},
          {"duration_s", sc.duration_s},
          {"participants", std::move(participants)}};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot read " + path.string());
  const auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error("scenario-invalid", path.string() + " is not valid JSON");
  return scenario_from_json(j);
}

KeypointSet neutral_pose() {
  KeypointSet kp;
  kp.set(KeypointId::Nose, {0.50, 0.40, 1.0});
  kp.set(KeypointId::LeftEye, {0.45, 0.36, 1.0});
  kp.set(KeypointId::RightEye, {0.55, 0.36, 1.0});
  kp.set(KeypointId::LeftShoulder, {0.35, 0.55, 1.0});
  kp.set(KeypointId::RightShoulder, {0.65, 0.55, 1.0});
  kp.set(KeypointId::MouthLeft, {0.46, 0.48, 1.0});
  kp.set(KeypointId::MouthRight, {0.54, 0.48, 1.0});
  kp.set(KeypointId::MouthTop, {0.50, 0.475, 1.0});
  kp.set(KeypointId::MouthBottom, {0.50, 0.485, 1.0});
  return kp;
}

KeypointSet shift_face(KeypointSet pose, double dx, double dy) {
  for (auto id : kAllKeypoints) {
    if (id == KeypointId::LeftShoulder || id == KeypointId::RightShoulder) continue;
    set_point(pose, id, pose[id].x + dx, pose[id].y + dy);
  }
  return pose;
}

KeypointSet with_mouth_ratio(KeypointSet pose, double ratio) {
  const double cx = (pose[KeypointId::MouthLeft].x + pose[KeypointId::MouthRight].x) / 2.0;
  const double cy = (pose[KeypointId::MouthLeft].y + pose[KeypointId::MouthRight].y) / 2.0;
  const double half = ratio * kMouthWidth / 2.0;
  set_point(pose, KeypointId::MouthTop, cx, cy - half);
  set_point(pose, KeypointId::MouthBottom, cx, cy + half);
  return pose;
}

KeypointSet synth_pose(const TraceSegment& s, double t) {
  auto pose = neutral_pose();
  switch (s.kind) {
    case SegmentKind::Still:
    case SegmentKind::ChaseItems:
      return pose;
    case SegmentKind::Sway:
      return shift_face(pose, s.amplitude * wave(t, s.period_s), 0.0);
    case SegmentKind::Nod:
      return shift_face(pose, 0.0, s.amplitude * wave(t, s.period_s));
    case SegmentKind::Twist: {
      const double span = kNeutralSpan * (0.7 + 0.3 * std::cos(2.0 * std::numbers::pi * t / s.period_s));
      set_point(pose, KeypointId::LeftShoulder, 0.5 - span / 2.0, 0.55);
      set_point(pose, KeypointId::RightShoulder, 0.5 + span / 2.0, 0.55);
      return pose;
    }
    case SegmentKind::Mouth: {
      const bool open = std::fmod(t, s.open_s + s.closed_s) < s.open_s;
      return open ? with_mouth_ratio(pose, kOpenRatio) : pose;
    }
  }
  return pose;
}

std::vector<PoseFrame> synth_frames(const TraceSegment& segment, const ParticipantId& participant,
                                    std::uint32_t tick_ms) {
  validate(segment);
  if (tick_ms == 0) throw Error("invalid-segment", "tick must be positive");
  const auto start_ms = static_cast<std::uint64_t>(std::llround(segment.start_s * 1000.0));
  const auto count = static_cast<std::uint64_t>(std::llround(segment.len_s * 1000.0)) / tick_ms;
  std::vector<PoseFrame> frames;
  frames.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto offset = i * tick_ms;
    frames.push_back({participant, start_ms + offset, synth_pose(segment, offset / 1000.0)});
  }
  return frames;
}

KeypointSet chase_pose(const FoodRainPlayer& player, const FoodRainConfig& config,
                       const TraceSegment& segment, ChaseState& state) {
  const auto neutral = neutral_pose();
  const double mouth_y = neutral[KeypointId::MouthLeft].y;
  const double step = config.fall_speed * kTickSeconds;

  const FoodItem* target = nullptr;
  for (const auto& item : player.items) {
    if (item.type != FoodType::Fruit || item.y + step > mouth_y + config.catch_half_height) continue;
    if (!target || item.y > target->y) target = &item;
  }
  if (target) {
    const double reach = segment.speed * kTickSeconds;
    state.x += std::clamp(target->x - state.x, -reach, reach);
  }

  auto in_box = [&](const FoodItem& item) {
    return std::abs(item.x - state.x) <= config.catch_half_width &&
           std::abs(item.y + step - mouth_y) <= config.catch_half_height;
  };
  bool fruit = false;
  bool dessert = false;
  for (const auto& item : player.items) {
    if (!in_box(item)) continue;
    (item.type == FoodType::Fruit ? fruit : dessert) = true;
  }
  auto pose = shift_face(neutral, state.x - 0.5, 0.0);
  return fruit && !dessert ? with_mouth_ratio(pose, kOpenRatio) : pose;
}

json to_json(const MetricsReport& r) {
  json participants = json::array();
  for (const auto& p : r.participants) {
    json reps = json::object();
    for (std::size_t k = 0; k < p.reps.size(); ++k) {
      reps[std::string(gesture_name(static_cast<GestureKind>(k)))] = p.reps[k];
    }
    participants.push_back({{"name", p.name}, {"reps", std::move(reps)}, {"movement_s", p.movement_s}});
  }
  return {{"seed", r.seed},
          {"game", game_name(r.game)},
          {"duration_s", r.duration_s},
          {"ticks", r.ticks},
          {"participants", std::move(participants)},
          {"results", to_json(r.results)},
          {"frost_coverage", r.frost_coverage},
          {"virus_hp", r.virus_hp},
          {"leaderboard", to_json(r.leaderboard)}};
}

SimRun run_scenario(const Scenario& sc) {
  validate(sc);
  std::vector<RosterEntry> roster;
  for (const auto& p : sc.participants) roster.push_back({p.name, p.name});

  SimRun run;
  GameConfig config;
  run.final_state = game_init(sc.game, roster, config, sc.seed);
  GameState& game = run.final_state;
  GestureTracker tracker;
  for (const auto& e : roster) tracker.register_participant(e.id);

  std::vector<ChaseState> chase(sc.participants.size());
  std::vector<std::uint64_t> moving_ticks(sc.participants.size(), 0);
  const auto total_ticks = static_cast<std::uint64_t>(std::llround(sc.duration_s * 1000.0)) / kTickMs;

  for (std::uint64_t k = 0; k < total_ticks && !game.terminal; ++k) {
    const std::uint64_t t_ms = k * kTickMs;
    const double t = t_ms / 1000.0;
    TickInput input;
    for (std::size_t i = 0; i < sc.participants.size(); ++i) {
      const auto& part = sc.participants[i];
      const auto seg = std::find_if(part.trace.begin(), part.trace.end(), [&](const TraceSegment& s) {
        return t >= s.start_s && t < s.start_s + s.len_s;
      });
      KeypointSet pose;
      if (seg == part.trace.end()) {
        pose = neutral_pose();
      } else if (seg->kind == SegmentKind::ChaseItems && game.kind == GameKind::FoodRain) {
        const auto& rain = std::get<FoodRainState>(game.detail);
        pose = chase_pose(rain.players[i], game.config.food_rain, *seg, chase[i]);
      } else {
        pose = synth_pose(*seg, t - seg->start_s);
      }
      PoseFrame frame{part.name, t_ms, pose};
      auto events = tracker.ingest_frame(frame);
      input.events.insert(input.events.end(), events.begin(), events.end());
      input.frames[part.name] = frame;
      if (tracker.motion_energy(part.name) > 0.1) ++moving_ticks[i];
    }
    run.events.insert(run.events.end(), input.events.begin(), input.events.end());
    game_tick(game, input);
    run.inputs.push_back(std::move(input));

    run.snapshots.push_back(json{{"tick", game.tick}, {"state", snapshot_json(game)}}.dump());
    if (game.kind == GameKind::Frost) {
      std::vector<double> row;
      for (const auto& e : roster) row.push_back(frost_coverage(game, e.id));
      run.report.frost_coverage.push_back(std::move(row));
    } else if (game.kind == GameKind::VirusHitter) {
      run.report.virus_hp.push_back(static_cast<std::uint32_t>(std::get<VirusHitterState>(game.detail).hp));
    }
  }

  auto& report = run.report;
  report.seed = sc.seed;
  report.game = sc.game;
  report.duration_s = sc.duration_s;
  report.ticks = game.tick;
  std::map<ParticipantId, RepCounts> reps;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const auto& counts = tracker.rep_counts(roster[i].id);
    reps[roster[i].id] = counts;
    report.participants.push_back(
        {roster[i].id, counts, static_cast<double>(moving_ticks[i] * kTickMs) / 1000.0});
  }
  report.results = results(game, reps);
  std::vector<std::pair<std::string, std::int64_t>> scores;
  for (const auto& p : report.results.participants) scores.emplace_back(p.nickname, p.score);
  report.leaderboard = rank_scores(scores);
  return run;
}

void write_report(const MetricsReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io-error", "cannot write " + path.string());
  out << to_json(report).dump(2) << '\n';
  out.flush();
  if (!out) throw Error("io-error", "failed writing " + path.string());
}

void write_snapshots(const std::vector<std::string>& snapshots, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io-error", "cannot write " + path.string());
  for (const auto& line : snapshots) out << line << '\n';
  out.flush();
  if (!out) throw Error("io-error", "failed writing " + path.string());
}

}  // namespace meetplay
