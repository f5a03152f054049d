#include <cmath>

#include "meetplay/error.hpp"
#include "meetplay/games.hpp"

namespace meetplay {

using nlohmann::json;

json to_json(const GameConfig& c) {
  const auto& f = c.frost;
  const auto& r = c.food_rain;
  const auto& v = c.virus_hitter;
  return json{
      {"tick_ms", c.tick_ms},
      {"frost",
       {{"grid_cols", f.grid_cols},
        {"grid_rows", f.grid_rows},
        {"edge_growth_per_s", f.edge_growth_per_s},
        {"interior_growth_per_s", f.interior_growth_per_s},
        {"interior_gate", f.interior_gate},
        {"clear_radius", f.clear_radius},
        {"clear_displacement", f.clear_displacement},
        {"covered_threshold", f.covered_threshold}}},
      {"food_rain",
       {{"duration_s", r.duration_s},
        {"spawn_interval_s", r.spawn_interval_s},
        {"fruit_probability", r.fruit_probability},
        {"fall_speed", r.fall_speed},
        {"catch_half_width", r.catch_half_width},
        {"catch_half_height", r.catch_half_height},
        {"spawn_x_min", r.spawn_x_min},
        {"spawn_x_max", r.spawn_x_max}}},
      {"virus_hitter",
       {{"duration_s", v.duration_s},
        {"bomb_cap", v.bomb_cap},
        {"aim_dwell_ms", v.aim_dwell_ms},
        {"hp_per_assistant", v.hp_per_assistant},
        {"torch_smoothing", v.torch_smoothing}}},
  };
}

GameConfig game_config_from_json(const json& j) {
  GameConfig c;
  if (!j.is_object()) throw Error("invalid-config", "game config must be an object");
  c.tick_ms = j.value("tick_ms", c.tick_ms);
  if (auto it = j.find("frost"); it != j.end()) {
    auto& f = c.frost;
    f.grid_cols = it->value("grid_cols", f.grid_cols);
    f.grid_rows = it->value("grid_rows", f.grid_rows);
    f.edge_growth_per_s = it->value("edge_growth_per_s", f.edge_growth_per_s);
    f.interior_growth_per_s = it->value("interior_growth_per_s", f.interior_growth_per_s);
    f.interior_gate = it->value("interior_gate", f.interior_gate);
    f.clear_radius = it->value("clear_radius", f.clear_radius);
    f.clear_displacement = it->value("clear_displacement", f.clear_displacement);
    f.covered_threshold = it->value("covered_threshold", f.covered_threshold);
  }
  if (auto it = j.find("food_rain"); it != j.end()) {
    auto& r = c.food_rain;
    r.duration_s = it->value("duration_s", r.duration_s);
    r.spawn_interval_s = it->value("spawn_interval_s", r.spawn_interval_s);
    r.fruit_probability = it->value("fruit_probability", r.fruit_probability);
    r.fall_speed = it->value("fall_speed", r.fall_speed);
    r.catch_half_width = it->value("catch_half_width", r.catch_half_width);
    r.catch_half_height = it->value("catch_half_height", r.catch_half_height);
    r.spawn_x_min = it->value("spawn_x_min", r.spawn_x_min);
    r.spawn_x_max = it->value("spawn_x_max", r.spawn_x_max);
  }
  if (auto it = j.find("virus_hitter"); it != j.end()) {
    auto& v = c.virus_hitter;
    v.duration_s = it->value("duration_s", v.duration_s);
    v.bomb_cap = it->value("bomb_cap", v.bomb_cap);
    v.aim_dwell_ms = it->value("aim_dwell_ms", v.aim_dwell_ms);
    v.hp_per_assistant = it->value("hp_per_assistant", v.hp_per_assistant);
    v.torch_smoothing = it->value("torch_smoothing", v.torch_smoothing);
  }
  validate(c);
  return c;
}

namespace {

json frost_json(const FrostState& frost, const FrostConfig& config) {
  json players = json::array();
  for (const auto& p : frost.players) {
    // Intensities go out as 0..255 alpha levels.
    std::vector<int> grid;
    grid.reserve(p.cells.size());
    for (double v : p.cells) grid.push_back(static_cast<int>(std::lround(v * 255.0)));
    players.push_back({{"pid", p.id},
                       {"coverage", frost_coverage(p, config)},
                       {"clears", p.clears},
                       {"grid", std::move(grid)}});
  }
  return {{"cols", config.grid_cols}, {"rows", config.grid_rows}, {"players", std::move(players)}};
}

json food_rain_json(const FoodRainState& rain, const GameState& state) {
  json players = json::array();
  for (const auto& p : rain.players) {
    json items = json::array();
    for (const auto& item : p.items) {
      items.push_back(
          {{"id", item.id}, {"type", food_name(item.type)}, {"x", item.x}, {"y", item.y}});
    }
    json mouth = nullptr;
    if (p.mouth_center) mouth = json::array({p.mouth_center->x, p.mouth_center->y});
    players.push_back({{"pid", p.id},
                       {"score", p.score},
                       {"mouth_open", p.mouth_open},
                       {"mouth", std::move(mouth)},
                       {"items", std::move(items)}});
  }
  const auto duration = static_cast<std::uint64_t>(std::llround(state.config.food_rain.duration_s * 1000.0));
  const auto elapsed = state.elapsed_ms();
  return {{"elapsed_ms", elapsed},
          {"remaining_ms", elapsed >= duration ? 0 : duration - elapsed},
          {"players", std::move(players)},
          {"leaderboard", to_json(leaderboard(rain, state.roster))}};
}

json virus_hitter_json(const VirusHitterState& virus) {
  json towers = json::array();
  const auto slots = static_cast<double>(virus.towers.size());
  for (std::size_t i = 0; i < virus.towers.size(); ++i) {
    const auto& t = virus.towers[i];
    towers.push_back({{"pid", t.assistant},
                      {"color", t.color},
                      {"bombs", t.bombs},
                      {"dwell_ms", t.dwell_ms},
                      {"slot", json::array({static_cast<double>(i) / slots,
                                            static_cast<double>(i + 1) / slots})}});
  }
  return {{"hitter", virus.hitter},  {"torch_x", virus.torch_x}, {"hp", virus.hp},
          {"max_hp", virus.max_hp},  {"launches", virus.launches},
          {"outcome", outcome_name(virus.outcome)}, {"towers", std::move(towers)}};
}

}  // namespace

json snapshot_json(const GameState& state) {
  if (const auto* frost = std::get_if<FrostState>(&state.detail)) {
    return frost_json(*frost, state.config.frost);
  }
  if (const auto* rain = std::get_if<FoodRainState>(&state.detail)) {
    return food_rain_json(*rain, state);
  }
  return virus_hitter_json(std::get<VirusHitterState>(state.detail));
}

json to_json(const std::vector<LeaderboardRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back({{"rank", r.rank}, {"nickname", r.nickname}, {"score", r.score}});
  return out;
}

json to_json(const GameResults& r) {
  json participants = json::array();
  for (const auto& p : r.participants) {
    participants.push_back({{"pid", p.id},
                            {"nickname", p.nickname},
                            {"score", p.score},
                            {"metrics", p.metrics},
                            {"reps", p.reps}});
  }
  return {{"game", game_name(r.kind)},
          {"outcome", r.outcome},
          {"duration_ms", r.duration_ms},
          {"participants", std::move(participants)}};
}

GameResults game_results_from_json(const json& j) {
  GameResults r;
  auto kind = game_from_name(j.at("game").get<std::string>());
  if (!kind) throw Error("invalid-results", "unknown game in results");
  r.kind = *kind;
  r.outcome = j.at("outcome").get<std::string>();
  r.duration_ms = j.at("duration_ms").get<std::uint64_t>();
  for (const auto& pj : j.at("participants")) {
    ParticipantResult p;
    p.id = pj.at("pid").get<std::string>();
    p.nickname = pj.at("nickname").get<std::string>();
    p.score = pj.at("score").get<std::int64_t>();
    p.metrics = pj.value("metrics", std::map<std::string, double>{});
    p.reps = pj.value("reps", std::map<std::string, std::uint32_t>{});
    r.participants.push_back(std::move(p));
  }
  return r;
}

}  // namespace meetplay
