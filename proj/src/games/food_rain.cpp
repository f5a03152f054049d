#include <algorithm>
#include <cmath>

#include "engines.hpp"

namespace meetplay::detail {

FoodRainState food_rain_init(const std::vector<RosterEntry>& roster, const FoodRainConfig& config,
                             std::uint64_t seed) {
  FoodRainState rain;
  rain.prng = Prng(seed);
  rain.next_spawn_ms = to_ms(config.spawn_interval_s);
  for (const auto& entry : roster) {
    FoodRainPlayer player;
    player.id = entry.id;
    rain.players.push_back(std::move(player));
  }
  return rain;
}

namespace {

FoodRainPlayer* find_player(FoodRainState& rain, const ParticipantId& id) {
  for (auto& p : rain.players) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::optional<MouthPoint> mouth_center(const KeypointSet& kp) {
  const auto& left = kp[KeypointId::MouthLeft];
  const auto& right = kp[KeypointId::MouthRight];
  if (!left.visible() || !right.visible()) return std::nullopt;
  return MouthPoint{(left.x + right.x) / 2.0, (left.y + right.y) / 2.0};
}

}  // namespace

bool food_rain_tick(FoodRainState& rain, const FoodRainConfig& config, std::uint64_t now_ms,
                    const TickInput& input, std::vector<GameOutput>& out) {
  // Mouth state follows the gesture layer; the last event in the tick wins.
  for (const auto& e : input.events) {
    if (e.kind != GestureKind::MouthOpen && e.kind != GestureKind::MouthClose) continue;
    if (auto* p = find_player(rain, e.participant_id)) p->mouth_open = e.kind == GestureKind::MouthOpen;
  }
  for (auto& p : rain.players) {
    auto it = input.frames.find(p.id);
    if (it == input.frames.end()) continue;
    if (auto center = mouth_center(it->second.keypoints)) p.mouth_center = center;
  }

  const double step = config.fall_speed * kTickSeconds;
  for (auto& p : rain.players) {
    for (auto& item : p.items) item.y += step;
    auto gone = std::stable_partition(p.items.begin(), p.items.end(),
                                      [](const FoodItem& item) { return item.y <= 1.0; });
    for (auto it = gone; it != p.items.end(); ++it) {
      ++p.missed;
      out.push_back({OutputKind::ItemMissed, p.id, static_cast<std::int64_t>(it->id), 0});
    }
    p.items.erase(gone, p.items.end());
  }

  if (now_ms >= rain.next_spawn_ms) {
    const double x =
        config.spawn_x_min + (config.spawn_x_max - config.spawn_x_min) * rain.prng.unit();
    const FoodType type =
        rain.prng.unit() < config.fruit_probability ? FoodType::Fruit : FoodType::Dessert;
    const std::uint64_t id = rain.next_item_id++;
    for (auto& p : rain.players) {
      p.items.push_back({id, type, x, 0.0});
      ++p.spawned;
      out.push_back({OutputKind::ItemSpawned, p.id, static_cast<std::int64_t>(id), 0});
    }
    rain.next_spawn_ms += to_ms(config.spawn_interval_s);
  }

  for (auto& p : rain.players) {
    if (!p.mouth_open || !p.mouth_center) continue;
    const MouthPoint m = *p.mouth_center;
    auto caught = std::stable_partition(p.items.begin(), p.items.end(), [&](const FoodItem& item) {
      return !(std::abs(item.x - m.x) <= config.catch_half_width &&
               std::abs(item.y - m.y) <= config.catch_half_height);
    });
    for (auto it = caught; it != p.items.end(); ++it) {
      const int delta = it->type == FoodType::Fruit ? 1 : -1;
      if (delta > 0) {
        ++p.fruits_caught;
      } else {
        ++p.desserts_caught;
      }
      p.score += delta;
      out.push_back({OutputKind::ItemCaught, p.id, static_cast<std::int64_t>(it->id), delta});
    }
    p.items.erase(caught, p.items.end());
  }

  if (now_ms >= to_ms(config.duration_s)) {
    out.push_back({OutputKind::GameFinished, {}, 0, 0});
    return true;
  }
  return false;
}

}  // namespace meetplay::detail
