#include <algorithm>
#include <cmath>

#include "engines.hpp"
#include "meetplay/error.hpp"

namespace meetplay {

RoleAssignment assign_roles(std::span<const RosterEntry> participants, Prng& prng) {
  if (participants.size() < 2) {
    throw Error("too-few-participants", "virus hitter needs at least 2 participants");
  }
  if (participants.size() > kPaletteSize + 1) {
    throw Error("too-many-participants", "virus hitter supports at most 9 participants");
  }
  const auto hitter = prng.below(participants.size());
  RoleAssignment roles;
  roles.hitter = participants[hitter].id;
  int color = 0;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    if (i == hitter) continue;
    roles.assistants.emplace_back(participants[i].id, color++);
  }
  return roles;
}

namespace detail {

VirusHitterState virus_hitter_init(const std::vector<RosterEntry>& roster,
                                   const VirusHitterConfig& config, std::uint64_t seed) {
  Prng prng(seed);
  const auto roles = assign_roles(roster, prng);
  VirusHitterState virus;
  virus.hitter = roles.hitter;
  for (const auto& [id, color] : roles.assistants) {
    Watchtower tower;
    tower.assistant = id;
    tower.color = color;
    virus.towers.push_back(std::move(tower));
  }
  virus.torch_x = 0.5;
  virus.max_hp = config.hp_per_assistant * static_cast<int>(virus.towers.size());
  virus.hp = virus.max_hp;
  return virus;
}

bool virus_hitter_tick(VirusHitterState& virus, const VirusHitterConfig& config,
                       std::uint64_t now_ms, const TickInput& input, std::vector<GameOutput>& out) {
  for (const auto& e : input.events) {
    if (e.kind != GestureKind::TwistRep) continue;
    for (std::size_t i = 0; i < virus.towers.size(); ++i) {
      auto& tower = virus.towers[i];
      if (tower.assistant != e.participant_id || tower.bombs >= config.bomb_cap) continue;
      ++tower.bombs;
      ++tower.bombs_loaded;
      out.push_back({OutputKind::BombLoaded, tower.assistant, static_cast<std::int64_t>(i), 0});
    }
  }

  if (auto it = input.frames.find(virus.hitter); it != input.frames.end()) {
    const auto& nose = it->second.keypoints[KeypointId::Nose];
    if (nose.visible()) virus.torch_x += config.torch_smoothing * (nose.x - virus.torch_x);
  }

  const auto slots = virus.towers.size();
  const auto aimed = std::min(
      slots - 1, static_cast<std::size_t>(std::floor(virus.torch_x * static_cast<double>(slots))));
  for (std::size_t i = 0; i < slots; ++i) {
    auto& tower = virus.towers[i];
    if (i != aimed || tower.bombs == 0 || virus.hp == 0) {
      tower.dwell_ms = 0;
      continue;
    }
    tower.dwell_ms += kTickMs;
    if (tower.dwell_ms >= config.aim_dwell_ms) {
      --tower.bombs;
      ++tower.launches;
      ++virus.launches;
      --virus.hp;
      tower.dwell_ms = 0;
      out.push_back({OutputKind::BombLaunched, virus.hitter, static_cast<std::int64_t>(i), 0});
    }
  }

  if (virus.hp == 0) {
    virus.outcome = VirusOutcome::Won;
    out.push_back({OutputKind::GameWon, {}, 0, 0});
    return true;
  }
  if (now_ms >= to_ms(config.duration_s)) {
    virus.outcome = VirusOutcome::Lost;
    out.push_back({OutputKind::GameLost, {}, 0, 0});
    return true;
  }
  return false;
}

}  // namespace detail
}  // namespace meetplay
