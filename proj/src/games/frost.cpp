#include <algorithm>
#include <cmath>

#include "engines.hpp"
#include "meetplay/error.hpp"

namespace meetplay {

namespace detail {

FrostState frost_init(const std::vector<RosterEntry>& roster, const FrostConfig& config) {
  FrostState frost;
  const auto cells = static_cast<std::size_t>(config.grid_cols * config.grid_rows);
  for (const auto& entry : roster) {
    frost.players.push_back({entry.id, std::vector<double>(cells, 0.0), 0, std::nullopt});
  }
  return frost;
}

namespace {

void grow(std::vector<double>& cells, const FrostConfig& c) {
  const std::vector<double> before = cells;
  const int cols = c.grid_cols;
  const int rows = c.grid_rows;
  const double edge_step = c.edge_growth_per_s * kTickSeconds;
  const double interior_step = c.interior_growth_per_s * kTickSeconds;
  for (int r = 0; r < rows; ++r) {
    for (int col = 0; col < cols; ++col) {
      const auto i = static_cast<std::size_t>(r * cols + col);
      if (r == 0 || col == 0 || r == rows - 1 || col == cols - 1) {
        cells[i] += edge_step;
      } else {
        const double strongest = std::max({before[i - 1], before[i + 1],
                                           before[i - static_cast<std::size_t>(cols)],
                                           before[i + static_cast<std::size_t>(cols)]});
        if (strongest >= c.interior_gate) cells[i] += interior_step * strongest;
      }
      cells[i] = std::clamp(cells[i], 0.0, 1.0);
    }
  }
}

// Returns the number of covered cells wiped.
std::uint32_t wipe(std::vector<double>& cells, const FrostConfig& c, double kx, double ky) {
  std::uint32_t wiped = 0;
  const double r2 = c.clear_radius * c.clear_radius;
  for (int r = 0; r < c.grid_rows; ++r) {
    const double cy = (r + 0.5) / c.grid_rows;
    for (int col = 0; col < c.grid_cols; ++col) {
      const double cx = (col + 0.5) / c.grid_cols;
      const double dx = cx - kx;
      const double dy = cy - ky;
      if (dx * dx + dy * dy > r2) continue;
      auto& cell = cells[static_cast<std::size_t>(r * c.grid_cols + col)];
      if (cell >= c.covered_threshold) ++wiped;
      cell = 0.0;
    }
  }
  return wiped;
}

}  // namespace

void frost_tick(FrostState& frost, const FrostConfig& config, const TickInput& input,
                std::vector<GameOutput>& out) {
  for (auto& player : frost.players) {
    grow(player.cells, config);

    auto it = input.frames.find(player.id);
    if (it == input.frames.end()) continue;
    const KeypointSet& now = it->second.keypoints;
    if (player.previous) {
      std::uint32_t wiped = 0;
      for (auto id : kAllKeypoints) {
        const auto& a = now[id];
        const auto& b = (*player.previous)[id];
        if (!a.visible() || !b.visible()) continue;
        if (std::hypot(a.x - b.x, a.y - b.y) < config.clear_displacement) continue;
        wiped += wipe(player.cells, config, a.x, a.y);
      }
      if (wiped > 0) {
        player.clears += wiped;
        out.push_back({OutputKind::FrostCleared, player.id, wiped, 0});
      }
    }
    player.previous = now;
  }
}

}  // namespace detail

double frost_coverage(const FrostPlayer& player, const FrostConfig& config) {
  if (player.cells.empty()) return 0.0;
  const auto covered = std::count_if(player.cells.begin(), player.cells.end(),
                                     [&](double v) { return v >= config.covered_threshold; });
  return static_cast<double>(covered) / static_cast<double>(player.cells.size());
}

double frost_coverage(const GameState& state, const ParticipantId& participant) {
  const auto* frost = std::get_if<FrostState>(&state.detail);
  if (frost != nullptr) {
    for (const auto& p : frost->players) {
      if (p.id == participant) return frost_coverage(p, state.config.frost);
    }
  }
  throw Error("unknown-participant", "no frost grid for " + participant);
}

}  // namespace meetplay
