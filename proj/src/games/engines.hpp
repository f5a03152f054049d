#pragma once

#include <vector>

#include "meetplay/games.hpp"

namespace meetplay::detail {

FrostState frost_init(const std::vector<RosterEntry>& roster, const FrostConfig& config);
void frost_tick(FrostState& frost, const FrostConfig& config, const TickInput& input,
                std::vector<GameOutput>& out);

FoodRainState food_rain_init(const std::vector<RosterEntry>& roster, const FoodRainConfig& config,
                             std::uint64_t seed);
/// Returns true once the episode is over.
bool food_rain_tick(FoodRainState& rain, const FoodRainConfig& config, std::uint64_t now_ms,
                    const TickInput& input, std::vector<GameOutput>& out);

VirusHitterState virus_hitter_init(const std::vector<RosterEntry>& roster,
                                   const VirusHitterConfig& config, std::uint64_t seed);
bool virus_hitter_tick(VirusHitterState& virus, const VirusHitterConfig& config,
                       std::uint64_t now_ms, const TickInput& input, std::vector<GameOutput>& out);

std::uint64_t to_ms(double seconds);

}  // namespace meetplay::detail
