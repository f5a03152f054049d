#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "meetplay/games.hpp"

namespace meetplay {

/// The seven numeric sub-dimensions a game is positioned on.
enum class Dimension : std::size_t {
  Exertion,
  Stretch,
  BodyParts,
  Attention,
  BodilyInterplay,
  Duration,
  SpaceType,
};

inline constexpr std::size_t kDimensionCount = 7;
inline constexpr std::array<Dimension, kDimensionCount> kAllDimensions = {
    Dimension::Exertion,        Dimension::Stretch,  Dimension::BodyParts, Dimension::Attention,
    Dimension::BodilyInterplay, Dimension::Duration, Dimension::SpaceType,
};

std::string_view dimension_name(Dimension d);
std::optional<Dimension> dimension_from_name(std::string_view name);

/// When a game is played relative to the meeting.
enum class MeetingMoment { MidMeeting, Break };
enum class StartTime { MidMeeting, Break, Either };
enum class Layout { Symmetric, Asymmetric, Either };

std::string_view moment_name(MeetingMoment m);
std::optional<MeetingMoment> moment_from_name(std::string_view name);
std::string_view start_time_name(StartTime s);
std::string_view layout_name(Layout l);
std::optional<Layout> layout_from_name(std::string_view name);

struct GameProfile {
  GameKind game = GameKind::Frost;
  std::array<double, kDimensionCount> scores{};
  StartTime start_time = StartTime::Either;
  Layout layout = Layout::Either;

  double score(Dimension d) const { return scores[static_cast<std::size_t>(d)]; }
};

/// Frost, Food Rain, Virus Hitter, positioned at the reference rating means.
std::vector<GameProfile> default_catalog();

bool start_time_conflicts(StartTime preferred, MeetingMoment moment);
bool layout_conflicts(Layout preferred, Layout actual);

struct MeetingContext {
  MeetingMoment phase = MeetingMoment::Break;
  /// Symmetric or Asymmetric; Either is rejected.
  Layout layout = Layout::Symmetric;
  /// 1 is fully private.
  double privacy = 0.5;
  double attention_budget = 0.5;
  std::optional<double> desired_exertion;
  double minutes_available = 5.0;
};

struct Recommendation {
  GameKind game = GameKind::Frost;
  double score = 0.0;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

struct RecommendOptions {
  /// Multiplies every dimension distance. Ranking does not depend on it.
  double distance_scale = 1.0;
};

/// Drops games whose start time or layout conflicts with the context, then
/// ranks the rest by 1 - mean |profile - target| over attention, exertion
/// (when requested) and space type (target 1 - privacy). Ties keep catalog
/// order. Throws Error("empty-catalog") or Error("invalid-context").
std::vector<Recommendation> recommend(const MeetingContext& context,
                                      std::span<const GameProfile> catalog,
                                      RecommendOptions options = {});

nlohmann::json catalog_to_json(std::span<const GameProfile> catalog);
nlohmann::json to_json(const std::vector<Recommendation>& ranked);

}  // namespace meetplay
