#include "meetplay/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "meetplay/error.hpp"

namespace meetplay {

namespace {

constexpr std::array<std::string_view, kDimensionCount> kDimensionNames = {
    "exertion", "stretch", "body_parts", "attention", "bodily_interplay", "duration", "space_type",
};

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view dimension_name(Dimension d) { return kDimensionNames[static_cast<std::size_t>(d)]; }

std::optional<Dimension> dimension_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kDimensionNames.size(); ++i) {
    if (kDimensionNames[i] == name) return static_cast<Dimension>(i);
  }
  return std::nullopt;
}

std::string_view moment_name(MeetingMoment m) {
  return m == MeetingMoment::Break ? "break" : "mid_meeting";
}

std::optional<MeetingMoment> moment_from_name(std::string_view name) {
  if (name == "break") return MeetingMoment::Break;
  if (name == "mid_meeting") return MeetingMoment::MidMeeting;
  return std::nullopt;
}

std::string_view start_time_name(StartTime s) {
  switch (s) {
    case StartTime::MidMeeting: return "mid_meeting";
    case StartTime::Break: return "break";
    case StartTime::Either: return "either";
  }
  return "either";
}

std::string_view layout_name(Layout l) {
  switch (l) {
    case Layout::Symmetric: return "symmetric";
    case Layout::Asymmetric: return "asymmetric";
    case Layout::Either: return "either";
  }
  return "either";
}

std::optional<Layout> layout_from_name(std::string_view name) {
  if (name == "symmetric") return Layout::Symmetric;
  if (name == "asymmetric") return Layout::Asymmetric;
  if (name == "either") return Layout::Either;
  return std::nullopt;
}

std::vector<GameProfile> default_catalog() {
  // exertion, stretch, body_parts, attention, bodily_interplay, duration, space_type
  return {
      {GameKind::Frost,
       {0.207, 0.349, 0.206, 0.228, 0.178, 0.503, 0.458},
       StartTime::MidMeeting,
       Layout::Symmetric},
      {GameKind::FoodRain,
       {0.462, 0.474, 0.278, 0.781, 0.414, 0.478, 0.322},
       StartTime::Break,
       Layout::Symmetric},
      {GameKind::VirusHitter,
       {0.551, 0.609, 0.570, 0.523, 0.858, 0.491, 0.570},
       StartTime::Break,
       Layout::Asymmetric},
  };
}

bool start_time_conflicts(StartTime preferred, MeetingMoment moment) {
  switch (preferred) {
    case StartTime::Either: return false;
    case StartTime::MidMeeting: return moment != MeetingMoment::MidMeeting;
    case StartTime::Break: return moment != MeetingMoment::Break;
  }
  return false;
}

bool layout_conflicts(Layout preferred, Layout actual) {
  return preferred != Layout::Either && actual != Layout::Either && preferred != actual;
}

std::vector<Recommendation> recommend(const MeetingContext& ctx,
                                      std::span<const GameProfile> catalog,
                                      RecommendOptions options) {
  if (catalog.empty()) throw Error("empty-catalog", "no games to recommend from");
  if (ctx.layout == Layout::Either || !in_unit(ctx.privacy) || !in_unit(ctx.attention_budget) ||
      (ctx.desired_exertion && !in_unit(*ctx.desired_exertion)) || !(ctx.minutes_available > 0) ||
      !(options.distance_scale > 0)) {
    throw Error("invalid-context", "meeting context out of range");
  }

  std::vector<std::pair<Dimension, double>> targets{{Dimension::Attention, ctx.attention_budget}};
  if (ctx.desired_exertion) targets.emplace_back(Dimension::Exertion, *ctx.desired_exertion);
  targets.emplace_back(Dimension::SpaceType, 1.0 - ctx.privacy);

  struct Candidate {
    std::size_t position;
    double distance;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& p = catalog[i];
    if (start_time_conflicts(p.start_time, ctx.phase) || layout_conflicts(p.layout, ctx.layout)) {
      continue;
    }
    double total = 0.0;
    for (const auto& [dim, target] : targets) {
      total += std::abs(p.score(dim) - target);
    }
    candidates.push_back({i, total / static_cast<double>(targets.size())});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });

  std::vector<Recommendation> ranked;
  for (const auto& c : candidates) {
    ranked.push_back(
        {catalog[c.position].game, std::clamp(1.0 - options.distance_scale * c.distance, 0.0, 1.0)});
  }
  return ranked;
}

nlohmann::json catalog_to_json(std::span<const GameProfile> catalog) {
  auto out = nlohmann::json::array();
  for (const auto& p : catalog) {
    nlohmann::json scores = nlohmann::json::object();
    for (auto d : kAllDimensions) scores[std::string(dimension_name(d))] = p.score(d);
    out.push_back({{"game", game_name(p.game)},
                   {"scores", std::move(scores)},
                   {"start_time", start_time_name(p.start_time)},
                   {"layout", layout_name(p.layout)}});
  }
  return out;
}

nlohmann::json to_json(const std::vector<Recommendation>& ranked) {
  auto out = nlohmann::json::array();
  for (const auto& r : ranked) out.push_back({{"game", game_name(r.game)}, {"score", r.score}});
  return out;
}

}  // namespace meetplay
