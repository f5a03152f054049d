#include "meetplay/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "meetplay/quantile.hpp"

namespace meetplay {

DimensionStats describe(std::span<const double> sample) {
  if (sample.empty()) throw Error("empty-sample", "cannot describe an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());

  DimensionStats s;
  s.n = sorted.size();
  // Summing in sorted order keeps the result independent of input order.
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
  s.mean = std::clamp(s.mean, sorted.front(), sorted.back());
  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  s.q1 = quantile_sorted(sorted, 0.25);
  s.q3 = quantile_sorted(sorted, 0.75);
  return s;
}

StatsTable aggregate_ratings(std::span<const RatingRecord> records) {
  std::map<StatsKey, std::vector<double>> groups;
  for (const auto& r : records) {
    if (static_cast<std::size_t>(r.dimension) >= kDimensionCount) {
      throw Error("unknown-dimension", "rating has an unknown dimension");
    }
    if (!(r.value >= 0.0 && r.value <= 1.0)) {
      throw Error("out-of-range-value", "rating value outside [0,1]");
    }
    groups[{r.game_id, r.dimension}].push_back(r.value);
  }
  StatsTable table;
  for (const auto& [key, values] : groups) table.emplace(key, describe(values));
  return table;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string describe_rows(const std::vector<BadRow>& rows) {
  std::string msg = std::to_string(rows.size()) + " bad row(s); first at line " +
                    std::to_string(rows.front().line) + ": " + rows.front().reason;
  return msg;
}

}  // namespace

RatingsCsvError::RatingsCsvError(std::vector<BadRow> rows)
    : Error("bad-row", describe_rows(rows)), rows_(std::move(rows)) {}

std::vector<RatingRecord> parse_ratings_csv(std::string_view text) {
  std::vector<RatingRecord> records;
  std::vector<BadRow> bad;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (!header_seen) {
      const std::vector<std::string_view> expected{"participant_id", "game_id", "dimension", "value"};
      if (fields != expected) throw Error("missing-header", "first line must be the ratings header");
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) {
      bad.push_back({line_no, "expected 4 fields, got " + std::to_string(fields.size())});
      continue;
    }
    if (fields[0].empty() || fields[1].empty()) {
      bad.push_back({line_no, "empty participant or game id"});
      continue;
    }
    const auto dim = dimension_from_name(fields[2]);
    if (!dim) {
      bad.push_back({line_no, "unknown dimension '" + std::string(fields[2]) + "'"});
      continue;
    }
    double value = 0.0;
    const auto* first = fields[3].data();
    const auto* last = first + fields[3].size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      bad.push_back({line_no, "value is not a number"});
      continue;
    }
    if (value < 0.0 || value > 1.0) {
      bad.push_back({line_no, "value out of range [0,1]"});
      continue;
    }
    records.push_back({std::string(fields[0]), std::string(fields[1]), *dim, value});
  }
  if (!header_seen) throw Error("missing-header", "ratings file has no header");
  if (!bad.empty()) throw RatingsCsvError(std::move(bad));
  return records;
}

std::vector<IqrSegment> iqr_plot_data(const StatsTable& stats) {
  std::vector<IqrSegment> segments;
  for (const auto& [key, s] : stats) {
    if (s.q1 > s.q3) {
      throw Error("inverted-interval",
                  key.first + "/" + std::string(dimension_name(key.second)) + " has q1 > q3");
    }
    segments.push_back({key.first, key.second, s.q1, s.q3, s.mean});
  }
  return segments;
}

nlohmann::json to_json(const std::vector<IqrSegment>& segments) {
  auto out = nlohmann::json::array();
  for (const auto& s : segments) {
    out.push_back({{"game", s.game},
                   {"dimension", dimension_name(s.dimension)},
                   {"q1", s.q1},
                   {"q3", s.q3},
                   {"mean", s.mean}});
  }
  return out;
}

StatsTable reference_rating_stats() {
  struct Row {
    Dimension dim;
    const char* game;
    double mean, sd, q1, q3;
  };
  static constexpr Row kRows[] = {
      {Dimension::Exertion, "food_rain", 0.462, 0.251, 0.306, 0.528},
      {Dimension::Exertion, "virus_hitter", 0.551, 0.156, 0.466, 0.649},
      {Dimension::Exertion, "frost", 0.207, 0.109, 0.158, 0.263},
      {Dimension::Stretch, "food_rain", 0.474, 0.276, 0.278, 0.636},
      {Dimension::Stretch, "virus_hitter", 0.609, 0.210, 0.453, 0.750},
      {Dimension::Stretch, "frost", 0.349, 0.144, 0.250, 0.418},
      {Dimension::BodyParts, "food_rain", 0.278, 0.172, 0.157, 0.430},
      {Dimension::BodyParts, "virus_hitter", 0.570, 0.212, 0.419, 0.750},
      {Dimension::BodyParts, "frost", 0.206, 0.220, 0.090, 0.236},
      {Dimension::Attention, "food_rain", 0.781, 0.256, 0.703, 0.984},
      {Dimension::Attention, "virus_hitter", 0.523, 0.276, 0.422, 0.690},
      {Dimension::Attention, "frost", 0.228, 0.160, 0.141, 0.306},
      {Dimension::BodilyInterplay, "food_rain", 0.414, 0.270, 0.220, 0.594},
      {Dimension::BodilyInterplay, "virus_hitter", 0.858, 0.176, 0.799, 1.000},
      {Dimension::BodilyInterplay, "frost", 0.178, 0.273, 0.000, 0.248},
      {Dimension::Duration, "food_rain", 0.478, 0.271, 0.337, 0.601},
      {Dimension::Duration, "virus_hitter", 0.491, 0.167, 0.390, 0.573},
      {Dimension::Duration, "frost", 0.503, 0.270, 0.282, 0.669},
      {Dimension::SpaceType, "food_rain", 0.322, 0.310, 0.080, 0.395},
      {Dimension::SpaceType, "virus_hitter", 0.570, 0.311, 0.330, 0.784},
      {Dimension::SpaceType, "frost", 0.458, 0.340, 0.225, 0.722},
  };
  StatsTable table;
  for (const auto& r : kRows) {
    table.emplace(StatsKey{r.game, r.dim}, DimensionStats{15, r.mean, r.sd, r.q1, r.q3});
  }
  return table;
}

}  // namespace meetplay
