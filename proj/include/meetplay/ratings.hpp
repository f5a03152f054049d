#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "meetplay/catalog.hpp"
#include "meetplay/error.hpp"

namespace meetplay {

/// One participant's placement of one game on one sub-dimension. For
/// space_type, 0 means private.
struct RatingRecord {
  std::string participant_id;
  std::string game_id;
  Dimension dimension = Dimension::Exertion;
  double value = 0.0;

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

/// sd is the sample (n - 1) standard deviation and is absent for n < 2.
/// Quartiles interpolate linearly at h = (n - 1) p.
struct DimensionStats {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;
  double q1 = 0.0;
  double q3 = 0.0;

  friend bool operator==(const DimensionStats&, const DimensionStats&) = default;
};

using StatsKey = std::pair<std::string, Dimension>;
using StatsTable = std::map<StatsKey, DimensionStats>;

/// Descriptive statistics of a non-empty sample.
DimensionStats describe(std::span<const double> sample);

/// Groups by (game, dimension). The result does not depend on record order.
/// Throws Error("out-of-range-value") or Error("unknown-dimension").
StatsTable aggregate_ratings(std::span<const RatingRecord> records);

struct BadRow {
  std::size_t line = 0;
  std::string reason;
};

class RatingsCsvError : public Error {
 public:
  explicit RatingsCsvError(std::vector<BadRow> rows);
  const std::vector<BadRow>& rows() const { return rows_; }

 private:
  std::vector<BadRow> rows_;
};

/// Expects the header `participant_id,game_id,dimension,value`. Throws
/// Error("missing-header") or RatingsCsvError (code "bad-row") listing every
/// rejected line.
std::vector<RatingRecord> parse_ratings_csv(std::string_view text);

struct IqrSegment {
  std::string game;
  Dimension dimension = Dimension::Exertion;
  double q1 = 0.0;
  double q3 = 0.0;
  double mean = 0.0;

  friend bool operator==(const IqrSegment&, const IqrSegment&) = default;
};

/// One interquartile segment per (game, dimension). Throws
/// Error("inverted-interval") when q1 > q3.
std::vector<IqrSegment> iqr_plot_data(const StatsTable& stats);

nlohmann::json to_json(const std::vector<IqrSegment>& segments);

/// Per-game rating summaries (n = 15) kept as a fixed reference.
StatsTable reference_rating_stats();

}  // namespace meetplay
