#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "meetplay/catalog.hpp"
#include "meetplay/ratings.hpp"

using namespace meetplay;

namespace {

std::string error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

const GameProfile& profile(const std::vector<GameProfile>& catalog, GameKind kind) {
  return *std::find_if(catalog.begin(), catalog.end(),
                       [&](const GameProfile& p) { return p.game == kind; });
}

// Independent quartile reference: explicit rank arithmetic on a sorted copy.
double reference_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double rank = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

TEST_CASE("default catalog pins the reference means") {
  const auto catalog = default_catalog();
  REQUIRE(catalog.size() == 3);
  const auto& frost = profile(catalog, GameKind::Frost);
  const auto& rain = profile(catalog, GameKind::FoodRain);
  const auto& virus = profile(catalog, GameKind::VirusHitter);
  CHECK(frost.score(Dimension::Exertion) == 0.207);
  CHECK(virus.score(Dimension::BodilyInterplay) == 0.858);
  CHECK(rain.score(Dimension::Attention) == 0.781);
  CHECK(frost.start_time == StartTime::MidMeeting);
  CHECK(rain.start_time == StartTime::Break);
  CHECK(virus.layout == Layout::Asymmetric);

  // Every numeric field equals the fixture mean.
  const auto fixture = reference_rating_stats();
  for (const auto& p : catalog) {
    for (auto d : kAllDimensions) {
      CHECK(p.score(d) >= 0.0);
      CHECK(p.score(d) <= 1.0);
      CHECK(p.score(d) == fixture.at({std::string(game_name(p.game)), d}).mean);
    }
  }
}

TEST_CASE("recommend filters by start time and layout") {
  const auto catalog = default_catalog();
  MeetingContext mid{MeetingMoment::MidMeeting, Layout::Symmetric, 0.2, 0.2, std::nullopt, 10};
  auto ranked = recommend(mid, catalog);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].game == GameKind::Frost);
  // 1 - mean(|0.228 - 0.2|, |0.458 - 0.8|)
  CHECK(ranked[0].score == doctest::Approx(1.0 - (0.028 + 0.342) / 2).epsilon(1e-12));

  MeetingContext brk{MeetingMoment::Break, Layout::Asymmetric, 0.5, 0.5, 0.6, 10};
  ranked = recommend(brk, catalog);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].game == GameKind::VirusHitter);

  MeetingContext sym_break{MeetingMoment::Break, Layout::Symmetric, 0.8, 0.3, std::nullopt, 10};
  ranked = recommend(sym_break, catalog);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].game == GameKind::FoodRain);

  CHECK(error_code([&] { recommend(mid, std::span<const GameProfile>{}); }) == "empty-catalog");
  MeetingContext bad = mid;
  bad.privacy = 1.5;
  CHECK(error_code([&] { recommend(bad, catalog); }) == "invalid-context");
}

TEST_CASE("recommend ranking is deterministic and scale invariant") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GameProfile> catalog;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      GameProfile p;
      p.game = static_cast<GameKind>(rng() % 3);
      for (auto& s : p.scores) s = std::round(unit(rng) * 20) / 20;  // invites ties
      p.start_time = StartTime::Either;
      p.layout = Layout::Either;
      catalog.push_back(p);
    }
    MeetingContext ctx{MeetingMoment::Break, Layout::Symmetric, unit(rng), unit(rng),
                       rng() % 2 ? std::optional<double>(unit(rng)) : std::nullopt, 5};
    const auto base = recommend(ctx, catalog);
    CHECK(base == recommend(ctx, catalog));
    const double scale = 0.01 + unit(rng) * 0.99;
    const auto scaled = recommend(ctx, catalog, {scale});
    REQUIRE(base.size() == scaled.size());
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(base[i].game == scaled[i].game);
    for (std::size_t i = 1; i < base.size(); ++i) CHECK(base[i - 1].score >= base[i].score);
  }
}

TEST_CASE("describe and aggregate") {
  const std::vector<double> four{0.2, 0.4, 0.6, 0.8};
  auto s = describe(four);
  CHECK(s.mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.q1 == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(s.q3 == doctest::Approx(0.65).epsilon(1e-12));
  REQUIRE(s.sd.has_value());
  CHECK(*s.sd == doctest::Approx(std::sqrt(0.2 / 3.0)).epsilon(1e-12));

  auto one = describe(std::vector<double>{0.7});
  CHECK(one.mean == 0.7);
  CHECK_FALSE(one.sd.has_value());
  CHECK(one.q1 == 0.7);
  CHECK(one.q3 == 0.7);

  std::vector<RatingRecord> records{
      {"p1", "frost", Dimension::Exertion, 0.2}, {"p2", "frost", Dimension::Exertion, 0.4},
      {"p3", "frost", Dimension::Exertion, 0.6}, {"p4", "frost", Dimension::Exertion, 0.8},
      {"p1", "frost", Dimension::Attention, 0.1},
  };
  auto table = aggregate_ratings(records);
  CHECK(table.size() == 2);
  CHECK(table.at({"frost", Dimension::Exertion}).n == 4);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(records.begin(), records.end(), rng);
    CHECK(aggregate_ratings(records) == table);
  }

  records.push_back({"p5", "frost", Dimension::Exertion, 1.2});
  CHECK(error_code([&] { aggregate_ratings(records); }) == "out-of-range-value");
  records.back() = {"p5", "frost", static_cast<Dimension>(9), 0.5};
  CHECK(error_code([&] { aggregate_ratings(records); }) == "unknown-dimension");
}

TEST_CASE("quartiles agree with an independent reference on random samples") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<double> sample(n);
    for (auto& v : sample) v = unit(rng);
    const auto s = describe(sample);
    REQUIRE(std::abs(s.q1 - reference_quantile(sample, 0.25)) <= 1e-12);
    REQUIRE(std::abs(s.q3 - reference_quantile(sample, 0.75)) <= 1e-12);
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    REQUIRE(*lo <= s.q1);
    REQUIRE(s.q1 <= s.q3);
    REQUIRE(s.q3 <= *hi);
    REQUIRE((s.mean >= *lo && s.mean <= *hi));
  }
}

TEST_CASE("ratings csv parsing") {
  auto records = parse_ratings_csv("participant_id,game_id,dimension,value\np1,frost,exertion,0.25\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0] == RatingRecord{"p1", "frost", Dimension::Exertion, 0.25});

  records = parse_ratings_csv(" participant_id , game_id,dimension,value \r\n\r\n p2 , food_rain , attention , 1 \r\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].participant_id == "p2");
  CHECK(records[0].value == 1.0);

  try {
    parse_ratings_csv(
        "participant_id,game_id,dimension,value\np1,frost,exertion,1.5\np1,frost,vibes,0.5\n"
        "p1,frost,exertion\np1,frost,exertion,abc\n");
    FAIL("expected bad-row");
  } catch (const RatingsCsvError& e) {
    CHECK(e.code() == "bad-row");
    REQUIRE(e.rows().size() == 4);
    CHECK(e.rows()[0].line == 2);
    CHECK(e.rows()[0].reason.find("range") != std::string::npos);
    CHECK(e.rows()[1].line == 3);
    CHECK(e.rows()[3].line == 5);
  }

  CHECK(error_code([] { parse_ratings_csv(""); }) == "missing-header");
  CHECK(error_code([] { parse_ratings_csv("p1,frost,exertion,0.2\n"); }) == "missing-header");
}

TEST_CASE("interquartile segments from the reference stats") {
  const auto segments = iqr_plot_data(reference_rating_stats());
  CHECK(segments.size() == 21);
  auto find = [&](const std::string& game, Dimension d) {
    return *std::find_if(segments.begin(), segments.end(), [&](const IqrSegment& s) {
      return s.game == game && s.dimension == d;
    });
  };
  const auto frost_ex = find("frost", Dimension::Exertion);
  const auto virus_ex = find("virus_hitter", Dimension::Exertion);
  CHECK(frost_ex.q1 == 0.158);
  CHECK(frost_ex.q3 == 0.263);
  CHECK(virus_ex.q1 == 0.466);
  CHECK(virus_ex.q3 == 0.649);
  CHECK(frost_ex.q3 < virus_ex.q1);
  CHECK(find("virus_hitter", Dimension::BodilyInterplay).q3 == 1.000);
  CHECK(find("frost", Dimension::BodilyInterplay).q1 == 0.000);

  StatsTable broken{{{"frost", Dimension::Stretch}, DimensionStats{3, 0.5, 0.1, 0.7, 0.3}}};
  CHECK(error_code([&] { iqr_plot_data(broken); }) == "inverted-interval");

  const auto j = to_json(segments);
  CHECK(j.size() == 21);
  CHECK(j[0].contains("q1"));
}

TEST_CASE("catalog json") {
  const auto j = catalog_to_json(default_catalog());
  REQUIRE(j.size() == 3);
  CHECK(j[0]["game"] == "frost");
  CHECK(j[0]["scores"]["exertion"] == 0.207);
  CHECK(j[2]["layout"] == "asymmetric");
}
