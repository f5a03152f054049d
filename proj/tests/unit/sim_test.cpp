#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "food_rain_oracle.hpp"
#include "meetplay/cli.hpp"
#include "meetplay/error.hpp"
#include "meetplay/sim.hpp"

using namespace meetplay;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("meetplay_sim_" + std::to_string(::getpid()) + "_" + name);
}

Scenario single(GameKind game, double duration_s, std::vector<TraceSegment> trace, std::uint64_t seed = 1) {
  return Scenario{seed, game, duration_s, {{"Ana", std::move(trace)}}};
}

std::uint32_t reps(const MetricsReport& r, std::size_t who, GestureKind kind) {
  return r.participants[who].reps[static_cast<std::size_t>(kind)];
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST_CASE("still segment gives identical frames") {
  const auto frames = synth_frames({SegmentKind::Still, 0.0, 1.0}, "Ana");
  REQUIRE(frames.size() == 20);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(frames[i].t_ms == i * 50);
    CHECK(frames[i].keypoints == frames[0].keypoints);
  }
  CHECK(frames[0].keypoints == neutral_pose());
  CHECK(mouth_aperture(neutral_pose()) == doctest::Approx(0.125));
}

TEST_CASE("closed-form kinematics") {
  TraceSegment sway{SegmentKind::Sway, 0.0, 2.0, 0.1, 2.0};
  CHECK(synth_pose(sway, 0.5)[KeypointId::Nose].x == doctest::Approx(0.6));
  CHECK(synth_pose(sway, 0.5)[KeypointId::MouthLeft].x == doctest::Approx(0.56));
  CHECK(synth_pose(sway, 0.5)[KeypointId::LeftShoulder].x == doctest::Approx(0.35));

  TraceSegment twist{SegmentKind::Twist, 0.0, 2.0, 0.1, 2.0};
  const auto folded = synth_pose(twist, 1.0);
  CHECK(folded[KeypointId::RightShoulder].x - folded[KeypointId::LeftShoulder].x == doctest::Approx(0.12));

  TraceSegment nod{SegmentKind::Nod, 0.0, 2.0, 0.05, 2.0};
  CHECK(synth_pose(nod, 0.5)[KeypointId::Nose].y == doctest::Approx(0.45));

  TraceSegment mouth{SegmentKind::Mouth, 0.0, 2.0};
  mouth.open_s = 0.4;
  mouth.closed_s = 0.6;
  CHECK(mouth_aperture(synth_pose(mouth, 0.1)) == doctest::Approx(0.5));
  CHECK(mouth_aperture(synth_pose(mouth, 0.5)) == doctest::Approx(0.125));
}

TEST_CASE("segment and scenario validation") {
  CHECK(error_code([] { synth_frames({SegmentKind::Sway, 0, 1, 0.0}, "a"); }) == "invalid-segment");
  CHECK(error_code([] { synth_frames({SegmentKind::Nod, 0, 1, 0.6}, "a"); }) == "invalid-segment");
  CHECK(error_code([] { synth_frames({SegmentKind::Twist, 0, 1, 0.1, 0.0}, "a"); }) == "invalid-segment");
  CHECK(error_code([] { synth_frames({SegmentKind::Still, 0, 0}, "a"); }) == "invalid-segment");

  auto sc = single(GameKind::Frost, 10, {{SegmentKind::Still, 0, 5}, {SegmentKind::Still, 4, 5}});
  CHECK(error_code([&] { validate(sc); }) == "scenario-invalid");
  sc.participants.clear();
  CHECK(error_code([&] { run_scenario(sc); }) == "scenario-invalid");
  sc = single(GameKind::Frost, 0, {});
  CHECK(error_code([&] { validate(sc); }) == "scenario-invalid");
  sc = single(GameKind::VirusHitter, 10, {});
  CHECK(error_code([&] { run_scenario(sc); }) == "too-few-participants");

  const auto j = json::parse(R"({"seed":4,"game":"food_rain","duration_s":5,
      "participants":[{"name":"A","trace":[{"kind":"mouth","start_s":0,"len_s":5,"open_s":1}]}]})");
  const auto parsed = scenario_from_json(j);
  CHECK(parsed.participants[0].trace[0].open_s == 1.0);
  CHECK(scenario_from_json(to_json(parsed)) == parsed);
  CHECK(error_code([] { scenario_from_json(json::parse(R"({"seed":1})")); }) == "scenario-invalid");
  CHECK(error_code([] {
          scenario_from_json(json::parse(
              R"({"seed":1,"game":"chess","duration_s":1,"participants":[{"name":"a"}]})"));
        }) == "scenario-invalid");
}

TEST_CASE("sinusoid sway gives five events each way") {
  const auto run = run_scenario(single(GameKind::Frost, 12,
                                       {{SegmentKind::Still, 0, 2}, {SegmentKind::Sway, 2, 10, 0.1, 2.0}}));
  CHECK(reps(run.report, 0, GestureKind::SwayLeft) == 5);
  CHECK(reps(run.report, 0, GestureKind::SwayRight) == 5);
  CHECK(reps(run.report, 0, GestureKind::NodRep) == 0);
}

TEST_CASE("sub-threshold nod is silent") {
  const auto run = run_scenario(single(GameKind::Frost, 12, {{SegmentKind::Nod, 0, 12, 0.02, 2.0}}));
  CHECK(reps(run.report, 0, GestureKind::NodRep) == 0);
  const auto big = run_scenario(single(GameKind::Frost, 12, {{SegmentKind::Nod, 0, 12, 0.08, 2.0}}));
  CHECK(reps(big.report, 0, GestureKind::NodRep) > 0);
}

TEST_CASE("frost still run only accumulates") {
  const auto run = run_scenario(single(GameKind::Frost, 60, {{SegmentKind::Still, 0, 60}}));
  const auto& series = run.report.frost_coverage;
  REQUIRE(series.size() == 1200);
  CHECK(run.report.ticks == 1200);
  for (std::size_t i = 1; i < series.size(); ++i) REQUIRE(series[i][0] >= series[i - 1][0]);
  CHECK(series.back()[0] > 0.0);
  CHECK(run.snapshots.size() == 1200);
  CHECK(run.report.virus_hp.empty());
}

TEST_CASE("food rain run matches the brute-force replay") {
  Scenario sc{7, GameKind::FoodRain, 90, {{"Ana", {{SegmentKind::ChaseItems, 0, 90}}}}};
  const auto run = run_scenario(sc);
  const auto tally = oracle::replay_food_rain({"Ana"}, sc.seed, run.inputs);
  const auto& p = run.report.results.participants.at(0);
  CHECK(p.score == tally.at("Ana").score);
  CHECK(p.metrics.at("fruits_caught") == tally.at("Ana").fruits);
  CHECK(p.metrics.at("desserts_caught") == tally.at("Ana").desserts);
  CHECK(p.metrics.at("missed") == tally.at("Ana").missed);
  CHECK(p.score == p.metrics.at("fruits_caught") - p.metrics.at("desserts_caught"));
  CHECK(p.score > 20);
  CHECK(run.report.ticks == 1800);

  // Gesture tallies agree with the event log.
  RepCounts counted{};
  for (const auto& e : run.events) ++counted[static_cast<std::size_t>(e.kind)];
  CHECK(counted == run.report.participants[0].reps);
}

TEST_CASE("chasing beats sitting still") {
  double chase_total = 0;
  double still_total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Scenario sc{seed, GameKind::FoodRain, 90,
                {{"Chaser", {{SegmentKind::ChaseItems, 0, 90}}}, {"Sitter", {{SegmentKind::Still, 0, 90}}}}};
    const auto run = run_scenario(sc);
    chase_total += static_cast<double>(run.report.results.participants[0].score);
    still_total += static_cast<double>(run.report.results.participants[1].score);
  }
  CHECK(chase_total / 20 > still_total / 20);
}

TEST_CASE("virus hitter runs are repeatable") {
  const auto sc = load_scenario(fs::path(MEETPLAY_SOURCE_DIR) / "scenarios" / "virus_hitter.json");
  const auto a = run_scenario(sc);
  const auto b = run_scenario(sc);
  CHECK(a.report.virus_hp == b.report.virus_hp);
  CHECK(a.report.results == b.report.results);
  CHECK(a.snapshots == b.snapshots);
  CHECK(a.report.virus_hp.size() == a.report.ticks);
}

TEST_CASE("reports are byte-stable") {
  const auto run = run_scenario(single(GameKind::FoodRain, 5, {{SegmentKind::Still, 0, 5}}));
  const auto p1 = temp_path("r1.json");
  const auto p2 = temp_path("r2.json");
  write_report(run.report, p1);
  write_report(run.report, p2);
  CHECK(slurp(p1) == slurp(p2));
  const auto j = json::parse(slurp(p1));
  CHECK(j["frost_coverage"].is_array());
  CHECK(j["frost_coverage"].empty());
  CHECK(error_code([&] { write_report(run.report, "/nonexistent-dir/x/report.json"); }) == "io-error");

  MetricsReport empty;
  write_report(empty, p1);
  CHECK(json::parse(slurp(p1))["virus_hp"] == json::array());
  fs::remove(p1);
  fs::remove(p2);
}

TEST_CASE("command line") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"simulate"}) == 2);
  CHECK(run_cli({"recommend", "--phase", "lunch"}) == 2);
  CHECK(run_cli({"simulate", "missing.json"}) == 1);
  CHECK(run_cli({"--help"}) == 0);

  std::string text;
  REQUIRE(run_cli({"recommend", "--phase", "break", "--layout", "asymmetric", "--privacy", "0.5",
                   "--attention", "0.5"},
                  &text) == 0);
  const auto ranked = json::parse(text);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0]["game"] == "virus_hitter");

  REQUIRE(run_cli({"report", std::string(MEETPLAY_SOURCE_DIR) + "/fixtures/ratings_sample.csv"}, &text) == 0);
  const auto segments = json::parse(text);
  CHECK(segments.size() == 21);
  for (const auto& s : segments) CHECK(s["q1"].get<double>() <= s["q3"].get<double>());

  const auto scenario = std::string(MEETPLAY_SOURCE_DIR) + "/scenarios/foodrain.json";
  const auto r1 = temp_path("cli1.json");
  const auto r2 = temp_path("cli2.json");
  REQUIRE(run_cli({"simulate", scenario, "--seed", "7", "--out", r1.string()}) == 0);
  REQUIRE(run_cli({"simulate", scenario, "--seed", "7", "--out", r2.string()}) == 0);
  CHECK(slurp(r1) == slurp(r2));
  REQUIRE(run_cli({"simulate", scenario, "--seed", "8", "--out", r2.string()}) == 0);
  CHECK(json::parse(slurp(r2))["seed"] == 8);
  fs::remove(r1);
  fs::remove(r2);
}
