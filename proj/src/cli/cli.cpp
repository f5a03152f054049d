#include "meetplay/cli.hpp"

#include <pthread.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "meetplay/catalog.hpp"
#include "meetplay/error.hpp"
#include "meetplay/ratings.hpp"
#include "meetplay/sim.hpp"
#include "meetplay/ws_server.hpp"

namespace meetplay {

namespace {

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("io-error", "cannot write " + path);
  file << text;
  if (!file.flush()) throw Error("io-error", "failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int serve(const ServeOptions& options, std::ostream& out) {
  // Block the signals before the server thread exists so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  WsServer server(options);
  out << "listening on " << options.address << ":" << server.port() << " (ws path /ws)" << std::endl;
  std::thread loop([&] { server.run(); });
  int received = 0;
  sigwait(&signals, &received);
  server.stop();
  loop.join();
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Movement games for online meetings: server, simulator and analytics", "meetplay"};
  app.require_subcommand(1);

  ServeOptions serve_opts;
  std::string data_dir = "data";
  std::string web_root;
  auto* serve_cmd = app.add_subcommand("serve", "Run the WebSocket session server");
  serve_cmd->add_option("--port", serve_opts.port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--address", serve_opts.address, "Bind address")->capture_default_str();
  serve_cmd->add_option("--data-dir", data_dir, "Directory for results.jsonl and leaderboard.json")
      ->capture_default_str();
  serve_cmd->add_option("--web-root", web_root, "Static files served at /");
  serve_cmd->add_option("--break-interval", serve_opts.session.breaks.interval_s, "Seconds between breaks")
      ->capture_default_str();
  serve_cmd->add_option("--break-length", serve_opts.session.breaks.break_len_s, "Break length in seconds")
      ->capture_default_str();
  serve_cmd->add_option("--seed", serve_opts.seed, "Seed for session and game randomness");

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string report_out;
  std::string snapshots_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a scenario headless and write a metrics report");
  simulate_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required();
  simulate_cmd->add_option("--seed", seed, "Overrides the scenario seed");
  simulate_cmd->add_option("--out", report_out, "Report path (default stdout)");
  simulate_cmd->add_option("--snapshots", snapshots_out, "Write the per-tick snapshot log (JSON lines)");

  std::string ratings_path;
  std::string segments_out;
  auto* report_cmd = app.add_subcommand("report", "Summarize a ratings CSV into interquartile segments");
  report_cmd->add_option("ratings", ratings_path, "Ratings CSV")->required();
  report_cmd->add_option("--out", segments_out, "Output path (default stdout)");

  std::string phase = "break";
  std::string layout = "symmetric";
  MeetingContext context;
  double exertion = -1.0;
  auto* recommend_cmd = app.add_subcommand("recommend", "Rank games for a meeting context");
  recommend_cmd->add_option("--phase", phase, "break or mid_meeting")
      ->check(CLI::IsMember({"break", "mid_meeting"}))
      ->capture_default_str();
  recommend_cmd->add_option("--layout", layout, "symmetric or asymmetric")
      ->check(CLI::IsMember({"symmetric", "asymmetric"}))
      ->capture_default_str();
  recommend_cmd->add_option("--privacy", context.privacy, "0 = open office, 1 = private room")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  recommend_cmd->add_option("--attention", context.attention_budget, "Attention the group can spare")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  recommend_cmd->add_option("--exertion", exertion, "Desired exertion")->check(CLI::Range(0.0, 1.0));
  recommend_cmd->add_option("--minutes", context.minutes_available, "Minutes available")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*serve_cmd) {
      serve_opts.data_dir = data_dir;
      if (!web_root.empty()) serve_opts.web_root = web_root;
      validate(serve_opts.session);
      return serve(serve_opts, out);
    }
    if (*simulate_cmd) {
      auto scenario = load_scenario(scenario_path);
      if (seed) scenario.seed = *seed;
      const auto run = run_scenario(scenario);
      if (report_out.empty()) {
        out << to_json(run.report).dump(2) << '\n';
      } else {
        write_report(run.report, report_out);
      }
      if (!snapshots_out.empty()) write_snapshots(run.snapshots, snapshots_out);
      return 0;
    }
    if (*report_cmd) {
      const auto records = parse_ratings_csv(read_file(ratings_path));
      const auto segments = iqr_plot_data(aggregate_ratings(records));
      write_text(to_json(segments).dump(2) + "\n", segments_out, out);
      return 0;
    }
    if (*recommend_cmd) {
      context.phase = *moment_from_name(phase);
      context.layout = *layout_from_name(layout);
      if (exertion >= 0) context.desired_exertion = exertion;
      const auto catalog = default_catalog();
      out << to_json(recommend(context, catalog)).dump(2) << '\n';
      return 0;
    }
  } catch (const RatingsCsvError& e) {
    err << "error: " << e.code() << ": " << e.what() << '\n';
    for (const auto& row : e.rows()) err << "  line " << row.line << ": " << row.reason << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace meetplay
