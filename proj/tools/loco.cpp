// Command-line front end: run scenarios, replay logs, calibrate drag and
// export log fields to CSV.

#include "loco/dynamics/rigid_body.hpp"
#include "loco/harness/bridge_server.hpp"
#include "loco/harness/log.hpp"
#include "loco/harness/replay.hpp"
#include "loco/harness/simulation.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace {

using namespace loco;
using namespace loco::harness;

void configure_logging() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("loco"));
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("LOCO_LOG_LEVEL");
  const std::string name = level ? level : "info";
  if (name == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (name == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (name == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    if (name != "info") spdlog::warn("LOCO_LOG_LEVEL '{}' not one of error|warn|info|debug; using info", name);
    spdlog::set_level(spdlog::level::info);
  }
}

void wait_for_operator(const BridgeChannel& channel) {
  spdlog::info("waiting for an operator connection");
  while (!channel.connected()) std::this_thread::sleep_for(std::chrono::milliseconds(20));
}

int cmd_run(const std::string& path, std::optional<double> dt, std::optional<std::uint64_t> seed, std::string log_path,
            std::optional<int> port, bool realtime, bool fast, bool wait) {
  const Scenario sc = load_scenario(path);
  if (log_path.empty()) log_path = sc.name + ".jsonl";
  RunOptions opt;
  opt.dt = dt;
  opt.seed = seed;
  opt.realtime = realtime || (port && !fast);

  BridgeChannel channel;
  std::unique_ptr<BridgeServer> server;
  if (port) {
    server = std::make_unique<BridgeServer>(channel, static_cast<std::uint16_t>(*port));
    opt.bridge = &channel;
    if (wait) wait_for_operator(channel);
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (log_path != "-") {
    file.open(log_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write log '" + log_path + "'");
    out = &file;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const RunSummary s = run_scenario(sc, *out, opt);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out->flush();
  if (server) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server->stop();
  }
  const auto a = attitude_of(s.final_state.orientation);
  spdlog::info("{}: {} at t={:.2f} s after {} steps, {} records, {:.2f} s wall", sc.name, to_string(s.reason),
               s.end_time, s.steps, s.records, wall);
  spdlog::info("final position [{:.3f}, {:.3f}, {:.3f}] m, yaw {:.1f} deg, surge {:.3f} m/s, battery {:.2f} V",
               s.final_state.position.x(), s.final_state.position.y(), s.final_state.position.z(), rad2deg(a.yaw),
               s.final_state.linear_velocity.x(), s.power.min_voltage());
  if (log_path != "-") spdlog::info("log written to {}", log_path);
  if (!s.diagnostic.empty()) spdlog::error("{}", s.diagnostic);
  return s.exit_code();
}

int cmd_replay(const std::string& path, double speed, std::optional<int> port) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open log '" + path + "'");
  ReplaySummary s;
  if (port) {
    BridgeChannel channel(1024);
    BridgeServer server(channel, static_cast<std::uint16_t>(*port));
    wait_for_operator(channel);
    s = replay_log(in, speed, [&](const OutboundFrame& f) { channel.publish(f); });
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  } else {
    std::int64_t seq = 0;
    s = replay_log(in, speed, [&](const OutboundFrame& f) { std::cout << encode_frame(f, ++seq) << '\n'; });
  }
  spdlog::info("replayed {} records as {} frames, {} line(s) skipped", s.records, s.frames, s.skipped);
  return 0;
}

int cmd_export(const std::string& path, const std::vector<std::string>& fields, const std::string& out_path) {
  const LogContents log = read_log_file(path);
  if (out_path.empty() || out_path == "-") {
    export_csv(log, fields, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    const auto rows = export_csv(log, fields, out);
    spdlog::info("{} rows written to {}", rows, out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"LoCO AUV simulator and autonomy stack"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write a JSON-lines log");
  std::string scenario_path, log_path;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<int> port;
  bool realtime = false, fast = false, wait = false;
  run->add_option("scenario", scenario_path, "Scenario YAML")->required()->check(CLI::ExistingFile);
  run->add_option("--dt", dt, "Integration step, s");
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--log", log_path, "Log path ('-' for stdout; default <name>.jsonl)");
  run->add_option("--bridge-port", port, "Serve the operator bridge on this port")->check(CLI::Range(0, 65535));
  auto* rt = run->add_flag("--realtime", realtime, "Pace to the wall clock (default with a bridge)");
  run->add_flag("--fast", fast, "Run as fast as possible")->excludes(rt);
  run->add_flag("--wait-operator", wait, "With a bridge, wait for a client before starting");

  auto* replay = app.add_subcommand("replay", "Re-emit a log's frames (stdout, or a bridge)");
  std::string replay_path;
  double speed = 1.0;
  std::optional<int> replay_port;
  replay->add_option("log", replay_path, "Log file")->required()->check(CLI::ExistingFile);
  replay->add_option("--speed", speed, "Time multiplier; 0 = as fast as possible")->check(CLI::NonNegativeNumber);
  replay->add_option("--bridge-port", replay_port, "Serve frames on this port")->check(CLI::Range(0, 65535));

  auto* calib = app.add_subcommand("calibrate-drag", "Quadratic drag coefficient from a steady-state run");
  double thrust = 0.0, steady = 0.0;
  calib->add_option("--thrust", thrust, "Total forward thrust, N")->required();
  calib->add_option("--speed", steady, "Steady surge speed, m/s")->required();

  auto* csv = app.add_subcommand("export-csv", "Export log fields (dotted paths) as CSV");
  std::string csv_path, csv_out;
  std::vector<std::string> fields{"t", "truth.pos.0", "truth.pos.1", "truth.depth", "truth.rpy_deg.2",
                                  "cmd.thrust", "power.voltage.0", "power.alarm"};
  csv->add_option("log", csv_path, "Log file")->required()->check(CLI::ExistingFile);
  csv->add_option("--fields", fields, "Fields, e.g. t truth.pos.0 est.rpy_deg.1")->delimiter(',');
  csv->add_option("--out", csv_out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario_path, dt, seed, log_path, port, realtime, fast, wait);
    if (*replay) return cmd_replay(replay_path, speed, replay_port);
    if (*calib) {
      std::cout << fmt::format("{:.6f}\n", dynamics::calibrate_drag(thrust, steady));
      return 0;
    }
    if (*csv) return cmd_export(csv_path, fields, csv_out);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
