#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "hero/errors.hpp"
#include "hero/metrics.hpp"
#include "hero/scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string scenarios_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("HERO_SCENARIO_DIR")) return env;
  return "scenarios";
}

std::string resolve_scenario(const std::string& arg, const std::string& dir) {
  if (fs::exists(arg)) return arg;
  const fs::path bundled = fs::path(dir) / (arg + ".json");
  if (fs::exists(bundled)) return bundled.string();
  throw hero::ConfigError("<file>", "scenario '" + arg + "' not found (looked for a file and " +
                                        bundled.string() + ")");
}

int cmd_run(const std::string& scenario_arg, const std::string& out_dir,
            const std::string& dir_flag, long long seed_override, bool seed_given,
            long ticks, bool real_time) {
  auto cfg = hero::load_scenario_file(resolve_scenario(scenario_arg, scenarios_dir(dir_flag)));
  if (seed_given) cfg.seed = static_cast<std::uint64_t>(seed_override);

  const auto result = hero::run_scenario(cfg, ticks);

  fs::create_directories(out_dir);
  const auto telemetry_path = (fs::path(out_dir) / "telemetry.csv").string();
  const auto events_path = (fs::path(out_dir) / "events.jsonl").string();
  const auto metrics_path = (fs::path(out_dir) / "metrics.json").string();
  hero::write_telemetry_csv(result.telemetry, telemetry_path);
  hero::write_events_jsonl(result.telemetry, events_path);
  const auto metrics = hero::compute_metrics(result.telemetry);
  hero::write_metrics_json(metrics, metrics_path);

  if (real_time) {
    // Demo playback: walk the recorded rows at wall-clock pace.
    const auto t0 = std::chrono::steady_clock::now();
    std::string last_channel;
    for (const auto& row : result.telemetry.rows) {
      std::this_thread::sleep_until(t0 + std::chrono::duration<double>(row.stamp));
      if (row.channel != last_channel) {
        std::printf("[%7.2f] channel=%s service=%s behavior=%s\n", row.stamp,
                    row.channel.c_str(), hero::to_string(row.service),
                    hero::to_string(row.behavior));
        last_channel = row.channel;
      }
    }
  }

  std::printf("scenario %s: %zu ticks, availability %.4f, switches %d, reinits %d\n",
              cfg.name.c_str(), result.telemetry.rows.size(), metrics.availability,
              metrics.switch_count, metrics.reinit_count);
  std::printf("wrote %s, %s, %s\n", telemetry_path.c_str(), events_path.c_str(),
              metrics_path.c_str());

  if (!result.violations.empty()) {
    for (const auto& v : result.violations) std::fprintf(stderr, "invariant: %s\n", v.c_str());
    return 3;
  }
  return 0;
}

int cmd_validate(const std::string& scenario_arg, const std::string& dir_flag) {
  const auto path = resolve_scenario(scenario_arg, scenarios_dir(dir_flag));
  const auto cfg = hero::load_scenario_file(path);
  std::printf("%s: ok (%zu streams, %.1f s at %.0f Hz, seed %llu)\n", path.c_str(),
              cfg.streams.size(), cfg.trajectory.duration, cfg.tick_rate,
              static_cast<unsigned long long>(cfg.seed));
  return 0;
}

int cmd_metrics(const std::string& telemetry_path, const std::string& events_path,
                const std::string& out_path) {
  const auto tel = hero::read_telemetry(telemetry_path, events_path);
  const auto metrics = hero::compute_metrics(tel);
  if (out_path.empty()) {
    std::cout << hero::metrics_to_json(metrics).dump(2) << std::endl;
  } else {
    hero::write_metrics_json(metrics, out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_list(const std::string& dir_flag) {
  const auto dir = scenarios_dir(dir_flag);
  if (!fs::is_directory(dir)) {
    std::fprintf(stderr, "no scenario directory at %s\n", dir.c_str());
    return 2;
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  for (const auto& n : names) std::printf("%s\n", n.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hero-sim: resilient odometry multiplexing on synthetic scenarios"};
  app.require_subcommand(1);

  std::string scenario, out_dir = "out", dir_flag, telemetry_path, events_path, out_path;
  long long seed = 0;
  long ticks = -1;
  bool real_time = false;

  auto* run = app.add_subcommand("run", "run a scenario and write telemetry + metrics");
  run->add_option("--scenario", scenario, "scenario file or bundled name")->required();
  run->add_option("--out", out_dir, "output directory (default out/)");
  auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--ticks", ticks, "truncate the run after N ticks");
  run->add_flag("--real-time", real_time, "pace playback against the wall clock");
  run->add_option("--scenarios-dir", dir_flag, "bundled scenario directory");

  auto* validate = app.add_subcommand("validate", "parse and check a scenario file");
  validate->add_option("--scenario", scenario, "scenario file or bundled name")->required();
  validate->add_option("--scenarios-dir", dir_flag, "bundled scenario directory");

  auto* metrics = app.add_subcommand("metrics", "recompute metrics from written telemetry");
  metrics->add_option("--telemetry", telemetry_path, "telemetry.csv path")->required();
  metrics->add_option("--events", events_path, "events.jsonl path")->required();
  metrics->add_option("--out", out_path, "write metrics JSON here instead of stdout");

  auto* list = app.add_subcommand("list-scenarios", "list bundled scenarios");
  list->add_option("--scenarios-dir", dir_flag, "bundled scenario directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(scenario, out_dir, dir_flag, seed, seed_opt->count() > 0, ticks, real_time);
    }
    if (validate->parsed()) return cmd_validate(scenario, dir_flag);
    if (metrics->parsed()) return cmd_metrics(telemetry_path, events_path, out_path);
    if (list->parsed()) return cmd_list(dir_flag);
  } catch (const hero::ConfigError& e) {
    std::fprintf(stderr, "config error at %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
