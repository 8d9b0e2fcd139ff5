// ixsim command line: serve, run, report, calibrate.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "ixsim/calibration.hpp"
#include "ixsim/config.hpp"
#include "ixsim/report.hpp"
#include "ixsim/server.hpp"
#include "ixsim/trial_log.hpp"

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCalibration = 2;
constexpr int kExitIo = 3;

ixsim::AppConfig config_from(const std::string & path)
{
  if (path.empty()) {
    return ixsim::AppConfig{};
  }
  return ixsim::load_config(path);
}

int serve(const ixsim::AppConfig & config, ixsim::ServerOptions opt)
{
  opt.sim = config.sim;
  ixsim::Server server(opt);
  try {
    server.start();
  } catch (const std::exception & e) {
    std::cerr << "ixsim serve: " << e.what() << "\n";
    return kExitIo;
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  std::cout << "ixsim: tcp " << opt.address << ":" << server.tcp_port() << ", websocket ws://"
            << opt.address << ":" << server.ws_port() << "/session" << std::endl;
  server.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

void print_summary(const ixsim::BatchSummary & s)
{
  std::cout << "trials " << s.n_total << ", failures " << s.n_fail << ", success rate " << s.p_success
            << " %\n";
  for (const auto & [name, st] : s.timers) {
    if (st.n > 0) {
      std::cout << "  " << name << ": mean " << st.mean_s << " s, std " << st.std_s << " s (n=" << st.n
                << ")\n";
    }
  }
  for (const auto & [mode, n] : s.outcome_counts) {
    std::cout << "  " << mode << ": " << n << "\n";
  }
  if (s.rounds_to_baseline) {
    std::cout << "  rounds to baseline: " << *s.rounds_to_baseline << "\n";
  }
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Teleoperated instrument-exchange simulator"};
  app.require_subcommand(1);

  std::string config_path;

  ixsim::ServerOptions serve_opt;
  std::uint64_t serve_seed = 0;
  auto * serve_cmd = app.add_subcommand("serve", "Run the TCP and WebSocket session server");
  serve_cmd->add_option("--tcp-port", serve_opt.tcp_port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--ws-port", serve_opt.ws_port, "WebSocket port (path /session)")->capture_default_str();
  serve_cmd->add_option("--latency-ms", serve_opt.channel.base_latency_ms, "One-way base latency")
    ->check(CLI::NonNegativeNumber)->capture_default_str();
  serve_cmd->add_option("--jitter-ms", serve_opt.channel.jitter_ms, "Half-width of the uniform jitter")
    ->check(CLI::NonNegativeNumber)->capture_default_str();
  serve_cmd->add_option("--drop-rate", serve_opt.channel.drop_rate, "Frame drop probability")
    ->check(CLI::Range(0.0, 0.999999))->capture_default_str();
  serve_cmd->add_option("--seed", serve_seed, "Channel and session-id seed")->capture_default_str();
  serve_cmd->add_option("--config", config_path, "INI config file");
  serve_cmd->add_option("--address", serve_opt.address, "Bind address")->capture_default_str();
  std::string log_dir;
  serve_cmd->add_option("--log-dir", log_dir, "Write one JSON-lines log per session here");

  std::string task = "cycle";
  std::string op = "novice";
  int trials = 20;
  std::uint64_t seed = 0;
  std::string out_path;
  std::optional<double> baseline;
  auto * run_cmd = app.add_subcommand("run", "Run a batch of scripted trials");
  run_cmd->add_option("--task", task)->check(CLI::IsMember({"attach", "detach", "cycle"}))->capture_default_str();
  run_cmd->add_option("--operator", op)->check(CLI::IsMember({"expert", "novice"}))->capture_default_str();
  run_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber)->capture_default_str();
  run_cmd->add_option("--seed", seed)->capture_default_str();
  run_cmd->add_option("--out", out_path, "JSON-lines trial log")->required();
  run_cmd->add_option("--config", config_path, "INI config file");
  run_cmd->add_option("--baseline-s", baseline, "Expert baseline for rounds-to-baseline")
    ->check(CLI::PositiveNumber);

  std::string in_path;
  std::string report_dir;
  auto * report_cmd = app.add_subcommand("report", "Render tables and CSVs from trial logs");
  report_cmd->add_option("--in", in_path, "JSON-lines trial log")->required();
  report_cmd->add_option("--out", report_dir, "Output directory")->required();

  std::string targets_path;
  std::string calib_out = "calibration.ini";
  auto * calib_cmd = app.add_subcommand("calibrate", "Fit operator transit times to target cycle means");
  calib_cmd->add_option("--targets", targets_path, "INI targets file")->required();
  calib_cmd->add_option("--config", config_path, "Base INI config file");
  calib_cmd->add_option("--out", calib_out, "Where to write the fitted config and report")
    ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  ixsim::AppConfig config;
  try {
    config = config_from(config_path);
  } catch (const ixsim::ConfigError & e) {
    std::cerr << "ixsim: " << e.what() << "\n";
    return std::filesystem::exists(config_path) ? kExitUsage : kExitIo;
  }

  try {
    if (*serve_cmd) {
      serve_opt.channel.seed = serve_seed;
      if (!log_dir.empty()) {
        serve_opt.log_dir = log_dir;
      }
      return serve(config, serve_opt);
    }

    if (*run_cmd) {
      ixsim::BatchSpec spec;
      spec.task = ixsim::task_from_string(task);
      spec.op = op == "expert" ? config.expert : config.novice;
      spec.n_trials = trials;
      spec.seed = seed;
      spec.sim = config.sim;
      spec.tick_budget = config.tick_budget;
      spec.baseline_s = baseline;
      const auto result = ixsim::run_batch(spec);
      ixsim::write_log(out_path, result.records);
      print_summary(result.summary);
      return kExitOk;
    }

    if (*report_cmd) {
      const auto log = ixsim::read_log(in_path);
      for (const auto & err : log.errors) {
        std::cerr << in_path << ":" << err.line << ": " << err.message << "\n";
      }
      if (log.records.empty()) {
        std::cerr << "ixsim report: no readable records in " << in_path << "\n";
        return kExitIo;
      }
      ixsim::write_report(log.records, report_dir);
      std::cout << ixsim::summary_text(log.records);
      return kExitOk;
    }

    if (*calib_cmd) {
      if (!std::filesystem::exists(targets_path)) {
        std::cerr << "ixsim calibrate: cannot open " << targets_path << "\n";
        return kExitIo;
      }
      ixsim::CalibrationTargets targets;
      try {
        targets = ixsim::load_targets(targets_path);
      } catch (const ixsim::ConfigError & e) {
        std::cerr << "ixsim calibrate: " << e.what() << "\n";
        return kExitUsage;
      }
      try {
        const auto result = ixsim::calibrate(targets, config);
        std::ofstream out(calib_out);
        ixsim::write_calibration_report(out, result);
        if (!out) {
          std::cerr << "ixsim calibrate: cannot write " << calib_out << "\n";
          return kExitIo;
        }
        std::cout << "expert macro transit " << result.expert.params.macro_transit_mean_s
                  << " s -> cycle mean " << result.expert.best.cycle_mean_s << " s\n"
                  << "novice macro transit " << result.novice.params.macro_transit_mean_s
                  << " s -> cycle mean " << result.novice.best.cycle_mean_s << " s\n"
                  << "written to " << calib_out << "\n";
        return kExitOk;
      } catch (const ixsim::CalibrationError & e) {
        std::cerr << "ixsim calibrate: " << e.what() << "\n";
        return kExitCalibration;
      }
    }
  } catch (const ixsim::IoError & e) {
    std::cerr << "ixsim: " << e.what() << "\n";
    return kExitIo;
  } catch (const ixsim::ConfigError & e) {
    std::cerr << "ixsim: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
