// csbm-bayes: sampling, classification and limit estimates for the contextual SBM.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "csbm/errors.hpp"
#include "csbm/harness.hpp"

namespace {

std::string command_list() {
  std::string out;
  for (auto c : csbm::kCommands) {
    if (!out.empty()) out += ", ";
    out += c;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes-optimal node classification in the contextual stochastic block model"};
  std::string command;
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  app.add_option("command", command, "One of: " + command_list())->required();
  app.add_option("--config", config_path, "Configuration file (key = value)")->required();
  app.add_option("--out", out_path, "Output file (default: stdout)");
  app.add_option("--seed", seed, "Override the configured master seed");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  try {
    bool known = false;
    for (auto c : csbm::kCommands) known = known || c == command;
    if (!known) {
      throw csbm::InvalidArgument("unknown command '" + command + "' (expected " +
                                  command_list() + ")");
    }
    auto cfg = csbm::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_path.empty()) {
      csbm::run_command(command, cfg, std::cout, threads);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw csbm::InvalidArgument("cannot write '" + out_path + "'");
      csbm::run_command(command, cfg, out, threads);
      out.close();
      if (!out) throw csbm::InvalidArgument("failed writing '" + out_path + "'");
    }
  } catch (const csbm::ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << '\n';
    return 1;
  } catch (const csbm::ParseError& e) {
    std::cerr << "parse error (line " << e.line() << "): " << e.what() << '\n';
    return 1;
  } catch (const csbm::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 1;
  } catch (const csbm::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
