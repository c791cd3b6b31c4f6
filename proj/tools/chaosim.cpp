// chaosim: run, validate and list ensemble simulations of the kicked
// chaotic-map particle model.
//
// Exit status: 0 success, 1 validation or usage error, 2 I/O failure,
// 3 diverged fraction above the configured threshold.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "chaosim/config.hpp"
#include "chaosim/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitDivergence = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> particles;
  std::optional<std::size_t> iterations;
  std::optional<std::string> out;
};

// A preset name or a path to a config file.
chaosim::RunConfig load(const std::string& source) {
  if (auto preset = chaosim::find_preset(source)) return *preset;
  std::ifstream in(source, std::ios::binary);
  if (!in) {
    throw chaosim::IoError("cannot read config '" + source + "' (and it is not a preset)");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return chaosim::parse_config(text.str());
}

void apply(chaosim::RunConfig& config, const Overrides& o) {
  if (o.seed) config.ensemble.seed = *o.seed;
  if (o.particles) config.ensemble.n_particles = *o.particles;
  if (o.iterations) config.ensemble.n_iterations = *o.iterations;
  if (o.out) config.output.dir = *o.out;
  chaosim::validate(config);
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Override ensemble.seed");
  cmd->add_option("--particles", o.particles, "Override ensemble.n_particles");
  cmd->add_option("--iterations", o.iterations, "Override ensemble.n_iterations");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic chaotic-map ensemble simulator"};
  app.require_subcommand(1);

  std::string source;
  Overrides overrides;
  unsigned threads = 1;

  auto* run_cmd = app.add_subcommand("run", "Run a preset or config file");
  run_cmd->add_option("config", source, "Preset name or config path")->required();
  add_overrides(run_cmd, overrides);
  run_cmd->add_option("--out", overrides.out, "Override output.dir");
  run_cmd->add_option("--threads", threads, "Worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a config");
  validate_cmd->add_option("config", source, "Preset name or config path")->required();
  add_overrides(validate_cmd, overrides);
  bool echo = false;
  validate_cmd->add_flag("--print", echo, "Print the resolved config");

  auto* presets_cmd = app.add_subcommand("presets", "List built-in presets");
  bool show = false;
  presets_cmd->add_flag("--show", show, "Print each preset's resolved config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitValidation;
  }

  if (presets_cmd->parsed()) {
    for (const auto& name : chaosim::preset_names()) {
      std::cout << name << '\n';
      if (show) std::cout << chaosim::serialize_config(*chaosim::find_preset(name));
    }
    return kExitOk;
  }

  chaosim::RunConfig config;
  try {
    config = load(source);
    apply(config, overrides);
  } catch (const chaosim::ConfigError& e) {
    std::cerr << "chaosim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const chaosim::IoError& e) {
    std::cerr << "chaosim: " << e.what() << '\n';
    return kExitIo;
  }

  if (validate_cmd->parsed()) {
    if (echo) std::cout << chaosim::serialize_config(config);
    std::cout << "ok: " << config.name << " (" << chaosim::config_hash(config) << ")\n";
    return kExitOk;
  }

  try {
    const auto manifest = chaosim::run(config, chaosim::RunOptions{threads});
    std::cout << "wrote " << config.output.dir << " (" << manifest.files.size() + 1
              << " files, " << manifest.wall_time << " s)\n";
    if (manifest.divergence_exceeded) {
      std::cerr << "chaosim: " << manifest.n_diverged << " particles diverged ("
                << manifest.diverged_fraction << " > " << config.max_diverged_fraction << ")\n";
      return kExitDivergence;
    }
  } catch (const chaosim::IoError& e) {
    std::cerr << "chaosim: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "chaosim: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "chaosim: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
