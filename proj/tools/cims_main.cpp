// cims — configuration-driven simulator for Metropolis-Hastings sampling
// through an in-memory analog compute datapath.
//
// Verbs:
//   run            one experiment point, results CSV (+ optional trace files)
//   sweep          Cartesian sweep grid to CSV, seeds base_seed + row index
//   validate       parse the config and check model invariants
//   calibrate-lut  re-derive the ln(1+e^x) table error regression constant
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cims/experiment.hpp"

namespace {

cims::ExperimentConfig load_config(const std::string& path) {
  return cims::load_experiment_config(cims::ConfigDoc::parse_file(path));
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out, bool emit_trace) {
  cims::ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.chain.seed = *seed;
  if (out) cfg.output_path = *out;

  const cims::PointResult point = cims::emit_point_csv(
      cfg, cfg.chain.seed, cfg.output_path, emit_trace);
  if (!point.ok) {
    std::cerr << "run failed: " << point.error << "\n";
    return 2;
  }
  std::cout << "seed " << point.seed
            << "  kl_joint " << cims::format_double(point.kl_joint)
            << "  kl_marginal_1d "
            << cims::format_double(point.kl_marginal_1d)
            << "  acceptance " << cims::format_double(point.acceptance_rate)
            << "\nresults: " << cfg.output_path << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path,
              std::optional<std::uint64_t> base_seed,
              std::optional<std::string> out, std::optional<int> replicates) {
  cims::ExperimentConfig cfg = load_config(config_path);
  if (base_seed) cfg.base_seed = *base_seed;
  if (out) cfg.output_path = *out;
  if (replicates) {
    if (*replicates < 1) throw cims::ConfigError("replicates must be >= 1");
    cfg.replicates = *replicates;
  }

  const int rows = cims::emit_sweep_csv(cfg, cfg.output_path);
  std::cout << "wrote " << rows << " rows to " << cfg.output_path << "\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const cims::ExperimentConfig cfg = load_config(config_path);
  const cims::GmmModel model = cims::build_model(cfg.model);
  const cims::ValidationResult result = cims::validate_model(model);
  if (!result.ok) {
    for (const auto& violation : result.violations)
      std::cerr << "model violation: " << violation << "\n";
    return 1;
  }
  std::cout << "config ok: " << cfg.model.dimension << "-dimensional model, "
            << cfg.model.mixtures << " mixtures, "
            << (cfg.chain.arithmetic == cims::Arithmetic::hardware
                    ? "hardware"
                    : "exact")
            << " arithmetic\n";
  return 0;
}

int cmd_calibrate_lut(std::optional<std::string> config_path) {
  cims::HardwareConfig hw;
  if (config_path) hw = load_config(*config_path).hardware;

  const cims::LutTable lut =
      cims::LutTable::make(hw.lut_x_lo, hw.lut_entries, hw.lut_interp);
  constexpr int kGridPoints = 100000;
  double max_error = 0.0;
  double argmax = 0.0;
  for (int i = 0; i < kGridPoints; ++i) {
    const double x = hw.lut_x_lo * (1.0 - static_cast<double>(i) /
                                              (kGridPoints - 1));
    const double error =
        std::abs(cims::lut_ln1pexp(x, lut) - std::log1p(std::exp(x)));
    if (error > max_error) {
      max_error = error;
      argmax = x;
    }
  }
  std::cout << "table: [" << cims::format_double(hw.lut_x_lo) << ", 0], "
            << hw.lut_entries << " entries, "
            << (hw.lut_interp == cims::LutTable::Interp::linear ? "linear"
                                                                : "nearest")
            << "\nmeasured max |error|: " << cims::format_double(max_error)
            << " at x = " << cims::format_double(argmax)
            << "\nfrozen regression constant: "
            << cims::format_double(cims::kDefaultLutMaxAbsError) << "\n";
  const bool default_table = hw.lut_x_lo == -16.0 && hw.lut_entries == 256 &&
                             hw.lut_interp == cims::LutTable::Interp::linear;
  if (default_table && max_error > cims::kDefaultLutMaxAbsError) {
    std::cerr << "regression: measured error exceeds the frozen constant\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"in-memory-compute MCMC sampling simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> replicates;
  bool emit_trace = false;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* opt = cmd->add_option("--config", config_path,
                                "configuration document path");
    if (config_required) opt->required();
    cmd->add_option("--seed", [&seed](const CLI::results_t& values) {
      seed = std::stoull(values.front());
      return true;
    }, "seed override");
    cmd->add_option("--out", [&out](const CLI::results_t& values) {
      out = values.front();
      return true;
    }, "output path override");
  };

  auto* run = app.add_subcommand("run", "run a single experiment point");
  add_common(run, true);
  run->add_flag("--emit-trace", emit_trace,
                "also write per-iteration trace and ground-truth grid files");

  auto* sweep = app.add_subcommand("sweep", "run the configured sweep grid");
  add_common(sweep, true);
  sweep->add_option("--replicates", [&replicates](const CLI::results_t& values) {
    replicates = std::stoi(values.front());
    return true;
  }, "replicate count override");

  auto* validate =
      app.add_subcommand("validate", "check a configuration document");
  validate->add_option("--config", config_path, "configuration document path")
      ->required();

  auto* calibrate = app.add_subcommand(
      "calibrate-lut", "re-derive the LUT error regression constant");
  calibrate->add_option("--config", config_path,
                        "read table parameters from this config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out, emit_trace);
    if (sweep->parsed()) return cmd_sweep(config_path, seed, out, replicates);
    if (validate->parsed()) return cmd_validate(config_path);
    if (calibrate->parsed())
      return cmd_calibrate_lut(
          calibrate->count("--config") ? std::optional(config_path)
                                       : std::nullopt);
  } catch (const cims::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
