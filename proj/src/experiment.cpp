#include "cims/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace cims {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string sanitize_message(std::string msg) {
  for (char& c : msg)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return msg;
}

std::string stem_of(const std::string& path) {
  const auto dot = path.rfind(".csv");
  return dot == std::string::npos ? path : path.substr(0, dot);
}

void write_common_metadata(CsvWriter& writer, const ExperimentConfig& cfg) {
  writer.metadata("tool", std::string("cims ") + kToolVersion);
  writer.metadata("config_hash", cfg.config_hash);
  writer.metadata("perf_calibration", "calibrated-defaults");
  writer.metadata("timestamp", timestamp_utc());
}

using AxisSetter = std::function<void(ExperimentConfig&, double)>;

std::int64_t require_integer(const std::string& name, double value) {
  const double rounded = std::round(value);
  if (std::abs(value - rounded) > 1e-9)
    throw ConfigError("sweep axis '" + name + "' requires integer values");
  return static_cast<std::int64_t>(rounded);
}

const std::map<std::string, AxisSetter>& axis_setters() {
  static const std::map<std::string, AxisSetter> setters = {
      {"d", [](ExperimentConfig& c, double v) { c.model.d = v; }},
      {"dimension",
       [](ExperimentConfig& c, double v) {
         c.model.dimension = static_cast<int>(require_integer("dimension", v));
       }},
      {"mixtures",
       [](ExperimentConfig& c, double v) {
         c.model.mixtures = static_cast<int>(require_integer("mixtures", v));
       }},
      {"step_scale",
       [](ExperimentConfig& c, double v) { c.proposal.step_scale = v; }},
      {"total_samples",
       [](ExperimentConfig& c, double v) {
         c.chain.total_samples = require_integer("total_samples", v);
       }},
      {"burn_in",
       [](ExperimentConfig& c, double v) {
         c.chain.burn_in = require_integer("burn_in", v);
       }},
      {"refresh_period",
       [](ExperimentConfig& c, double v) {
         c.chain.refresh_period = require_integer("refresh_period", v);
       }},
      {"dac_bits",
       [](ExperimentConfig& c, double v) {
         c.hardware.dac_bits = static_cast<int>(require_integer("dac_bits", v));
       }},
      {"adc_bits",
       [](ExperimentConfig& c, double v) {
         c.hardware.adc_bits = static_cast<int>(require_integer("adc_bits", v));
       }},
      {"weight_bits",
       [](ExperimentConfig& c, double v) {
         c.hardware.weight_bits =
             static_cast<int>(require_integer("weight_bits", v));
       }},
      {"rows",
       [](ExperimentConfig& c, double v) {
         c.hardware.rows = static_cast<int>(require_integer("rows", v));
       }},
      {"operand_range",
       [](ExperimentConfig& c, double v) { c.hardware.operand_range = v; }},
      {"noise_sigma_norm",
       [](ExperimentConfig& c, double v) { c.hardware.noise_sigma_norm = v; }},
      {"dac_ref_current_na",
       [](ExperimentConfig& c, double v) { c.hardware.dac_ref_current_na = v; }},
      {"clm_epsilon",
       [](ExperimentConfig& c, double v) { c.hardware.clm_epsilon = v; }},
      {"rng_bias",
       [](ExperimentConfig& c, double v) { c.hardware.rng_bias = v; }},
      {"bins_per_dim",
       [](ExperimentConfig& c, double v) {
         c.grid.bins_per_dim =
             static_cast<int>(require_integer("bins_per_dim", v));
       }},
      {"pseudo_count",
       [](ExperimentConfig& c, double v) { c.grid.pseudo_count = v; }},
  };
  return setters;
}

void check_known_keys(const ConfigDoc& doc, const std::string& section,
                      const std::set<std::string>& known) {
  const auto sec = doc.sections.find(section);
  if (sec == doc.sections.end()) return;
  for (const auto& [key, value] : sec->second) {
    if (section == "sweep" && key.rfind("axis.", 0) == 0) continue;
    if (!known.count(key))
      throw ConfigError("config: unknown key '" + key + "' in [" + section +
                        "]");
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

}  // namespace

GmmModel generate_model(double d, int dimension, int mixtures,
                        std::uint64_t model_seed) {
  if (dimension < 1)
    throw std::invalid_argument("generate_model: dimension must be >= 1");
  if (mixtures < 1)
    throw std::invalid_argument("generate_model: mixtures must be >= 1");

  const Eigen::MatrixXd sigmas = Eigen::MatrixXd::Ones(dimension, mixtures);
  if (mixtures == 2) {
    if (!(d > 0.0))
      throw std::invalid_argument(
          "generate_model: mean distance d must be > 0 for the two-mixture "
          "family");
    Eigen::VectorXd mu1(dimension);
    for (int i = 0; i < dimension; ++i) mu1[i] = (i % 2 == 0) ? d : -d;
    Eigen::MatrixXd means(dimension, 2);
    means.col(0) = mu1;
    means.col(1) = -mu1;
    return GmmModel::from_parameters(Eigen::Vector2d(0.5, 0.5), means, sigmas);
  }

  RandomSource rng(model_seed);
  const double range = std::abs(d);
  Eigen::MatrixXd means(dimension, mixtures);
  for (int j = 0; j < mixtures; ++j)
    for (int i = 0; i < dimension; ++i)
      means(i, j) = range * (2.0 * rng.uniform() - 1.0);
  const Eigen::VectorXd weights =
      Eigen::VectorXd::Constant(mixtures, 1.0 / mixtures);
  return GmmModel::from_parameters(weights, means, sigmas);
}

GmmModel build_model(const ModelSpec& spec) {
  if (spec.source == ModelSpec::Source::generator)
    return generate_model(spec.d, spec.dimension, spec.mixtures,
                          spec.model_seed);
  return GmmModel::from_parameters(spec.weights, spec.means, spec.stddevs);
}

GridSpec resolve_grid(const GridConfig& grid, const GmmModel& model) {
  if (!grid.explicit_bounds)
    return GridSpec::for_model(model, grid.bins_per_dim, grid.padding_sigmas,
                               grid.pseudo_count);
  GridSpec spec;
  spec.lower = grid.lower;
  spec.upper = grid.upper;
  spec.bins =
      Eigen::VectorXi::Constant(grid.lower.size(), grid.bins_per_dim);
  spec.pseudo_count = grid.pseudo_count;
  return spec;
}

const std::vector<std::string>& sweep_axis_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, setter] : axis_setters()) out.push_back(name);
    return out;
  }();
  return names;
}

void apply_axis_value(ExperimentConfig& cfg, const std::string& name,
                      double value) {
  const auto it = axis_setters().find(name);
  if (it == axis_setters().end())
    throw ConfigError("config: unknown sweep axis '" + name + "'");
  it->second(cfg, value);
}

ExperimentConfig load_experiment_config(const ConfigDoc& doc) {
  static const std::set<std::string> known_sections = {
      "model", "chain", "proposal", "hardware",
      "perf",  "grid",  "sweep",    "output"};
  for (const auto& [section, keys] : doc.sections)
    if (!known_sections.count(section))
      throw ConfigError("config: unknown section [" + section + "]");

  ExperimentConfig cfg;
  cfg.config_hash = doc.content_hash();

  // --- model ---
  check_known_keys(doc, "model",
                   {"source", "d", "dimension", "mixtures", "model_seed",
                    "weights", "mean_0", "mean_1", "mean_2", "mean_3",
                    "mean_4", "mean_5", "mean_6", "mean_7", "sigma_0",
                    "sigma_1", "sigma_2", "sigma_3", "sigma_4", "sigma_5",
                    "sigma_6", "sigma_7"});
  const std::string source = doc.get_string("model", "source", "generator");
  if (source == "generator") {
    cfg.model.source = ModelSpec::Source::generator;
    cfg.model.d = doc.get_double("model", "d", cfg.model.d);
    cfg.model.dimension =
        static_cast<int>(doc.get_int("model", "dimension", cfg.model.dimension));
    cfg.model.mixtures =
        static_cast<int>(doc.get_int("model", "mixtures", cfg.model.mixtures));
    cfg.model.model_seed = static_cast<std::uint64_t>(
        doc.get_int("model", "model_seed", static_cast<std::int64_t>(cfg.model.model_seed)));
  } else if (source == "inline") {
    cfg.model.source = ModelSpec::Source::inline_params;
    const std::vector<double> weights = doc.get_double_list("model", "weights");
    if (weights.empty())
      throw ConfigError("config: inline model requires 'weights'");
    const int mixtures = static_cast<int>(weights.size());
    if (mixtures > 8)
      throw ConfigError("config: inline model supports at most 8 mixtures");
    std::vector<std::vector<double>> means(mixtures), sigmas(mixtures);
    for (int j = 0; j < mixtures; ++j) {
      means[j] = doc.get_double_list("model", "mean_" + std::to_string(j));
      sigmas[j] = doc.get_double_list("model", "sigma_" + std::to_string(j));
      if (means[j].empty() || sigmas[j].empty())
        throw ConfigError("config: inline model missing mean_" +
                          std::to_string(j) + " or sigma_" +
                          std::to_string(j));
      if (means[j].size() != means[0].size() ||
          sigmas[j].size() != means[0].size())
        throw ConfigError("config: inline model vectors differ in length");
    }
    const auto dim = static_cast<Eigen::Index>(means[0].size());
    cfg.model.weights = to_vector(weights);
    cfg.model.means.resize(dim, mixtures);
    cfg.model.stddevs.resize(dim, mixtures);
    for (int j = 0; j < mixtures; ++j) {
      cfg.model.means.col(j) = to_vector(means[j]);
      cfg.model.stddevs.col(j) = to_vector(sigmas[j]);
    }
    cfg.model.dimension = static_cast<int>(dim);
    cfg.model.mixtures = mixtures;
  } else {
    throw ConfigError("config: model source must be 'generator' or 'inline'");
  }

  // --- chain ---
  check_known_keys(doc, "chain",
                   {"total_samples", "burn_in", "seed", "refresh_period",
                    "arithmetic"});
  cfg.chain.total_samples =
      doc.get_int("chain", "total_samples", cfg.chain.total_samples);
  cfg.chain.burn_in = doc.get_int("chain", "burn_in", cfg.chain.burn_in);
  cfg.chain.seed = static_cast<std::uint64_t>(
      doc.get_int("chain", "seed", static_cast<std::int64_t>(cfg.chain.seed)));
  cfg.chain.refresh_period =
      doc.get_int("chain", "refresh_period", cfg.chain.refresh_period);
  const std::string arithmetic =
      doc.get_string("chain", "arithmetic", "exact");
  if (arithmetic == "exact") {
    cfg.chain.arithmetic = Arithmetic::exact;
  } else if (arithmetic == "hardware") {
    cfg.chain.arithmetic = Arithmetic::hardware;
  } else {
    throw ConfigError("config: arithmetic must be 'exact' or 'hardware'");
  }
  if (cfg.chain.total_samples < 1)
    throw ConfigError("config: total_samples must be >= 1");
  if (cfg.chain.burn_in < 0) throw ConfigError("config: burn_in must be >= 0");

  // --- proposal ---
  check_known_keys(doc, "proposal", {"kind", "step_scale"});
  const std::string kind = doc.get_string("proposal", "kind", "gaussian");
  if (kind == "gaussian") {
    cfg.proposal.kind = ProposalKind::gaussian;
  } else if (kind == "uniform") {
    cfg.proposal.kind = ProposalKind::uniform;
  } else {
    throw ConfigError("config: proposal kind must be 'gaussian' or 'uniform'");
  }
  cfg.proposal.step_scale =
      doc.get_double("proposal", "step_scale", cfg.proposal.step_scale);
  if (!(cfg.proposal.step_scale > 0.0))
    throw ConfigError("config: step_scale must be > 0");

  // --- hardware ---
  check_known_keys(
      doc, "hardware",
      {"dac_bits", "adc_bits", "weight_bits", "operand_range", "rows",
       "noise_sigma_norm", "dac_ref_current_na", "clm_epsilon", "rng_bias",
       "frozen_mismatch", "ideal_gaussian_proposal", "lut_x_lo", "lut_entries",
       "lut_interp"});
  HardwareConfig& hw = cfg.hardware;
  hw.dac_bits = static_cast<int>(doc.get_int("hardware", "dac_bits", hw.dac_bits));
  hw.adc_bits = static_cast<int>(doc.get_int("hardware", "adc_bits", hw.adc_bits));
  hw.weight_bits =
      static_cast<int>(doc.get_int("hardware", "weight_bits", hw.weight_bits));
  hw.operand_range =
      doc.get_double("hardware", "operand_range", hw.operand_range);
  hw.rows = static_cast<int>(doc.get_int("hardware", "rows", hw.rows));
  hw.noise_sigma_norm =
      doc.get_double("hardware", "noise_sigma_norm", hw.noise_sigma_norm);
  hw.dac_ref_current_na =
      doc.get_double("hardware", "dac_ref_current_na", hw.dac_ref_current_na);
  hw.clm_epsilon = doc.get_double("hardware", "clm_epsilon", hw.clm_epsilon);
  hw.rng_bias = doc.get_double("hardware", "rng_bias", hw.rng_bias);
  hw.frozen_mismatch =
      doc.get_bool("hardware", "frozen_mismatch", hw.frozen_mismatch);
  hw.ideal_gaussian_proposal = doc.get_bool("hardware", "ideal_gaussian_proposal",
                                            hw.ideal_gaussian_proposal);
  hw.lut_x_lo = doc.get_double("hardware", "lut_x_lo", hw.lut_x_lo);
  hw.lut_entries =
      static_cast<int>(doc.get_int("hardware", "lut_entries", hw.lut_entries));
  const std::string interp = doc.get_string("hardware", "lut_interp", "linear");
  if (interp == "linear") {
    hw.lut_interp = LutTable::Interp::linear;
  } else if (interp == "nearest") {
    hw.lut_interp = LutTable::Interp::nearest;
  } else {
    throw ConfigError("config: lut_interp must be 'linear' or 'nearest'");
  }
  if (hw.dac_bits < 1 || hw.adc_bits < 1 || hw.weight_bits < 1)
    throw ConfigError("config: bit widths must be >= 1");
  if (!(hw.operand_range > 0.0))
    throw ConfigError("config: operand_range must be > 0");
  if (hw.rows < 0) throw ConfigError("config: rows must be >= 0");
  if (hw.noise_sigma_norm < 0.0)
    throw ConfigError("config: noise_sigma_norm must be >= 0");
  if (!(hw.rng_bias > 0.0 && hw.rng_bias < 1.0))
    throw ConfigError("config: rng_bias must be inside (0, 1)");

  // --- perf ---
  check_known_keys(doc, "perf",
                   {"sram_energy_j", "dac_energy_j", "adc_energy_j",
                    "adc_conversions_per_iteration", "cycles_per_iteration",
                    "clock_frequency_hz"});
  PerfConfig& perf = cfg.perf;
  perf.sram_energy_j =
      doc.get_double("perf", "sram_energy_j", perf.sram_energy_j);
  perf.dac_energy_j = doc.get_double("perf", "dac_energy_j", perf.dac_energy_j);
  perf.adc_energy_j = doc.get_double("perf", "adc_energy_j", perf.adc_energy_j);
  perf.adc_conversions_per_iteration = static_cast<int>(
      doc.get_int("perf", "adc_conversions_per_iteration",
                  perf.adc_conversions_per_iteration));
  perf.cycles_per_iteration = static_cast<int>(
      doc.get_int("perf", "cycles_per_iteration", perf.cycles_per_iteration));
  perf.clock_frequency_hz =
      doc.get_double("perf", "clock_frequency_hz", perf.clock_frequency_hz);

  // --- grid ---
  check_known_keys(doc, "grid",
                   {"bins_per_dim", "padding_sigmas", "pseudo_count", "lower",
                    "upper"});
  cfg.grid.bins_per_dim = static_cast<int>(
      doc.get_int("grid", "bins_per_dim", cfg.grid.bins_per_dim));
  cfg.grid.padding_sigmas =
      doc.get_double("grid", "padding_sigmas", cfg.grid.padding_sigmas);
  cfg.grid.pseudo_count =
      doc.get_double("grid", "pseudo_count", cfg.grid.pseudo_count);
  const bool has_lower = doc.has("grid", "lower");
  const bool has_upper = doc.has("grid", "upper");
  if (has_lower != has_upper)
    throw ConfigError("config: grid lower/upper must be given together");
  if (has_lower) {
    cfg.grid.explicit_bounds = true;
    cfg.grid.lower = to_vector(doc.get_double_list("grid", "lower"));
    cfg.grid.upper = to_vector(doc.get_double_list("grid", "upper"));
    if (cfg.grid.lower.size() != cfg.grid.upper.size())
      throw ConfigError("config: grid lower/upper lengths differ");
  }

  // --- sweep ---
  check_known_keys(doc, "sweep", {"replicates", "base_seed"});
  cfg.replicates =
      static_cast<int>(doc.get_int("sweep", "replicates", cfg.replicates));
  if (cfg.replicates < 1)
    throw ConfigError("config: replicates must be >= 1");
  cfg.base_seed = static_cast<std::uint64_t>(doc.get_int(
      "sweep", "base_seed", static_cast<std::int64_t>(cfg.chain.seed)));
  if (const auto sweep = doc.sections.find("sweep");
      sweep != doc.sections.end()) {
    for (const auto& [key, value] : sweep->second) {
      if (key.rfind("axis.", 0) != 0) continue;
      SweepAxis axis;
      axis.name = key.substr(5);
      if (!axis_setters().count(axis.name))
        throw ConfigError("config: unknown sweep axis '" + axis.name + "'");
      axis.values = doc.get_double_list("sweep", key);
      if (axis.values.empty())
        throw ConfigError("config: sweep axis '" + axis.name + "' is empty");
      cfg.axes.push_back(std::move(axis));
    }
  }

  // --- output ---
  check_known_keys(doc, "output", {"path"});
  cfg.output_path = doc.get_string("output", "path", cfg.output_path);

  return cfg;
}

PointResult run_point(const ExperimentConfig& cfg, std::uint64_t seed,
                      SampleTrace* trace_out, GridSpec* grid_out) {
  PointResult out;
  out.seed = seed;
  out.kl_joint = kNaN;
  out.kl_marginal_1d = kNaN;
  out.acceptance_rate = kNaN;
  out.x1_mean = kNaN;
  out.x1_var = kNaN;
  try {
    const GmmModel model = build_model(cfg.model);
    const ValidationResult validation = validate_model(model);
    if (!validation.ok) {
      std::string joined = "invalid model:";
      for (const auto& violation : validation.violations)
        joined += " " + violation + ";";
      throw std::invalid_argument(joined);
    }

    ChainConfig chain = cfg.chain;
    chain.seed = seed;
    SampleTrace trace = run_chain(model, chain, cfg.proposal, cfg.hardware);
    const GridSpec grid = resolve_grid(cfg.grid, model);

    if (model.dimension() <= 3)
      out.kl_joint = marginal_kl(trace.samples, model, grid, KlMode::joint);
    out.kl_marginal_1d =
        marginal_kl(trace.samples, model, grid, KlMode::marginal_1d);
    out.acceptance_rate = trace.acceptance_rate();

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& x : trace.samples) {
      sum += x[0];
      sum_sq += x[0] * x[0];
    }
    const double count = static_cast<double>(trace.samples.size());
    out.x1_mean = sum / count;
    out.x1_var = sum_sq / count - out.x1_mean * out.x1_mean;

    out.perf = estimate_run_cycles(trace, cfg.perf);
    out.ok = true;
    if (trace_out) *trace_out = std::move(trace);
    if (grid_out) *grid_out = grid;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns = {
      "row", "replicate", "seed", "status", "arithmetic", "model_source", "d",
      "dimension", "mixtures", "model_seed", "proposal_kind", "step_scale",
      "total_samples", "burn_in", "refresh_period", "dac_bits", "adc_bits",
      "weight_bits", "operand_range", "rows", "noise_sigma_norm",
      "dac_ref_current_na", "clm_epsilon", "rng_bias", "frozen_mismatch",
      "ideal_gaussian_proposal", "lut_x_lo", "lut_entries", "lut_interp",
      "bins_per_dim", "grid_padding", "pseudo_count", "grid_bounds",
      "kl_joint", "kl_marginal_1d", "acceptance_rate", "x1_mean", "x1_var",
      "power_total_w", "frac_sram", "frac_dac", "frac_adc", "total_cycles",
      "wall_seconds", "samples_per_1000_cycles"};
  return columns;
}

std::vector<std::string> result_row(const ExperimentConfig& cfg, int row_index,
                                    int replicate, const PointResult& point) {
  std::string bounds = "auto";
  if (cfg.grid.explicit_bounds) {
    bounds.clear();
    for (Eigen::Index i = 0; i < cfg.grid.lower.size(); ++i) {
      if (i) bounds += '|';
      bounds += format_double(cfg.grid.lower[i]) + ';' +
                format_double(cfg.grid.upper[i]);
    }
  }
  const bool generator = cfg.model.source == ModelSpec::Source::generator;
  std::vector<std::string> row = {
      std::to_string(row_index),
      std::to_string(replicate),
      std::to_string(point.seed),
      point.ok ? "ok" : sanitize_message(point.error),
      cfg.chain.arithmetic == Arithmetic::hardware ? "hardware" : "exact",
      generator ? "generator" : "inline",
      generator ? format_double(cfg.model.d) : "nan",
      std::to_string(cfg.model.dimension),
      std::to_string(cfg.model.mixtures),
      std::to_string(cfg.model.model_seed),
      cfg.proposal.kind == ProposalKind::gaussian ? "gaussian" : "uniform",
      format_double(cfg.proposal.step_scale),
      std::to_string(cfg.chain.total_samples),
      std::to_string(cfg.chain.burn_in),
      std::to_string(cfg.chain.refresh_period),
      std::to_string(cfg.hardware.dac_bits),
      std::to_string(cfg.hardware.adc_bits),
      std::to_string(cfg.hardware.weight_bits),
      format_double(cfg.hardware.operand_range),
      std::to_string(cfg.hardware.rows),
      format_double(cfg.hardware.noise_sigma_norm),
      format_double(cfg.hardware.dac_ref_current_na),
      format_double(cfg.hardware.clm_epsilon),
      format_double(cfg.hardware.rng_bias),
      cfg.hardware.frozen_mismatch ? "1" : "0",
      cfg.hardware.ideal_gaussian_proposal ? "1" : "0",
      format_double(cfg.hardware.lut_x_lo),
      std::to_string(cfg.hardware.lut_entries),
      cfg.hardware.lut_interp == LutTable::Interp::linear ? "linear"
                                                          : "nearest",
      std::to_string(cfg.grid.bins_per_dim),
      format_double(cfg.grid.padding_sigmas),
      format_double(cfg.grid.pseudo_count),
      bounds,
      format_double(point.kl_joint),
      format_double(point.kl_marginal_1d),
      format_double(point.acceptance_rate),
      format_double(point.x1_mean),
      format_double(point.x1_var),
      format_double(point.perf.power_total_w),
      format_double(point.perf.frac_sram),
      format_double(point.perf.frac_dac),
      format_double(point.perf.frac_adc),
      std::to_string(point.perf.total_cycles),
      format_double(point.perf.wall_seconds),
      format_double(point.perf.samples_per_1000_cycles)};
  return row;
}

int emit_sweep_csv(const ExperimentConfig& cfg, const std::string& path) {
  CsvWriter writer(path);
  write_common_metadata(writer, cfg);
  writer.header(result_columns());

  std::vector<std::size_t> index(cfg.axes.size(), 0);
  int row_index = 0;
  bool done = false;
  while (!done) {
    ExperimentConfig resolved = cfg;
    for (std::size_t a = 0; a < cfg.axes.size(); ++a)
      apply_axis_value(resolved, cfg.axes[a].name, cfg.axes[a].values[index[a]]);

    for (int rep = 0; rep < cfg.replicates; ++rep) {
      const std::uint64_t seed =
          cfg.base_seed + static_cast<std::uint64_t>(row_index);
      const PointResult point = run_point(resolved, seed);
      writer.row(result_row(resolved, row_index, rep, point));
      ++row_index;
    }

    // odometer over axes, last axis fastest
    done = true;
    for (std::size_t a = cfg.axes.size(); a-- > 0;) {
      if (++index[a] < cfg.axes[a].values.size()) {
        done = false;
        break;
      }
      index[a] = 0;
    }
    if (cfg.axes.empty()) done = true;
  }
  return row_index;
}

PointResult emit_point_csv(const ExperimentConfig& cfg, std::uint64_t seed,
                           const std::string& path, bool emit_trace) {
  SampleTrace trace;
  GridSpec grid;
  const PointResult point = run_point(cfg, seed, &trace, &grid);

  CsvWriter writer(path);
  write_common_metadata(writer, cfg);
  writer.header(result_columns());
  writer.row(result_row(cfg, 0, 0, point));

  if (emit_trace && point.ok) {
    const std::string stem = stem_of(path);
    write_trace_csv(stem + "_trace.csv", trace, cfg);
    write_grid_csv(stem + "_grid.csv", build_model(cfg.model), grid, cfg);
  }
  return point;
}

void write_trace_csv(const std::string& path, const SampleTrace& trace,
                     const ExperimentConfig& cfg) {
  CsvWriter writer(path);
  write_common_metadata(writer, cfg);
  writer.metadata("seed", std::to_string(trace.seed));

  const Eigen::Index dim =
      trace.iterations.empty() ? 0 : trace.iterations.front().candidate.size();
  std::vector<std::string> columns = {"t"};
  for (Eigen::Index i = 0; i < dim; ++i)
    columns.push_back("x" + std::to_string(i));
  columns.insert(columns.end(), {"log_f", "u", "accepted", "refreshed"});
  writer.header(columns);

  std::vector<std::string> row;
  for (const auto& rec : trace.iterations) {
    row.clear();
    row.push_back(std::to_string(rec.t));
    for (Eigen::Index i = 0; i < dim; ++i)
      row.push_back(format_double(rec.candidate[i]));
    row.push_back(format_double(rec.log_f_cand));
    row.push_back(format_double(rec.u));
    row.push_back(rec.accepted ? "1" : "0");
    row.push_back(rec.refreshed ? "1" : "0");
    writer.row(row);
  }
}

void write_grid_csv(const std::string& path, const GmmModel& model,
                    const GridSpec& grid, const ExperimentConfig& cfg) {
  CsvWriter writer(path);
  write_common_metadata(writer, cfg);

  const auto dim = grid.dimension();
  std::vector<std::string> columns;
  for (Eigen::Index i = 0; i < dim; ++i)
    columns.push_back("center" + std::to_string(i));
  columns.push_back("probability");
  writer.header(columns);

  const DiscreteDistribution truth = ground_truth_distribution(model, grid);
  const Eigen::VectorXd widths =
      (grid.upper - grid.lower).array() / grid.bins.cast<double>().array();

  Eigen::VectorXi index = Eigen::VectorXi::Zero(dim);
  std::vector<std::string> row;
  for (Eigen::Index flat = 0; flat < truth.probs.size(); ++flat) {
    row.clear();
    for (Eigen::Index i = 0; i < dim; ++i)
      row.push_back(
          format_double(grid.lower[i] + (index[i] + 0.5) * widths[i]));
    row.push_back(format_double(truth.probs[flat]));
    writer.row(row);
    for (Eigen::Index i = dim - 1; i >= 0; --i) {
      if (++index[i] < grid.bins[i]) break;
      index[i] = 0;
    }
  }
}

}  // namespace cims
