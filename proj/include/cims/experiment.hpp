#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cims/config_doc.hpp"
#include "cims/csv.hpp"
#include "cims/gmm.hpp"
#include "cims/hardware.hpp"
#include "cims/metrics.hpp"
#include "cims/perf.hpp"
#include "cims/sampler.hpp"

namespace cims {

inline constexpr const char* kToolVersion = "0.1.0";

struct ModelSpec {
  enum class Source { generator, inline_params };

  Source source = Source::generator;
  // generator family
  double d = 1.0;
  int dimension = 2;
  int mixtures = 2;
  std::uint64_t model_seed = 7;
  // inline parameters
  Eigen::VectorXd weights;
  Eigen::MatrixXd means;
  Eigen::MatrixXd stddevs;
};

struct GridConfig {
  int bins_per_dim = 30;
  double padding_sigmas = 4.0;
  double pseudo_count = 0.5;
  bool explicit_bounds = false;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct ExperimentConfig {
  ModelSpec model;
  ChainConfig chain;
  ProposalConfig proposal;
  HardwareConfig hardware;
  PerfConfig perf;
  GridConfig grid;
  std::vector<SweepAxis> axes;
  int replicates = 1;
  std::uint64_t base_seed = 1;
  std::string output_path = "results.csv";
  std::string config_hash = "none";
};

// Two-mixture family: mu_1 = d * (+1, -1, +1, ...), mu_2 = -mu_1, unit
// sigmas, equal weights; requires d > 0. Other mixture counts get evenly
// weighted means drawn uniformly in [-|d|, |d|]^N from model_seed.
GmmModel generate_model(double d, int dimension, int mixtures,
                        std::uint64_t model_seed = 7);

GmmModel build_model(const ModelSpec& spec);

GridSpec resolve_grid(const GridConfig& grid, const GmmModel& model);

// Axis names accepted in [sweep] entries; anything else is a config error.
const std::vector<std::string>& sweep_axis_names();
void apply_axis_value(ExperimentConfig& cfg, const std::string& name,
                      double value);

// Parses and validates a configuration document; throws ConfigError with a
// descriptive message on any unknown section/key or malformed value.
ExperimentConfig load_experiment_config(const ConfigDoc& doc);

struct PointResult {
  bool ok = false;
  std::string error;
  std::uint64_t seed = 0;
  double kl_joint = 0.0;        // NaN when dimension > 3
  double kl_marginal_1d = 0.0;
  double acceptance_rate = 0.0;
  double x1_mean = 0.0;
  double x1_var = 0.0;
  PerfReport perf;
};

// One resolved sweep point: build model, run the chain, score it.
// Failures are captured in the result rather than thrown.
PointResult run_point(const ExperimentConfig& cfg, std::uint64_t seed,
                      SampleTrace* trace_out = nullptr,
                      GridSpec* grid_out = nullptr);

const std::vector<std::string>& result_columns();
std::vector<std::string> result_row(const ExperimentConfig& cfg, int row_index,
                                    int replicate, const PointResult& point);

// Cartesian product of sweep axes x replicates, seeds base_seed + row index,
// rows streamed to the file as they finish. Returns the row count.
int emit_sweep_csv(const ExperimentConfig& cfg, const std::string& path);

// Single point at the given seed. With emit_trace, also writes
// <stem>_trace.csv (per-iteration log) and <stem>_grid.csv (ground-truth
// grid densities) next to the results file.
PointResult emit_point_csv(const ExperimentConfig& cfg, std::uint64_t seed,
                           const std::string& path, bool emit_trace);

void write_trace_csv(const std::string& path, const SampleTrace& trace,
                     const ExperimentConfig& cfg);
void write_grid_csv(const std::string& path, const GmmModel& model,
                    const GridSpec& grid, const ExperimentConfig& cfg);

}  // namespace cims
