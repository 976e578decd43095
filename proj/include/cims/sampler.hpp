#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cims/gmm.hpp"
#include "cims/hardware.hpp"
#include "cims/random.hpp"

namespace cims {

enum class ProposalKind { gaussian, uniform };
enum class Arithmetic { exact, hardware };

struct ProposalConfig {
  ProposalKind kind = ProposalKind::gaussian;
  double step_scale = 0.5;  // std-dev per coordinate (gaussian), half-width (uniform)
};

struct ChainConfig {
  std::int64_t total_samples = 500;
  std::int64_t burn_in = 50;
  std::uint64_t seed = 1;
  std::int64_t refresh_period = 0;  // 0 = never re-derive exponents exactly
  Arithmetic arithmetic = Arithmetic::exact;
};

// The Markov-chain memory: current sample plus the cached per-mixture
// exponents and deviation vectors the incremental update runs on.
struct ChainState {
  std::int64_t t = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd exponents;   // E_j at x
  Eigen::MatrixXd deviations;  // N x M, column j = x - mu_j
  double log_f = 0.0;

  // Exact-arithmetic initialization at x0; the cached log-density uses the
  // given table when non-null so it matches the mode the chain runs in.
  static ChainState at(const Eigen::VectorXd& x0, const GmmModel& model,
                       const LutTable* lut = nullptr);
};

struct IterationRecord {
  std::int64_t t = 0;
  Eigen::VectorXd candidate;
  double log_f_cand = 0.0;
  double u = 0.0;
  bool accepted = false;
  bool refreshed = false;
};

struct SampleTrace {
  std::vector<Eigen::VectorXd> samples;  // post-burn-in snapshots, rejections repeat
  std::vector<IterationRecord> iterations;  // full run including burn-in
  std::uint64_t seed = 0;

  double acceptance_rate() const;
};

// Zero-centered i.i.d. displacement R; candidate = x + R.
Eigen::VectorXd propose(const ChainState& state, const ProposalConfig& cfg,
                        RandomSource& rng);

// Hardware-mode displacement: coordinates come from the on-chip bit source
// (unless the ideal-gaussian ablation switch is set) and are snapped to the
// DAC operand grid — the generated word in the operand buffer is both the
// displacement applied to the sample register and the value the DAC converts.
Eigen::VectorXd propose_hw(const ChainState& state, const ProposalConfig& cfg,
                           const HardwareConfig& hw, RandomSource& rng);

// E_j(t) = E_j(t-1) + (R/s_j^2).R + 2 (R/s_j^2).(x - mu_j) per mixture,
// clamped below at zero. The R.(R/s_j^2) product is evaluated once per
// distinct sigma column (one column-group read serves all matching mixtures).
Eigen::VectorXd incremental_exponents(
    const ChainState& state, const Eigen::Ref<const Eigen::VectorXd>& r,
    const GmmModel& model, DotProductEngine& dp);

// (log_f_cand - log_f_prev) > ln u; throws on NaN log-densities.
bool mh_accept(double log_f_cand, double log_f_prev, double u);

struct StepContext {
  const GmmModel& model;
  const ProposalConfig& proposal;
  const HardwareConfig* hardware = nullptr;  // null in exact mode
  const LutTable* lut = nullptr;             // null in exact mode
  DotProductEngine& dp;
  RandomSource& rng;
};

// One propose / update / combine / accept round; mutates the state and
// returns the iteration record.
IterationRecord step(ChainState& state, const StepContext& ctx);

// Re-derives exponents, deviations, and log-density from the model in exact
// arithmetic at the current x.
void refresh_exact(ChainState& state, const GmmModel& model);

// Runs burn_in + total_samples steps from x0 = 0; bit-identical across runs
// with equal seeds.
SampleTrace run_chain(const GmmModel& model, const ChainConfig& chain,
                      const ProposalConfig& proposal,
                      const HardwareConfig& hw = HardwareConfig{});

}  // namespace cims
