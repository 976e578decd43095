#include "cims/sampler.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace cims {

ChainState ChainState::at(const Eigen::VectorXd& x0, const GmmModel& model,
                          const LutTable* lut) {
  if (x0.size() != model.dimension())
    throw std::invalid_argument("chain state: dimension mismatch");
  ChainState state;
  state.t = 0;
  state.x = x0;
  state.deviations = (-model.means).colwise() + x0;
  state.exponents.resize(model.num_mixtures());
  for (Eigen::Index j = 0; j < model.num_mixtures(); ++j)
    state.exponents[j] = exponent_direct(x0, model, j);
  state.log_f = combine_log_density(state.exponents, model, lut);
  return state;
}

double SampleTrace::acceptance_rate() const {
  if (iterations.empty()) return 0.0;
  std::int64_t accepted = 0;
  for (const auto& rec : iterations) accepted += rec.accepted ? 1 : 0;
  return static_cast<double>(accepted) /
         static_cast<double>(iterations.size());
}

namespace {

double draw_coordinate(const ProposalConfig& cfg, RandomSource& rng) {
  if (!(cfg.step_scale > 0.0))
    throw std::invalid_argument("proposal: step_scale must be > 0");
  if (cfg.kind == ProposalKind::gaussian)
    return cfg.step_scale * rng.gaussian();
  return cfg.step_scale * (2.0 * rng.uniform() - 1.0);
}

double draw_coordinate_hw(const ProposalConfig& cfg, const HardwareConfig& hw,
                          RandomSource& rng) {
  if (!(cfg.step_scale > 0.0))
    throw std::invalid_argument("proposal: step_scale must be > 0");
  if (cfg.kind == ProposalKind::gaussian) {
    const double g = hw.ideal_gaussian_proposal ? rng.gaussian()
                                                : trng_gaussian(rng, hw);
    return cfg.step_scale * g;
  }
  return cfg.step_scale * (2.0 * trng_uniform(rng, hw) - 1.0);
}

}  // namespace

Eigen::VectorXd propose(const ChainState& state, const ProposalConfig& cfg,
                        RandomSource& rng) {
  Eigen::VectorXd r(state.x.size());
  for (Eigen::Index i = 0; i < r.size(); ++i)
    r[i] = draw_coordinate(cfg, rng);
  return r;
}

Eigen::VectorXd propose_hw(const ChainState& state, const ProposalConfig& cfg,
                           const HardwareConfig& hw, RandomSource& rng) {
  Eigen::VectorXd raw(state.x.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i)
    raw[i] = draw_coordinate_hw(cfg, hw, rng);
  return quantize_dac(raw, hw).values();
}

Eigen::VectorXd incremental_exponents(
    const ChainState& state, const Eigen::Ref<const Eigen::VectorXd>& r,
    const GmmModel& model, DotProductEngine& dp) {
  const auto n = model.dimension();
  const auto m = model.num_mixtures();
  if (r.size() != n)
    throw std::invalid_argument("incremental_exponents: dimension mismatch");
  if (state.exponents.size() != m || state.deviations.cols() != m)
    throw std::invalid_argument("incremental_exponents: stale chain state");

  Eigen::VectorXd result(m);
  Eigen::VectorXd rr_terms(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd scaled =
        r.array() / model.stddevs.col(j).array().square();

    // Reuse the R.(R/s^2) read for mixtures sharing a sigma column.
    Eigen::Index shared = -1;
    for (Eigen::Index k = 0; k < j; ++k) {
      if ((model.stddevs.col(k).array() == model.stddevs.col(j).array())
              .all()) {
        shared = k;
        break;
      }
    }
    const double rr = shared >= 0
                          ? rr_terms[shared]
                          : dp.dot(scaled, r, static_cast<int>(2 * j));
    rr_terms[j] = rr;

    const double rd =
        dp.dot(scaled, state.deviations.col(j), static_cast<int>(2 * j + 1));
    result[j] = std::max(0.0, state.exponents[j] + rr + 2.0 * rd);
  }
  return result;
}

bool mh_accept(double log_f_cand, double log_f_prev, double u) {
  if (std::isnan(log_f_cand) || std::isnan(log_f_prev))
    throw std::domain_error("mh_accept: NaN log-density");
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("mh_accept: u outside (0, 1)");
  return (log_f_cand - log_f_prev) > std::log(u);
}

IterationRecord step(ChainState& state, const StepContext& ctx) {
  const Eigen::VectorXd r =
      ctx.hardware ? propose_hw(state, ctx.proposal, *ctx.hardware, ctx.rng)
                   : propose(state, ctx.proposal, ctx.rng);
  const Eigen::VectorXd candidate = state.x + r;
  const Eigen::VectorXd exponents_cand =
      incremental_exponents(state, r, ctx.model, ctx.dp);
  const double log_f_cand =
      combine_log_density(exponents_cand, ctx.model, ctx.lut);
  const double u = ctx.hardware ? trng_uniform(ctx.rng, *ctx.hardware)
                                : ctx.rng.uniform();
  const bool accepted = mh_accept(log_f_cand, state.log_f, u);

  state.t += 1;
  if (accepted) {
    state.x = candidate;
    state.deviations.colwise() += r;
    state.exponents = exponents_cand;
    state.log_f = log_f_cand;
  }

  IterationRecord rec;
  rec.t = state.t;
  rec.candidate = candidate;
  rec.log_f_cand = log_f_cand;
  rec.u = u;
  rec.accepted = accepted;
  return rec;
}

void refresh_exact(ChainState& state, const GmmModel& model) {
  state.deviations = (-model.means).colwise() + state.x;
  for (Eigen::Index j = 0; j < model.num_mixtures(); ++j)
    state.exponents[j] = exponent_direct(state.x, model, j);
  state.log_f = combine_log_density(state.exponents, model);
}

SampleTrace run_chain(const GmmModel& model, const ChainConfig& chain,
                      const ProposalConfig& proposal,
                      const HardwareConfig& hw) {
  if (chain.total_samples < 1)
    throw std::invalid_argument("chain: total_samples must be >= 1");
  if (chain.burn_in < 0)
    throw std::invalid_argument("chain: burn_in must be >= 0");
  if (chain.refresh_period < 0)
    throw std::invalid_argument("chain: refresh_period must be >= 0");

  const bool hw_mode = chain.arithmetic == Arithmetic::hardware;
  RandomSource rng(chain.seed);

  LutTable lut;
  const LutTable* lut_ptr = nullptr;
  std::unique_ptr<DotProductEngine> dp;
  if (hw_mode) {
    lut = LutTable::make(hw.lut_x_lo, hw.lut_entries, hw.lut_interp);
    lut_ptr = &lut;
    dp = std::make_unique<InSramDotProduct>(hw, model.dimension(), rng);
  } else {
    dp = std::make_unique<ExactDotProduct>();
  }

  ChainState state = ChainState::at(Eigen::VectorXd::Zero(model.dimension()),
                                    model, lut_ptr);

  SampleTrace trace;
  trace.seed = chain.seed;
  const std::int64_t total = chain.burn_in + chain.total_samples;
  trace.iterations.reserve(total);
  trace.samples.reserve(chain.total_samples);

  const StepContext ctx{model,   proposal, hw_mode ? &hw : nullptr,
                        lut_ptr, *dp,      rng};
  for (std::int64_t i = 0; i < total; ++i) {
    IterationRecord rec = step(state, ctx);
    if (chain.refresh_period > 0 && state.t % chain.refresh_period == 0) {
      refresh_exact(state, model);
      rec.refreshed = true;
    }
    trace.iterations.push_back(std::move(rec));
    if (i >= chain.burn_in) trace.samples.push_back(state.x);
  }
  return trace;
}

}  // namespace cims
