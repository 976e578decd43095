#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cims/gmm.hpp"
#include "cims/random.hpp"

namespace cims {

// Behavioral knobs of the in-memory datapath: operand quantization, bit-sliced
// accumulation, column readout, and the on-chip bit source. Everything that
// distinguishes ideal from hardware-emulated arithmetic lives here.
struct HardwareConfig {
  int dac_bits = 8;
  int adc_bits = 6;
  int weight_bits = 8;         // bit-slice count for stored operands
  double operand_range = 4.0;  // clip bound for DAC operands (Vmax)
  int rows = 0;                // cells per column; 0 = match operand length
  double noise_sigma_norm = 0.0;  // std of multiplicative column noise / mean
  double dac_ref_current_na = 5.0;  // calibration axis: sigma_norm 1.43 at 5 nA
  double clm_epsilon = 0.0;         // signal-dependent gain error, 0 = off
  double rng_bias = 0.5;
  bool frozen_mismatch = false;  // static per-column multipliers drawn once
  bool ideal_gaussian_proposal = false;  // bypass the Irwin-Hall bit source

  // Table used for the log-domain mixture combine in hardware mode.
  double lut_x_lo = -16.0;
  int lut_entries = 256;
  LutTable::Interp lut_interp = LutTable::Interp::linear;
};

// rows as seen by a given operand length (0 = auto). Throws if the operand
// does not fit the column.
int resolve_rows(const HardwareConfig& cfg, Eigen::Index length);

// ADC input range: rows * max DAC value.
double full_scale(const HardwareConfig& cfg);

// Value of one ADC code, full_scale / (2^(adc_bits-1) - 1).
double adc_step(const HardwareConfig& cfg);

// One ADC code referred to the dot-product output through the heaviest
// recombination weight; the yardstick for datapath accuracy checks.
double adc_lsb_equivalent(const HardwareConfig& cfg);

struct QuantizedVector {
  Eigen::VectorXi codes;
  double scale = 1.0;
  int bits = 0;

  Eigen::VectorXd values() const { return codes.cast<double>() * scale; }
};

// Round-to-nearest onto a signed grid of `bits`, ties away from zero,
// components clipped to [-range, range]. scale = range / (2^(bits-1) - 1).
QuantizedVector quantize_signed(const Eigen::Ref<const Eigen::VectorXd>& v,
                                int bits, double range);

QuantizedVector quantize_dac(const Eigen::Ref<const Eigen::VectorXd>& v,
                             const HardwareConfig& cfg);

// Weight of bit plane k in an n-bit two's-complement slicing: +2^k for
// low planes, -2^(n-1) for the sign plane.
double plane_weight(int plane, int bits);

// Splits codes into `bits` binary planes, LSB first. Recombination with
// plane_weight reproduces every code exactly.
std::vector<Eigen::VectorXi> bit_slice(const QuantizedVector& w);

// Inverse of bit_slice; test oracle aid.
Eigen::VectorXi recombine_planes(const std::vector<Eigen::VectorXi>& planes);

// ideal * L with L log-normal, E[L] = 1, std(L) = noise_sigma_norm.
// Returns ideal unchanged when the noise knob is zero.
double sample_column_noise(double ideal, const HardwareConfig& cfg,
                           RandomSource& rng);

// ideal * (1 + clm_epsilon * ideal / full_scale); requires cfg.rows >= 1.
double apply_clm_gain(double ideal, const HardwareConfig& cfg);

// Masked sum of DAC values over the active cells of one plane, then CLM gain
// and multiplicative noise when enabled.
double column_accumulate(const Eigen::Ref<const Eigen::VectorXi>& plane,
                         const Eigen::Ref<const Eigen::VectorXd>& dac_values,
                         RandomSource& rng, const HardwareConfig& cfg);

// Maps [-full_scale, full_scale] onto signed adc_bits codes, round to
// nearest, saturating beyond the range; requires cfg.rows >= 1.
int adc_convert(double analog, const HardwareConfig& cfg);

// Full pipeline for v.w: DAC-quantize v, bit-slice w at weight_bits, per-plane
// column accumulate + ADC readout, digital recombination.
double dot_product_hw(const Eigen::Ref<const Eigen::VectorXd>& v,
                      const Eigen::Ref<const Eigen::VectorXd>& w,
                      const HardwareConfig& cfg, RandomSource& rng);

// Uniform draw assembled from dac_bits Bernoulli(rng_bias) bits:
// (word + 0.5) / 2^k, always inside (0, 1).
double trng_uniform(RandomSource& rng, const HardwareConfig& cfg);

// Irwin-Hall normal: sum of 12 trng_uniform draws minus 6.
double trng_gaussian(RandomSource& rng, const HardwareConfig& cfg);

// The sampler delegates its two scalar products per mixture through this
// interface. `slot` identifies the stored-operand column group, used only by
// the frozen-mismatch noise mode.
class DotProductEngine {
 public:
  virtual ~DotProductEngine() = default;
  virtual double dot(const Eigen::Ref<const Eigen::VectorXd>& v,
                     const Eigen::Ref<const Eigen::VectorXd>& w, int slot) = 0;
};

class ExactDotProduct final : public DotProductEngine {
 public:
  double dot(const Eigen::Ref<const Eigen::VectorXd>& v,
             const Eigen::Ref<const Eigen::VectorXd>& w, int slot) override;
};

class InSramDotProduct final : public DotProductEngine {
 public:
  InSramDotProduct(const HardwareConfig& cfg, Eigen::Index dimension,
                   RandomSource& rng);

  double dot(const Eigen::Ref<const Eigen::VectorXd>& v,
             const Eigen::Ref<const Eigen::VectorXd>& w, int slot) override;

 private:
  double frozen_multiplier(int slot, int plane);

  HardwareConfig cfg_;  // rows resolved at construction
  RandomSource* rng_;
  std::vector<std::vector<double>> frozen_;  // [slot][plane]
};

}  // namespace cims
