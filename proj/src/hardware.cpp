#include "cims/hardware.hpp"

#include <cmath>
#include <stdexcept>

namespace cims {

namespace {

int max_code(int bits) { return std::max((1 << (bits - 1)) - 1, 1); }

void check_bits(int bits, const char* what) {
  if (bits < 1 || bits > 30)
    throw std::invalid_argument(std::string(what) + ": bits out of range");
}

// Shared pipeline; the noise hook receives (plane index, post-CLM analog).
template <class NoiseFn>
double dot_product_pipeline(const Eigen::Ref<const Eigen::VectorXd>& v,
                            const Eigen::Ref<const Eigen::VectorXd>& w,
                            const HardwareConfig& cfg, NoiseFn&& noise) {
  if (v.size() != w.size())
    throw std::invalid_argument("dot_product_hw: dimension mismatch");
  if (v.size() > cfg.rows)
    throw std::invalid_argument("dot_product_hw: operand longer than column");
  if (!v.allFinite() || !w.allFinite())
    throw std::invalid_argument("dot_product_hw: non-finite input");

  const QuantizedVector qv = quantize_dac(v, cfg);
  const Eigen::VectorXd dac_values = qv.values();
  const QuantizedVector qw =
      quantize_signed(w, cfg.weight_bits, cfg.operand_range);
  const std::vector<Eigen::VectorXi> planes = bit_slice(qw);

  const double step = adc_step(cfg);
  double acc = 0.0;
  for (int k = 0; k < cfg.weight_bits; ++k) {
    const double ideal =
        (planes[k].cast<double>().array() * dac_values.array()).sum();
    const double analog = noise(k, apply_clm_gain(ideal, cfg));
    acc += plane_weight(k, cfg.weight_bits) * (adc_convert(analog, cfg) * step);
  }
  return acc * qw.scale;
}

}  // namespace

int resolve_rows(const HardwareConfig& cfg, Eigen::Index length) {
  const int rows = cfg.rows == 0 ? static_cast<int>(length) : cfg.rows;
  if (rows < 1) throw std::invalid_argument("hardware: rows must be >= 1");
  if (length > rows)
    throw std::invalid_argument("hardware: operand longer than column");
  return rows;
}

double full_scale(const HardwareConfig& cfg) {
  if (cfg.rows < 1) throw std::invalid_argument("hardware: rows must be >= 1");
  if (!(cfg.operand_range > 0.0))
    throw std::invalid_argument("hardware: operand_range must be > 0");
  return cfg.rows * cfg.operand_range;
}

double adc_step(const HardwareConfig& cfg) {
  check_bits(cfg.adc_bits, "adc");
  return full_scale(cfg) / max_code(cfg.adc_bits);
}

double adc_lsb_equivalent(const HardwareConfig& cfg) {
  check_bits(cfg.weight_bits, "weight");
  const double weight_scale = cfg.operand_range / max_code(cfg.weight_bits);
  return adc_step(cfg) * weight_scale * std::ldexp(1.0, cfg.weight_bits - 1);
}

QuantizedVector quantize_signed(const Eigen::Ref<const Eigen::VectorXd>& v,
                                int bits, double range) {
  check_bits(bits, "quantize");
  if (!(range > 0.0))
    throw std::invalid_argument("quantize: range must be > 0");
  if (!v.allFinite())
    throw std::invalid_argument("quantize: non-finite component");

  QuantizedVector q;
  q.bits = bits;
  const int hi = max_code(bits);
  q.scale = range / hi;
  q.codes.resize(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double clipped = std::clamp(v[i], -range, range);
    const auto code = static_cast<int>(std::round(clipped / q.scale));
    q.codes[i] = std::clamp(code, -hi, hi);
  }
  return q;
}

QuantizedVector quantize_dac(const Eigen::Ref<const Eigen::VectorXd>& v,
                             const HardwareConfig& cfg) {
  return quantize_signed(v, cfg.dac_bits, cfg.operand_range);
}

double plane_weight(int plane, int bits) {
  if (plane < 0 || plane >= bits)
    throw std::invalid_argument("plane_weight: plane out of range");
  const double w = std::ldexp(1.0, plane);
  return plane == bits - 1 ? -w : w;
}

std::vector<Eigen::VectorXi> bit_slice(const QuantizedVector& w) {
  check_bits(w.bits, "bit_slice");
  const int lo = -(1 << (w.bits - 1));
  const int hi = (1 << (w.bits - 1)) - 1;
  if ((w.codes.array() < lo).any() || (w.codes.array() > hi).any())
    throw std::invalid_argument("bit_slice: code outside stated bit width");

  const std::uint32_t mask = (1u << w.bits) - 1u;
  std::vector<Eigen::VectorXi> planes(
      w.bits, Eigen::VectorXi::Zero(w.codes.size()));
  for (Eigen::Index i = 0; i < w.codes.size(); ++i) {
    const std::uint32_t twos = static_cast<std::uint32_t>(w.codes[i]) & mask;
    for (int k = 0; k < w.bits; ++k) planes[k][i] = (twos >> k) & 1u;
  }
  return planes;
}

Eigen::VectorXi recombine_planes(const std::vector<Eigen::VectorXi>& planes) {
  if (planes.empty()) throw std::invalid_argument("recombine: no planes");
  const int bits = static_cast<int>(planes.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(planes[0].size());
  for (int k = 0; k < bits; ++k)
    acc += plane_weight(k, bits) * planes[k].cast<double>();
  return acc.cast<int>();
}

double sample_column_noise(double ideal, const HardwareConfig& cfg,
                           RandomSource& rng) {
  if (cfg.noise_sigma_norm < 0.0)
    throw std::invalid_argument("noise_sigma_norm must be >= 0");
  if (cfg.noise_sigma_norm == 0.0) return ideal;
  const double var = cfg.noise_sigma_norm * cfg.noise_sigma_norm;
  const double sigma_ln = std::sqrt(std::log1p(var));
  const double mu_ln = -0.5 * std::log1p(var);
  return ideal * std::exp(mu_ln + sigma_ln * rng.gaussian());
}

double apply_clm_gain(double ideal, const HardwareConfig& cfg) {
  if (cfg.clm_epsilon == 0.0) return ideal;
  return ideal * (1.0 + cfg.clm_epsilon * ideal / full_scale(cfg));
}

double column_accumulate(const Eigen::Ref<const Eigen::VectorXi>& plane,
                         const Eigen::Ref<const Eigen::VectorXd>& dac_values,
                         RandomSource& rng, const HardwareConfig& cfg) {
  if (plane.size() != dac_values.size())
    throw std::invalid_argument("column_accumulate: length mismatch");
  if (cfg.rows >= 1 && plane.size() > cfg.rows)
    throw std::invalid_argument("column_accumulate: operand longer than column");
  const double ideal =
      (plane.cast<double>().array() * dac_values.array()).sum();
  return sample_column_noise(apply_clm_gain(ideal, cfg), cfg, rng);
}

int adc_convert(double analog, const HardwareConfig& cfg) {
  if (!std::isfinite(analog))
    throw std::invalid_argument("adc_convert: non-finite input");
  const int hi = max_code(cfg.adc_bits);
  const auto code = static_cast<long>(std::round(analog / adc_step(cfg)));
  return static_cast<int>(std::clamp<long>(code, -hi, hi));
}

double dot_product_hw(const Eigen::Ref<const Eigen::VectorXd>& v,
                      const Eigen::Ref<const Eigen::VectorXd>& w,
                      const HardwareConfig& cfg, RandomSource& rng) {
  HardwareConfig resolved = cfg;
  resolved.rows = resolve_rows(cfg, v.size());
  return dot_product_pipeline(v, w, resolved, [&](int, double analog) {
    return sample_column_noise(analog, resolved, rng);
  });
}

double trng_uniform(RandomSource& rng, const HardwareConfig& cfg) {
  check_bits(cfg.dac_bits, "trng");
  std::uint64_t word = 0;
  for (int i = 0; i < cfg.dac_bits; ++i)
    if (rng.bernoulli(cfg.rng_bias)) word |= std::uint64_t{1} << i;
  return (static_cast<double>(word) + 0.5) * std::ldexp(1.0, -cfg.dac_bits);
}

double trng_gaussian(RandomSource& rng, const HardwareConfig& cfg) {
  double sum = 0.0;
  for (int i = 0; i < 12; ++i) sum += trng_uniform(rng, cfg);
  return sum - 6.0;
}

double ExactDotProduct::dot(const Eigen::Ref<const Eigen::VectorXd>& v,
                            const Eigen::Ref<const Eigen::VectorXd>& w,
                            int /*slot*/) {
  if (v.size() != w.size())
    throw std::invalid_argument("dot: dimension mismatch");
  return v.dot(w);
}

InSramDotProduct::InSramDotProduct(const HardwareConfig& cfg,
                                   Eigen::Index dimension, RandomSource& rng)
    : cfg_(cfg), rng_(&rng) {
  cfg_.rows = resolve_rows(cfg, dimension);
}

double InSramDotProduct::frozen_multiplier(int slot, int plane) {
  if (slot < 0) throw std::invalid_argument("dot: negative slot");
  if (frozen_.size() <= static_cast<std::size_t>(slot))
    frozen_.resize(slot + 1);
  auto& column = frozen_[static_cast<std::size_t>(slot)];
  while (column.size() <= static_cast<std::size_t>(plane))
    column.push_back(
        sample_column_noise(1.0, cfg_, *rng_));  // drawn once, first use
  return column[static_cast<std::size_t>(plane)];
}

double InSramDotProduct::dot(const Eigen::Ref<const Eigen::VectorXd>& v,
                             const Eigen::Ref<const Eigen::VectorXd>& w,
                             int slot) {
  if (cfg_.frozen_mismatch) {
    return dot_product_pipeline(v, w, cfg_, [&](int plane, double analog) {
      return analog * frozen_multiplier(slot, plane);
    });
  }
  return dot_product_pipeline(v, w, cfg_, [&](int, double analog) {
    return sample_column_noise(analog, cfg_, *rng_);
  });
}

}  // namespace cims
