#include <cmath>
#include <limits>
#include <vector>

#include "cims/hardware.hpp"
#include "doctest.h"

using cims::HardwareConfig;
using cims::QuantizedVector;

namespace {

HardwareConfig ideal_config(int rows) {
  HardwareConfig cfg;
  cfg.rows = rows;
  cfg.noise_sigma_norm = 0.0;
  cfg.clm_epsilon = 0.0;
  return cfg;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / xs.size();
}

double variance_of(const std::vector<double>& xs) {
  const double mu = mean_of(xs);
  double acc = 0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return acc / xs.size();
}

}  // namespace

TEST_CASE("quantize_dac") {
  HardwareConfig cfg = ideal_config(8);

  SUBCASE("zero stays on-grid") {
    const auto q = cims::quantize_dac(Eigen::VectorXd::Zero(4), cfg);
    CHECK((q.codes.array() == 0).all());
  }
  SUBCASE("full scale maps to the top code") {
    cfg.dac_bits = 8;
    const auto q = cims::quantize_dac(
        Eigen::VectorXd::Constant(1, cfg.operand_range), cfg);
    CHECK(q.codes[0] == 127);
  }
  SUBCASE("round half away from zero") {
    cfg.dac_bits = 8;
    cfg.operand_range = 1.0;
    Eigen::VectorXd v(2);
    v << 0.5, -0.5;
    const auto q = cims::quantize_dac(v, cfg);
    CHECK(q.codes[0] == 64);  // round(63.5)
    CHECK(q.codes[1] == -64);
    CHECK(q.values()[0] == doctest::Approx(64.0 / 127.0).epsilon(1e-12));
  }
  SUBCASE("out-of-range values clip") {
    Eigen::VectorXd v(1);
    v << 100.0;
    CHECK(cims::quantize_dac(v, cfg).codes[0] == 127);
  }
  SUBCASE("non-finite input throws") {
    Eigen::VectorXd v(1);
    v << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(cims::quantize_dac(v, cfg), std::invalid_argument);
  }
}

TEST_CASE("bit_slice and recombination") {
  SUBCASE("code 5 in four bits") {
    QuantizedVector w;
    w.codes = Eigen::VectorXi::Constant(1, 5);
    w.bits = 4;
    const auto planes = cims::bit_slice(w);
    REQUIRE(planes.size() == 4);
    CHECK(planes[0][0] == 1);
    CHECK(planes[1][0] == 0);
    CHECK(planes[2][0] == 1);
    CHECK(planes[3][0] == 0);
  }
  SUBCASE("zero gives all-zero planes") {
    QuantizedVector w;
    w.codes = Eigen::VectorXi::Zero(3);
    w.bits = 6;
    for (const auto& plane : cims::bit_slice(w))
      CHECK((plane.array() == 0).all());
  }
  SUBCASE("minus one is all ones in two's complement") {
    QuantizedVector w;
    w.codes = Eigen::VectorXi::Constant(1, -1);
    w.bits = 4;
    for (const auto& plane : cims::bit_slice(w)) CHECK(plane[0] == 1);
  }
  SUBCASE("recombination is the identity on every code, n <= 12") {
    for (int bits = 1; bits <= 12; ++bits) {
      const int lo = -(1 << (bits - 1));
      const int hi = (1 << (bits - 1)) - 1;
      QuantizedVector w;
      w.bits = bits;
      w.codes.resize(hi - lo + 1);
      for (int c = lo; c <= hi; ++c) w.codes[c - lo] = c;
      const auto recombined = cims::recombine_planes(cims::bit_slice(w));
      CHECK((recombined.array() == w.codes.array()).all());
    }
  }
}

TEST_CASE("column_accumulate") {
  cims::RandomSource rng(5);

  SUBCASE("masked sum") {
    HardwareConfig cfg = ideal_config(3);
    Eigen::VectorXi plane(3);
    plane << 1, 1, 0;
    Eigen::VectorXd dac(3);
    dac << 3, 4, 5;
    CHECK(cims::column_accumulate(plane, dac, rng, cfg) ==
          doctest::Approx(7.0));
  }
  SUBCASE("all-zero plane is exactly zero regardless of noise") {
    HardwareConfig cfg = ideal_config(3);
    cfg.noise_sigma_norm = 1.43;
    Eigen::VectorXd dac(3);
    dac << 3, 4, 5;
    CHECK(cims::column_accumulate(Eigen::VectorXi::Zero(3), dac, rng, cfg) ==
          0.0);
  }
  SUBCASE("noise statistics match the configured sigma") {
    HardwareConfig cfg = ideal_config(3);
    cfg.noise_sigma_norm = 0.3;
    Eigen::VectorXi plane(3);
    plane << 1, 0, 1;
    Eigen::VectorXd dac(3);
    dac << 2, 9, 4;  // ideal 6
    std::vector<double> outputs(10000);
    for (auto& out : outputs)
      out = cims::column_accumulate(plane, dac, rng, cfg);
    const double mean = mean_of(outputs);
    CHECK(std::abs(mean / 6.0 - 1.0) < 0.02);
    CHECK(std::abs(std::sqrt(variance_of(outputs)) / mean - 0.3) < 0.03);
  }
  SUBCASE("length mismatch throws") {
    HardwareConfig cfg = ideal_config(3);
    CHECK_THROWS_AS(cims::column_accumulate(Eigen::VectorXi::Zero(2),
                                            Eigen::VectorXd::Zero(3), rng, cfg),
                    std::invalid_argument);
  }
}

TEST_CASE("sample_column_noise") {
  cims::RandomSource rng(99);
  HardwareConfig cfg = ideal_config(4);

  SUBCASE("zero sigma is the identity") {
    cfg.noise_sigma_norm = 0.0;
    CHECK(cims::sample_column_noise(3.25, cfg, rng) == 3.25);
  }
  SUBCASE("unit mean at the reference calibration point") {
    // sigma_norm 1.43 corresponds to the 5 nA DAC reference current.
    cfg.noise_sigma_norm = 1.43;
    cfg.dac_ref_current_na = 5.0;
    double sum = 0;
    constexpr int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i)
      sum += cims::sample_column_noise(1.0, cfg, rng);
    CHECK(sum / kDraws == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("log of the multiplier is symmetric (log-normal shape)") {
    cfg.noise_sigma_norm = 0.5;
    constexpr int kDraws = 100000;
    std::vector<double> logs(kDraws);
    for (auto& value : logs)
      value = std::log(cims::sample_column_noise(1.0, cfg, rng));
    const double mu = mean_of(logs);
    const double sd = std::sqrt(variance_of(logs));
    double skew = 0;
    for (double value : logs) {
      const double z = (value - mu) / sd;
      skew += z * z * z;
    }
    skew /= kDraws;
    CHECK(std::abs(skew) < 0.05);
  }
}

TEST_CASE("apply_clm_gain") {
  HardwareConfig cfg = ideal_config(4);

  SUBCASE("disabled epsilon is the identity") {
    CHECK(cims::apply_clm_gain(2.5, cfg) == 2.5);
  }
  SUBCASE("zero signal stays zero") {
    cfg.clm_epsilon = 0.05;
    CHECK(cims::apply_clm_gain(0.0, cfg) == 0.0);
  }
  SUBCASE("full-scale signal gets the full gain") {
    cfg.clm_epsilon = 0.05;
    const double fs = cims::full_scale(cfg);
    CHECK(cims::apply_clm_gain(fs, cfg) == doctest::Approx(1.05 * fs));
  }
}

TEST_CASE("adc_convert") {
  HardwareConfig cfg = ideal_config(4);
  cfg.adc_bits = 6;

  SUBCASE("zero to code zero") { CHECK(cims::adc_convert(0.0, cfg) == 0); }
  SUBCASE("saturation at the rails") {
    const double fs = cims::full_scale(cfg);
    CHECK(cims::adc_convert(fs, cfg) == 31);
    CHECK(cims::adc_convert(2 * fs, cfg) == 31);
    CHECK(cims::adc_convert(-2 * fs, cfg) == -31);
  }
  SUBCASE("half scale rounds away from zero") {
    CHECK(cims::adc_convert(cims::full_scale(cfg) / 2, cfg) == 16);
  }
  SUBCASE("nondecreasing in the analog input") {
    cims::RandomSource rng(3);
    const double fs = cims::full_scale(cfg);
    for (int i = 0; i < 500; ++i) {
      const double a = fs * 2.4 * (2 * rng.uniform() - 1);
      const double b = a + fs * rng.uniform();
      CHECK(cims::adc_convert(a, cfg) <= cims::adc_convert(b, cfg));
    }
  }
  SUBCASE("non-finite input throws") {
    CHECK_THROWS_AS(
        cims::adc_convert(std::numeric_limits<double>::infinity(), cfg),
        std::invalid_argument);
  }
}

TEST_CASE("dot_product_hw") {
  cims::RandomSource rng(21);

  SUBCASE("zero operand gives zero") {
    HardwareConfig cfg = ideal_config(0);
    cfg.noise_sigma_norm = 1.43;
    Eigen::VectorXd w(3);
    w << 1, 2, 3;
    CHECK(cims::dot_product_hw(Eigen::VectorXd::Zero(3), w, cfg, rng) == 0.0);
  }
  SUBCASE("integer operands at wide formats") {
    // Range 127/16 makes integers exactly representable at 8 bits.
    HardwareConfig cfg = ideal_config(0);
    cfg.operand_range = 127.0 / 16.0;
    cfg.dac_bits = 8;
    cfg.weight_bits = 8;
    cfg.adc_bits = 12;
    Eigen::VectorXd v(3), w(3);
    v << 1, 2, 3;
    w << 4, 5, 6;
    cfg.rows = 3;
    const double lsb = cims::adc_lsb_equivalent(cfg);
    CHECK(std::abs(cims::dot_product_hw(v, w, cfg, rng) - 32.0) <= lsb);
  }
  SUBCASE("converges to the quantized-operand dot as adc widens") {
    HardwareConfig cfg = ideal_config(0);
    cfg.adc_bits = 28;
    cfg.dac_bits = 12;
    cfg.weight_bits = 12;
    cims::RandomSource gen(77);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd v(4), w(4);
      for (int i = 0; i < 4; ++i) {
        v[i] = cfg.operand_range * (2 * gen.uniform() - 1);
        w[i] = cfg.operand_range * (2 * gen.uniform() - 1);
      }
      const double expected =
          cims::quantize_signed(v, cfg.dac_bits, cfg.operand_range)
              .values()
              .dot(cims::quantize_signed(w, cfg.weight_bits, cfg.operand_range)
                       .values());
      CHECK(std::abs(cims::dot_product_hw(v, w, cfg, rng) - expected) < 1e-6);
    }
  }
  SUBCASE("dimension mismatch throws") {
    HardwareConfig cfg = ideal_config(0);
    CHECK_THROWS_AS(cims::dot_product_hw(Eigen::VectorXd::Zero(2),
                                         Eigen::VectorXd::Zero(3), cfg, rng),
                    std::invalid_argument);
  }
  SUBCASE("operand longer than the column throws") {
    HardwareConfig cfg = ideal_config(2);
    CHECK_THROWS_AS(cims::dot_product_hw(Eigen::VectorXd::Zero(3),
                                         Eigen::VectorXd::Zero(3), cfg, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("trng_uniform") {
  HardwareConfig cfg = ideal_config(2);
  cfg.dac_bits = 8;

  SUBCASE("unbiased mean") {
    cims::RandomSource rng(31);
    double sum = 0;
    constexpr int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i) sum += cims::trng_uniform(rng, cfg);
    CHECK(sum / kDraws == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("all-zero bits give the half-lsb floor") {
    cims::RandomSource rng(1);
    cfg.rng_bias = 0.0;  // bernoulli(0) never fires: the all-zero stub
    CHECK(cims::trng_uniform(rng, cfg) == doctest::Approx(0.5 / 256.0));
  }
  SUBCASE("per-position bit bias follows the knob") {
    cims::RandomSource rng(37);
    cfg.rng_bias = 0.7;
    constexpr int kDraws = 100000;
    Eigen::VectorXd position_sums = Eigen::VectorXd::Zero(cfg.dac_bits);
    for (int i = 0; i < kDraws; ++i) {
      const double u = cims::trng_uniform(rng, cfg);
      const auto word =
          static_cast<std::uint64_t>(u * 256.0);  // (word + 0.5) / 256
      for (int b = 0; b < cfg.dac_bits; ++b)
        position_sums[b] += (word >> b) & 1u;
    }
    for (int b = 0; b < cfg.dac_bits; ++b)
      CHECK(position_sums[b] / kDraws == doctest::Approx(0.7).epsilon(0.015));
  }
  SUBCASE("always interior to (0, 1)") {
    cims::RandomSource rng(41);
    for (int i = 0; i < 1000; ++i) {
      const double u = cims::trng_uniform(rng, cfg);
      CHECK(u > 0.0);
      CHECK(u < 1.0);
    }
  }
}

TEST_CASE("trng_gaussian") {
  HardwareConfig cfg = ideal_config(2);
  cfg.dac_bits = 8;

  SUBCASE("moments of the Irwin-Hall construction") {
    cims::RandomSource rng(43);
    constexpr int kDraws = 100000;
    std::vector<double> draws(kDraws);
    for (auto& draw : draws) draw = cims::trng_gaussian(rng, cfg);
    CHECK(std::abs(mean_of(draws)) < 0.02);
    const double var = variance_of(draws);
    CHECK(var > 0.97);
    CHECK(var < 1.03);
  }
  SUBCASE("support bounded in [-6, 6]") {
    cims::RandomSource rng(47);
    for (int i = 0; i < 10000; ++i) {
      const double g = cims::trng_gaussian(rng, cfg);
      CHECK(g >= -6.0);
      CHECK(g <= 6.0);
    }
  }
  SUBCASE("all-zero bits land at the lower edge") {
    cims::RandomSource rng(1);
    cfg.rng_bias = 0.0;
    CHECK(cims::trng_gaussian(rng, cfg) ==
          doctest::Approx(12 * (0.5 / 256.0) - 6.0));
  }
}

TEST_CASE("in-memory engine") {
  SUBCASE("matches the free pipeline with noise off") {
    HardwareConfig cfg = ideal_config(0);
    cims::RandomSource rng(51);
    cims::InSramDotProduct engine(cfg, 3, rng);
    Eigen::VectorXd v(3), w(3);
    v << 0.5, -1.25, 2.0;
    w << 1.5, 0.75, -2.5;
    cims::RandomSource rng2(51);
    HardwareConfig resolved = cfg;
    resolved.rows = 3;
    CHECK(engine.dot(v, w, 0) ==
          cims::dot_product_hw(v, w, resolved, rng2));
  }
  SUBCASE("frozen mismatch reuses per-column multipliers") {
    HardwareConfig cfg = ideal_config(0);
    cfg.noise_sigma_norm = 0.4;
    cfg.frozen_mismatch = true;
    cims::RandomSource rng(53);
    cims::InSramDotProduct engine(cfg, 2, rng);
    Eigen::VectorXd v(2), w(2);
    v << 1.0, -0.5;
    w << 0.25, 1.75;
    const double first = engine.dot(v, w, 3);
    const double second = engine.dot(v, w, 3);
    CHECK(first == second);  // static multipliers, not temporal draws
    // temporal mode would differ between repeated reads
    cfg.frozen_mismatch = false;
    cims::RandomSource rng2(53);
    cims::InSramDotProduct temporal(cfg, 2, rng2);
    CHECK(temporal.dot(v, w, 3) != temporal.dot(v, w, 3));
  }
}
