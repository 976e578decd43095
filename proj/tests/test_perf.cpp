#include <cmath>

#include "cims/perf.hpp"
#include "doctest.h"

using cims::PerfConfig;
using cims::PerfReport;

namespace {

cims::SampleTrace trace_of(int iterations, int samples) {
  cims::SampleTrace trace;
  trace.iterations.resize(iterations);
  trace.samples.resize(samples, Eigen::VectorXd::Zero(2));
  return trace;
}

}  // namespace

TEST_CASE("estimate_iteration_power") {
  SUBCASE("calibrated defaults reproduce the reference figures") {
    const PerfReport report = cims::estimate_iteration_power(PerfConfig{});
    CHECK(report.power_total_w == doctest::Approx(91e-6).epsilon(0.01));
    CHECK(std::abs(report.frac_sram - 0.05) < 0.005);
    CHECK(std::abs(report.frac_dac - 0.13) < 0.005);
    CHECK(std::abs(report.frac_adc - 0.82) < 0.005);
  }
  SUBCASE("equal energies split evenly") {
    PerfConfig cfg;
    cfg.sram_energy_j = cfg.dac_energy_j = cfg.adc_energy_j = 1e-14;
    cfg.adc_conversions_per_iteration = 1;
    const PerfReport report = cims::estimate_iteration_power(cfg);
    CHECK(report.frac_sram == doctest::Approx(1.0 / 3));
    CHECK(report.frac_dac == doctest::Approx(1.0 / 3));
    CHECK(report.frac_adc == doctest::Approx(1.0 / 3));
  }
  SUBCASE("power is linear in the energy vector, fractions are scale-free") {
    PerfConfig cfg;
    const PerfReport base = cims::estimate_iteration_power(cfg);
    cfg.sram_energy_j *= 2;
    cfg.dac_energy_j *= 2;
    cfg.adc_energy_j *= 2;
    const PerfReport doubled = cims::estimate_iteration_power(cfg);
    CHECK(doubled.power_total_w ==
          doctest::Approx(2 * base.power_total_w).epsilon(1e-12));
    CHECK(doubled.frac_sram == doctest::Approx(base.frac_sram).epsilon(1e-12));
    CHECK(doubled.frac_adc == doctest::Approx(base.frac_adc).epsilon(1e-12));
  }
  SUBCASE("fractions sum to one") {
    const PerfReport report = cims::estimate_iteration_power(PerfConfig{});
    CHECK(report.frac_sram + report.frac_dac + report.frac_adc ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("estimate_run_cycles") {
  SUBCASE("cycle arithmetic at the default clock") {
    const PerfReport report =
        cims::estimate_run_cycles(trace_of(550, 500), PerfConfig{});
    CHECK(report.total_cycles == 2200);
    CHECK(report.wall_seconds == doctest::Approx(2.2e-6).epsilon(1e-12));
  }
  SUBCASE("reference throughput point") {
    // 500 emitted samples over 500 iterations at 4 cycles each.
    const PerfReport report =
        cims::estimate_run_cycles(trace_of(500, 500), PerfConfig{});
    CHECK(report.total_cycles == 2000);
    CHECK(report.samples_per_1000_cycles == 250.0);
  }
  SUBCASE("cycles scale linearly with iteration count") {
    PerfConfig cfg;
    const auto a = cims::estimate_run_cycles(trace_of(100, 100), cfg);
    const auto b = cims::estimate_run_cycles(trace_of(300, 100), cfg);
    CHECK(b.total_cycles == 3 * a.total_cycles);
  }
  SUBCASE("zero-length trace throws") {
    CHECK_THROWS_AS(cims::estimate_run_cycles(trace_of(0, 0), PerfConfig{}),
                    std::invalid_argument);
  }
}
