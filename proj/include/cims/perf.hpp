#pragma once

#include <cstdint>

#include "cims/sampler.hpp"

namespace cims {

namespace perf_defaults {
// Reference operating point: 91 uW per sampling iteration split 5/13/82
// between array, DAC, and ADC at a 1 GHz clock with 4 cycles per iteration.
// The default energies below are solved from these figures (bookkeeping
// calibration, not device physics).
inline constexpr double kTotalPowerW = 91e-6;
inline constexpr double kFracSram = 0.05;
inline constexpr double kFracDac = 0.13;
inline constexpr double kFracAdc = 0.82;
inline constexpr double kClockHz = 1e9;
inline constexpr int kCyclesPerIteration = 4;
// 2 scalar products x 2 mixtures x 8 bit planes at the default precisions.
inline constexpr int kAdcConversionsPerIteration = 32;
inline constexpr double kEnergyPerIterationJ =
    kTotalPowerW * kCyclesPerIteration / kClockHz;
}  // namespace perf_defaults

struct PerfConfig {
  // Energy per iteration for the array and DAC groups; ADC energy is per
  // conversion and multiplied by adc_conversions_per_iteration.
  double sram_energy_j =
      perf_defaults::kEnergyPerIterationJ * perf_defaults::kFracSram;
  double dac_energy_j =
      perf_defaults::kEnergyPerIterationJ * perf_defaults::kFracDac;
  double adc_energy_j = perf_defaults::kEnergyPerIterationJ *
                        perf_defaults::kFracAdc /
                        perf_defaults::kAdcConversionsPerIteration;
  int adc_conversions_per_iteration =
      perf_defaults::kAdcConversionsPerIteration;
  int cycles_per_iteration = perf_defaults::kCyclesPerIteration;
  double clock_frequency_hz = perf_defaults::kClockHz;
};

struct PerfReport {
  double power_total_w = 0.0;
  double frac_sram = 0.0;
  double frac_dac = 0.0;
  double frac_adc = 0.0;
  std::int64_t total_cycles = 0;
  double wall_seconds = 0.0;
  double samples_per_1000_cycles = 0.0;
};

// Component power = per-iteration energy x iterations per second
// (clock / cycles_per_iteration).
PerfReport estimate_iteration_power(const PerfConfig& cfg);

// Cycle accounting over a finished run; also fills the power fields.
PerfReport estimate_run_cycles(const SampleTrace& trace, const PerfConfig& cfg);

}  // namespace cims
