#include "cims/perf.hpp"

#include <stdexcept>

namespace cims {

namespace {

void check_config(const PerfConfig& cfg) {
  if (cfg.sram_energy_j < 0.0 || cfg.dac_energy_j < 0.0 ||
      cfg.adc_energy_j < 0.0)
    throw std::invalid_argument("perf: energies must be >= 0");
  if (cfg.adc_conversions_per_iteration < 0)
    throw std::invalid_argument("perf: adc conversion count must be >= 0");
  if (cfg.cycles_per_iteration < 1)
    throw std::invalid_argument("perf: cycles_per_iteration must be >= 1");
  if (!(cfg.clock_frequency_hz > 0.0))
    throw std::invalid_argument("perf: clock_frequency must be > 0");
}

}  // namespace

PerfReport estimate_iteration_power(const PerfConfig& cfg) {
  check_config(cfg);
  const double iterations_per_second =
      cfg.clock_frequency_hz / cfg.cycles_per_iteration;
  const double p_sram = cfg.sram_energy_j * iterations_per_second;
  const double p_dac = cfg.dac_energy_j * iterations_per_second;
  const double p_adc = cfg.adc_energy_j * cfg.adc_conversions_per_iteration *
                       iterations_per_second;

  PerfReport report;
  report.power_total_w = p_sram + p_dac + p_adc;
  if (report.power_total_w > 0.0) {
    report.frac_sram = p_sram / report.power_total_w;
    report.frac_dac = p_dac / report.power_total_w;
    report.frac_adc = p_adc / report.power_total_w;
  }
  return report;
}

PerfReport estimate_run_cycles(const SampleTrace& trace,
                               const PerfConfig& cfg) {
  if (trace.iterations.empty())
    throw std::invalid_argument("perf: zero-length trace");
  PerfReport report = estimate_iteration_power(cfg);
  report.total_cycles =
      static_cast<std::int64_t>(trace.iterations.size()) *
      cfg.cycles_per_iteration;
  report.wall_seconds =
      static_cast<double>(report.total_cycles) / cfg.clock_frequency_hz;
  report.samples_per_1000_cycles =
      1000.0 * static_cast<double>(trace.samples.size()) /
      static_cast<double>(report.total_cycles);
  return report;
}

}  // namespace cims
