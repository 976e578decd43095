#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cims {

// Diagonal-covariance Gaussian mixture. Column j of means/stddevs holds the
// parameters of component j; log_norm_const caches
//   c_j = ln w_j - sum_i ln s_ij - (N/2) ln(2 pi)
// so the log-density at x is the mixture combine of c_j - E_j(x)/2.
struct GmmModel {
  Eigen::VectorXd weights;         // M
  Eigen::MatrixXd means;           // N x M
  Eigen::MatrixXd stddevs;         // N x M, strictly positive
  Eigen::VectorXd log_norm_const;  // M

  Eigen::Index dimension() const { return means.rows(); }
  Eigen::Index num_mixtures() const { return means.cols(); }

  // Builds the model and precomputes log_norm_const. Shapes must agree;
  // value-level invariants are checked by validate_model, not here.
  static GmmModel from_parameters(const Eigen::VectorXd& weights,
                                  const Eigen::MatrixXd& means,
                                  const Eigen::MatrixXd& stddevs);
};

struct ValidationResult {
  bool ok = true;
  std::vector<std::string> violations;
};

ValidationResult validate_model(const GmmModel& model);

// Sampled ln(1 + e^x) over [x_lo, 0], addressed by clamped interpolation.
struct LutTable {
  enum class Interp { nearest, linear };

  double x_lo = -16.0;
  double x_hi = 0.0;
  Eigen::VectorXd values;
  Interp mode = Interp::linear;

  static LutTable make(double x_lo = -16.0, int entries = 256,
                       Interp mode = Interp::linear);
};

// Regression constant for the default table (256 linear entries on [-16, 0]),
// frozen from a brute-force 1e5-point scan; `cims calibrate-lut` re-derives
// the measured value.
inline constexpr double kDefaultLutMaxAbsError = 1.24e-4;

// Table lookup for ln(1 + e^x). Arguments above x_hi clamp to x_hi; arguments
// below x_lo return 0 (the function underflows there).
double lut_ln1pexp(double x, const LutTable& lut);

// max(a, b) + ln(1 + e^(min-max)). Exact when lut is null, table-approximated
// otherwise; the table argument is always <= 0. Throws if both inputs are
// -infinity.
double log_sum_exp(double a, double b, const LutTable* lut = nullptr);

// E_j(x) = sum_i ((x_i - mu_ij) / s_ij)^2
double exponent_direct(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const GmmModel& model, Eigen::Index j);

// ln F(x) for the full mixture, combined without intermediate overflow.
// Rejects non-finite inputs.
double log_density_exact(const Eigen::Ref<const Eigen::VectorXd>& x,
                         const GmmModel& model);

// Mixture combine from cached exponents: left-fold of log_sum_exp over
// c_j - E_j/2 in descending term order, so the running max is established
// first regardless of mixture storage order.
double combine_log_density(const Eigen::Ref<const Eigen::VectorXd>& exponents,
                           const GmmModel& model,
                           const LutTable* lut = nullptr);

}  // namespace cims
