#include "cims/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cims {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

GmmModel GmmModel::from_parameters(const Eigen::VectorXd& weights,
                                   const Eigen::MatrixXd& means,
                                   const Eigen::MatrixXd& stddevs) {
  if (means.rows() < 1 || means.cols() < 1)
    throw std::invalid_argument("gmm: empty parameter matrices");
  if (stddevs.rows() != means.rows() || stddevs.cols() != means.cols())
    throw std::invalid_argument("gmm: means/stddevs shape mismatch");
  if (weights.size() != means.cols())
    throw std::invalid_argument("gmm: weight count != mixture count");

  GmmModel model;
  model.weights = weights;
  model.means = means;
  model.stddevs = stddevs;

  const auto n = means.rows();
  const auto m = means.cols();
  model.log_norm_const.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    model.log_norm_const[j] = std::log(weights[j]) -
                              stddevs.col(j).array().log().sum() -
                              0.5 * static_cast<double>(n) * kLog2Pi;
  }
  return model;
}

ValidationResult validate_model(const GmmModel& model) {
  ValidationResult result;
  auto fail = [&result](const std::string& msg) {
    result.ok = false;
    result.violations.push_back(msg);
  };

  const double weight_sum = model.weights.sum();
  if (!(std::abs(weight_sum - 1.0) <= 1e-12)) fail("weights sum != 1");
  if (!(model.weights.array() > 0.0).all()) fail("nonpositive weight");
  if (!(model.stddevs.array() > 0.0).all()) fail("nonpositive stddev");
  if (!model.means.allFinite()) fail("non-finite mean");
  if (!model.stddevs.allFinite()) fail("non-finite stddev");

  if (model.log_norm_const.size() != model.num_mixtures()) {
    fail("log_norm_const size mismatch");
  } else {
    const double n = static_cast<double>(model.dimension());
    for (Eigen::Index j = 0; j < model.num_mixtures(); ++j) {
      const double expected = std::log(model.weights[j]) -
                              model.stddevs.col(j).array().log().sum() -
                              0.5 * n * kLog2Pi;
      const double got = model.log_norm_const[j];
      const bool consistent =
          (std::isnan(expected) && std::isnan(got)) ||
          std::abs(expected - got) <= 1e-12 * std::max(1.0, std::abs(expected));
      if (!consistent) {
        fail("log_norm_const inconsistent with parameters");
        break;
      }
    }
  }
  return result;
}

LutTable LutTable::make(double x_lo, int entries, Interp mode) {
  if (!(x_lo < 0.0)) throw std::invalid_argument("lut: x_lo must be < 0");
  if (entries < 2) throw std::invalid_argument("lut: need at least 2 entries");
  LutTable lut;
  lut.x_lo = x_lo;
  lut.x_hi = 0.0;
  lut.mode = mode;
  lut.values.resize(entries);
  const double step = (lut.x_hi - lut.x_lo) / (entries - 1);
  for (int i = 0; i < entries; ++i)
    lut.values[i] = std::log1p(std::exp(lut.x_lo + i * step));
  return lut;
}

double lut_ln1pexp(double x, const LutTable& lut) {
  if (std::isnan(x)) throw std::invalid_argument("lut_ln1pexp: NaN input");
  if (x < lut.x_lo) return 0.0;
  if (x > lut.x_hi) x = lut.x_hi;

  const auto entries = lut.values.size();
  const double step = (lut.x_hi - lut.x_lo) / static_cast<double>(entries - 1);
  const double pos = (x - lut.x_lo) / step;
  if (lut.mode == LutTable::Interp::nearest) {
    const auto idx = static_cast<Eigen::Index>(std::lround(pos));
    return lut.values[std::clamp<Eigen::Index>(idx, 0, entries - 1)];
  }
  const auto lo = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::floor(pos)), 0, entries - 2);
  const double frac = pos - static_cast<double>(lo);
  return lut.values[lo] + frac * (lut.values[lo + 1] - lut.values[lo]);
}

double log_sum_exp(double a, double b, const LutTable* lut) {
  if (std::isnan(a) || std::isnan(b))
    throw std::invalid_argument("log_sum_exp: NaN input");
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (std::isinf(hi) && hi < 0.0)
    throw std::domain_error("log_sum_exp: both inputs are -infinity");
  if (std::isinf(lo) && lo < 0.0) return hi;
  const double d = lo - hi;  // always <= 0
  return hi + (lut ? lut_ln1pexp(d, *lut) : std::log1p(std::exp(d)));
}

double exponent_direct(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const GmmModel& model, Eigen::Index j) {
  if (x.size() != model.dimension())
    throw std::invalid_argument("exponent_direct: dimension mismatch");
  if (j < 0 || j >= model.num_mixtures())
    throw std::invalid_argument("exponent_direct: mixture index out of range");
  return ((x - model.means.col(j)).array() / model.stddevs.col(j).array())
      .square()
      .sum();
}

double combine_log_density(const Eigen::Ref<const Eigen::VectorXd>& exponents,
                           const GmmModel& model, const LutTable* lut) {
  const auto m = model.num_mixtures();
  if (exponents.size() != m)
    throw std::invalid_argument("combine_log_density: exponent count mismatch");

  Eigen::VectorXd terms = model.log_norm_const - 0.5 * exponents;
  std::sort(terms.data(), terms.data() + m, std::greater<double>());
  double acc = terms[0];
  for (Eigen::Index j = 1; j < m; ++j) acc = log_sum_exp(acc, terms[j], lut);
  return acc;
}

double log_density_exact(const Eigen::Ref<const Eigen::VectorXd>& x,
                         const GmmModel& model) {
  if (x.size() != model.dimension())
    throw std::invalid_argument("log_density_exact: dimension mismatch");
  if (!x.allFinite())
    throw std::invalid_argument("log_density_exact: non-finite input");

  Eigen::VectorXd exponents(model.num_mixtures());
  for (Eigen::Index j = 0; j < model.num_mixtures(); ++j)
    exponents[j] = exponent_direct(x, model, j);
  return combine_log_density(exponents, model);
}

}  // namespace cims
