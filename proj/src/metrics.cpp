#include "cims/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cims {

namespace {

void check_grid(const GridSpec& grid) {
  if (grid.lower.size() < 1 || grid.upper.size() != grid.lower.size() ||
      grid.bins.size() != grid.lower.size())
    throw std::invalid_argument("grid: inconsistent field sizes");
  if (!((grid.upper - grid.lower).array() > 0.0).all())
    throw std::invalid_argument("grid: lower must be < upper");
  if ((grid.bins.array() < 1).any())
    throw std::invalid_argument("grid: bins must be >= 1");
  if (grid.total_bins() < 4)
    throw std::invalid_argument("grid: total bin count must be >= 4");
  if (grid.pseudo_count < 0.0)
    throw std::invalid_argument("grid: pseudo_count must be >= 0");
}

// Row-major strides: last dimension fastest.
Eigen::VectorXi strides_of(const Eigen::VectorXi& shape) {
  Eigen::VectorXi strides(shape.size());
  int acc = 1;
  for (Eigen::Index i = shape.size() - 1; i >= 0; --i) {
    strides[i] = acc;
    acc *= shape[i];
  }
  return strides;
}

Eigen::Index bin_of(double value, double lo, double hi, int bins) {
  const double width = (hi - lo) / bins;
  const auto idx = static_cast<Eigen::Index>(std::floor((value - lo) / width));
  return std::clamp<Eigen::Index>(idx, 0, bins - 1);
}

}  // namespace

Eigen::Index GridSpec::total_bins() const {
  Eigen::Index total = 1;
  for (Eigen::Index i = 0; i < bins.size(); ++i) total *= bins[i];
  return total;
}

GridSpec GridSpec::regular(double lo, double hi, int bins_per_dim,
                           Eigen::Index dimension, double pseudo_count) {
  GridSpec grid;
  grid.lower = Eigen::VectorXd::Constant(dimension, lo);
  grid.upper = Eigen::VectorXd::Constant(dimension, hi);
  grid.bins = Eigen::VectorXi::Constant(dimension, bins_per_dim);
  grid.pseudo_count = pseudo_count;
  check_grid(grid);
  return grid;
}

GridSpec GridSpec::for_model(const GmmModel& model, int bins_per_dim,
                             double padding_sigmas, double pseudo_count) {
  const double pad = padding_sigmas * model.stddevs.maxCoeff();
  GridSpec grid;
  grid.lower = model.means.rowwise().minCoeff().array() - pad;
  grid.upper = model.means.rowwise().maxCoeff().array() + pad;
  grid.bins = Eigen::VectorXi::Constant(model.dimension(), bins_per_dim);
  grid.pseudo_count = pseudo_count;
  check_grid(grid);
  return grid;
}

DiscreteDistribution histogram_distribution(
    const std::vector<Eigen::VectorXd>& samples, const GridSpec& grid) {
  check_grid(grid);
  if (samples.empty())
    throw std::invalid_argument("histogram: empty sample set");

  const auto dim = grid.dimension();
  const Eigen::VectorXi strides = strides_of(grid.bins);

  DiscreteDistribution dist;
  dist.shape = grid.bins;
  dist.probs = Eigen::VectorXd::Constant(grid.total_bins(), grid.pseudo_count);
  for (const auto& sample : samples) {
    if (sample.size() != dim)
      throw std::invalid_argument("histogram: sample dimension mismatch");
    Eigen::Index flat = 0;
    for (Eigen::Index i = 0; i < dim; ++i)
      flat += strides[i] *
              bin_of(sample[i], grid.lower[i], grid.upper[i], grid.bins[i]);
    dist.probs[flat] += 1.0;
  }
  dist.probs /= dist.probs.sum();
  return dist;
}

DiscreteDistribution ground_truth_distribution(const GmmModel& model,
                                               const GridSpec& grid) {
  check_grid(grid);
  const auto dim = grid.dimension();
  if (dim != model.dimension())
    throw std::invalid_argument("ground_truth: grid dimension mismatch");

  Eigen::VectorXd widths =
      (grid.upper - grid.lower).array() / grid.bins.cast<double>().array();

  DiscreteDistribution dist;
  dist.shape = grid.bins;
  dist.probs.resize(grid.total_bins());

  Eigen::VectorXi index = Eigen::VectorXi::Zero(dim);
  Eigen::VectorXd center(dim);
  for (Eigen::Index flat = 0; flat < dist.probs.size(); ++flat) {
    for (Eigen::Index i = 0; i < dim; ++i)
      center[i] = grid.lower[i] + (index[i] + 0.5) * widths[i];
    dist.probs[flat] = std::exp(log_density_exact(center, model));
    // odometer, last dimension fastest
    for (Eigen::Index i = dim - 1; i >= 0; --i) {
      if (++index[i] < grid.bins[i]) break;
      index[i] = 0;
    }
  }
  dist.probs *= widths.prod();
  dist.probs /= dist.probs.sum();
  return dist;
}

double kl_divergence(const DiscreteDistribution& f,
                     const DiscreteDistribution& g) {
  if (f.shape.size() != g.shape.size() ||
      (f.shape.array() != g.shape.array()).any())
    throw std::invalid_argument("kl_divergence: grid mismatch");

  double kl = 0.0;
  for (Eigen::Index i = 0; i < f.probs.size(); ++i) {
    const double fi = f.probs[i];
    if (fi == 0.0) continue;
    const double gi = g.probs[i];
    if (!(gi > 0.0))
      throw std::domain_error("kl_divergence: G(x) = 0 where F(x) > 0");
    kl += fi * std::log(fi / gi);
  }
  return std::max(kl, 0.0);
}

double marginal_kl(const std::vector<Eigen::VectorXd>& samples,
                   const GmmModel& model, const GridSpec& grid, KlMode mode) {
  check_grid(grid);
  if (grid.dimension() != model.dimension())
    throw std::invalid_argument("marginal_kl: grid dimension mismatch");

  if (mode == KlMode::joint) {
    if (model.dimension() > 3)
      throw std::invalid_argument("marginal_kl: joint mode requires N <= 3");
    return kl_divergence(ground_truth_distribution(model, grid),
                         histogram_distribution(samples, grid));
  }

  const auto dim = model.dimension();
  double total = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const GmmModel marginal = GmmModel::from_parameters(
        model.weights, model.means.row(i), model.stddevs.row(i));
    GridSpec axis;
    axis.lower = grid.lower.segment(i, 1);
    axis.upper = grid.upper.segment(i, 1);
    axis.bins = grid.bins.segment(i, 1);
    axis.pseudo_count = grid.pseudo_count;

    std::vector<Eigen::VectorXd> coord(samples.size(), Eigen::VectorXd(1));
    for (std::size_t s = 0; s < samples.size(); ++s)
      coord[s][0] = samples[s][i];
    total += kl_divergence(ground_truth_distribution(marginal, axis),
                           histogram_distribution(coord, axis));
  }
  return total / static_cast<double>(dim);
}

double mc_expectation(const SampleTrace& trace,
                      const std::function<double(const Eigen::VectorXd&)>& g) {
  if (trace.samples.empty())
    throw std::invalid_argument("mc_expectation: empty trace");
  double sum = 0.0;
  for (const auto& x : trace.samples) sum += g(x);
  return sum / static_cast<double>(trace.samples.size());
}

}  // namespace cims
