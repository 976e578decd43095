#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "cims/gmm.hpp"
#include "cims/sampler.hpp"

namespace cims {

struct GridSpec {
  Eigen::VectorXd lower;  // per-dimension bounds, lower < upper
  Eigen::VectorXd upper;
  Eigen::VectorXi bins;   // per-dimension bin counts
  double pseudo_count = 0.5;

  Eigen::Index dimension() const { return lower.size(); }
  Eigen::Index total_bins() const;

  static GridSpec regular(double lo, double hi, int bins_per_dim,
                          Eigen::Index dimension, double pseudo_count = 0.5);

  // Default experiment grid: per-dimension [min_j mu_ij - pad * max sigma,
  // max_j mu_ij + pad * max sigma].
  static GridSpec for_model(const GmmModel& model, int bins_per_dim = 30,
                            double padding_sigmas = 4.0,
                            double pseudo_count = 0.5);
};

struct DiscreteDistribution {
  Eigen::VectorXd probs;  // flattened row-major over the grid, sums to 1
  Eigen::VectorXi shape;
};

// Bins samples (out-of-grid values clamp to edge bins), adds the pseudo-count
// to every bin, normalizes.
DiscreteDistribution histogram_distribution(
    const std::vector<Eigen::VectorXd>& samples, const GridSpec& grid);

// Cell-center density mass, renormalized over the grid.
DiscreteDistribution ground_truth_distribution(const GmmModel& model,
                                               const GridSpec& grid);

// sum_x F(x) ln(F(x)/G(x)) with 0 ln(0/.) = 0; throws if some G(x) = 0 where
// F(x) > 0 or the grids differ.
double kl_divergence(const DiscreteDistribution& f,
                     const DiscreteDistribution& g);

enum class KlMode { joint, marginal_1d };

// joint: truth-vs-histogram KL over the full grid (dimension <= 3).
// marginal_1d: mean over coordinates of the 1-D KL between per-coordinate
// ground-truth marginals (1-D mixtures under diagonal covariance) and
// per-coordinate sample histograms.
double marginal_kl(const std::vector<Eigen::VectorXd>& samples,
                   const GmmModel& model, const GridSpec& grid, KlMode mode);

// (1/T) sum_t g(x_t) over post-burn-in snapshots.
double mc_expectation(const SampleTrace& trace,
                      const std::function<double(const Eigen::VectorXd&)>& g);

}  // namespace cims
