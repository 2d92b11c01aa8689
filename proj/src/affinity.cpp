#include "treesne/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "treesne/error.hpp"

namespace treesne {

NeighborLists knn(const DataMatrix& data, Eigen::Index k) {
  const Eigen::Index n = data.rows();
  if (k < 1 || k > n - 1) {
    throw ParameterError("knn: k must be in [1, " + std::to_string(n - 1) + "], got " + std::to_string(k));
  }
  NeighborLists out;
  out.indices.resize(n, k);
  out.sq_distances.resize(n, k);

  struct Candidate {
    double sq_dist;
    Eigen::Index index;
    bool operator<(const Candidate& o) const {
      return sq_dist < o.sq_dist || (sq_dist == o.sq_dist && index < o.index);
    }
  };
  std::vector<Candidate> candidates(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      candidates[c++] = {(data.values.row(i) - data.values.row(j)).squaredNorm(), j};
    }
    const auto kth = candidates.begin() + k;
    std::partial_sort(candidates.begin(), kth, candidates.end());
    for (Eigen::Index m = 0; m < k; ++m) {
      out.indices(i, m) = candidates[m].index;
      out.sq_distances(i, m) = candidates[m].sq_dist;
    }
  }
  return out;
}

NeighborLists truncate(const NeighborLists& neighbors, Eigen::Index k) {
  if (k < 1 || k > neighbors.k()) throw ParameterError("truncate: k out of range");
  return {neighbors.indices.leftCols(k), neighbors.sq_distances.leftCols(k)};
}

namespace {

// Entropy (bits) of exp(-beta * shifted) normalized; `shifted` is >= 0.
double entropy_bits(const Eigen::VectorXd& shifted, double beta) {
  const Eigen::ArrayXd w = (-beta * shifted.array()).exp();
  const double sum = w.sum();
  const double nats = std::log(sum) + beta * (shifted.array() * w).sum() / sum;
  return nats / std::numbers::ln2;
}

Eigen::VectorXd shifted_distances(const NeighborLists& neighbors, Eigen::Index i, double floor) {
  Eigen::VectorXd d = neighbors.sq_distances.row(i).transpose().cwiseMax(floor);
  return d.array() - d.minCoeff();
}

}  // namespace

Bandwidths calibrate_bandwidths(const NeighborLists& neighbors, double perplexity,
                                const CalibrationOptions& options) {
  if (!(perplexity > 1.0) || perplexity > static_cast<double>(neighbors.k())) {
    throw ParameterError("perplexity must be in (1, " + std::to_string(neighbors.k()) + "], got " +
                         std::to_string(perplexity));
  }
  const Eigen::Index n = neighbors.size();
  const double target = std::log2(perplexity);
  Bandwidths out;
  out.sigma.resize(n);
  out.entropy_bits.resize(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd shifted = shifted_distances(neighbors, i, options.min_sq_distance);
    const double mean = shifted.mean();
    double beta = mean > 0 ? 1.0 / mean : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double best_beta = beta;
    double best_h = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      const double h = entropy_bits(shifted, beta);
      const double err = std::abs(h - target);
      if (err < best_err) {
        best_err = err;
        best_beta = beta;
        best_h = h;
      }
      if (err < options.entropy_tolerance) {
        converged = true;
        break;
      }
      if (h > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = lo == 0.0 ? beta * 0.5 : 0.5 * (beta + lo);
      }
    }
    if (!converged) out.unconverged.push_back(i);
    out.sigma(i) = std::sqrt(1.0 / (2.0 * best_beta));
    out.entropy_bits(i) = best_h;
  }
  return out;
}

Eigen::VectorXd conditional_row(const NeighborLists& neighbors, Eigen::Index i, double sigma,
                                double min_sq_distance) {
  const Eigen::VectorXd shifted = shifted_distances(neighbors, i, min_sq_distance);
  const double beta = 1.0 / (2.0 * sigma * sigma);
  Eigen::VectorXd w = (-beta * shifted.array()).exp();
  return w / w.sum();
}

AffinityMatrix build_affinities(const NeighborLists& neighbors, const Bandwidths& bandwidths, double perplexity,
                                double min_sq_distance) {
  const Eigen::Index n = neighbors.size();
  if (bandwidths.sigma.size() != n) throw ParameterError("build_affinities: bandwidth count mismatch");

  std::vector<Eigen::Triplet<double, Eigen::Index>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * n * neighbors.k()));
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd row = conditional_row(neighbors, i, bandwidths.sigma(i), min_sq_distance);
    for (Eigen::Index m = 0; m < neighbors.k(); ++m) {
      if (row(m) == 0.0) continue;
      const Eigen::Index j = neighbors.indices(i, m);
      triplets.emplace_back(i, j, row(m) * scale);
      triplets.emplace_back(j, i, row(m) * scale);
    }
  }
  AffinityMatrix out;
  out.p.resize(n, n);
  out.p.setFromTriplets(triplets.begin(), triplets.end());
  out.p.makeCompressed();
  out.perplexity = perplexity;
  return out;
}

Eigen::Index support_size(double perplexity, Eigen::Index n) {
  const auto k = static_cast<Eigen::Index>(std::ceil(3.0 * perplexity));
  return std::clamp<Eigen::Index>(k, 1, n - 1);
}

double max_feasible_perplexity(Eigen::Index n) { return static_cast<double>(n - 1) / 3.0; }

}  // namespace treesne
