#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "treesne/dataset.hpp"

namespace treesne {

/// Exact k-nearest-neighbor lists under Euclidean distance.
///
/// Row i of `indices` holds the neighbors of point i ordered by increasing
/// distance (ties broken toward the lower index); `sq_distances` holds the
/// matching squared distances. A point is never its own neighbor.
struct NeighborLists {
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> indices;
  RowMatrix sq_distances;

  Eigen::Index size() const { return indices.rows(); }
  Eigen::Index k() const { return indices.cols(); }
};

NeighborLists knn(const DataMatrix& data, Eigen::Index k);

/// Drops all but the first `k` neighbors of every list.
NeighborLists truncate(const NeighborLists& neighbors, Eigen::Index k);

struct CalibrationOptions {
  double entropy_tolerance = 1e-5;  // bits
  int max_iterations = 200;
  double min_sq_distance = 1e-12;
};

struct Bandwidths {
  Eigen::VectorXd sigma;
  Eigen::VectorXd entropy_bits;  // achieved entropy per point
  std::vector<Eigen::Index> unconverged;

  bool converged() const { return unconverged.empty(); }
};

/// Binary-searches a Gaussian bandwidth per point so that the entropy of its
/// conditional neighbor distribution equals log2(perplexity).
///
/// Points that fail to converge keep their best bandwidth and are listed in
/// `Bandwidths::unconverged`.
Bandwidths calibrate_bandwidths(const NeighborLists& neighbors, double perplexity,
                                const CalibrationOptions& options = {});

/// Conditional distribution p_{j|i} over the neighbor list of point i.
Eigen::VectorXd conditional_row(const NeighborLists& neighbors, Eigen::Index i, double sigma,
                                double min_sq_distance = 1e-12);

/// Sparse symmetric joint affinities, normalized to sum to one.
template <typename Scalar>
struct BasicAffinityMatrix {
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Eigen::Index>;

  Sparse p;
  double perplexity = 0.0;

  Eigen::Index size() const { return p.rows(); }

  template <typename NewScalar>
  BasicAffinityMatrix<NewScalar> cast() const {
    return {p.template cast<NewScalar>(), perplexity};
  }
};

using AffinityMatrix = BasicAffinityMatrix<double>;

AffinityMatrix build_affinities(const NeighborLists& neighbors, const Bandwidths& bandwidths,
                                double perplexity, double min_sq_distance = 1e-12);

/// Neighbor count used to support a given perplexity: ceil(3 * perplexity),
/// capped at n - 1.
Eigen::Index support_size(double perplexity, Eigen::Index n);

/// Largest perplexity that can be calibrated on n points: (n - 1) / 3.
double max_feasible_perplexity(Eigen::Index n);

}  // namespace treesne
