#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "treesne/dataset.hpp"
#include "treesne/tree.hpp"

namespace treesne {

/// Mutual k-nearest-neighbor graph: (i, j) is an edge iff each endpoint is
/// among the other's k nearest neighbors. Edges are stored once with i < j,
/// sorted lexicographically.
///
/// A neighborhood holds every point within the k-th neighbor distance, so
/// points tied at that distance (in particular coincident points) are all
/// included. Without ties this is exactly the k-nearest list. Points closer
/// than `resolution` are treated as coincident.
struct SnnGraph {
  Eigen::Index n = 0;
  Eigen::Index k_used = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;

  bool has_edge(Eigen::Index i, Eigen::Index j) const;
};

/// ceil(beta * ln n), clamped to [1, n - 1].
Eigen::Index snn_neighbor_count(Eigen::Index n, double beta);

/// Exact k nearest neighbors on a line; ties broken toward the lower index.
std::vector<std::vector<Eigen::Index>> knn_1d(const Eigen::Ref<const Eigen::VectorXd>& coords, Eigen::Index k);

/// Distance to the k-th nearest neighbor of every point.
std::vector<double> knn_radius_1d(const Eigen::Ref<const Eigen::VectorXd>& coords, Eigen::Index k);

SnnGraph snn_graph(const Eigen::Ref<const Eigen::VectorXd>& coords, double beta, double resolution = 0.0);
SnnGraph snn_graph_with_k(const Eigen::Ref<const Eigen::VectorXd>& coords, Eigen::Index k, double resolution = 0.0);

/// Dense unnormalized Laplacian L = D - W.
Eigen::MatrixXd laplacian(const SnnGraph& graph);

/// Number of Laplacian eigenvalues below `relative_tolerance` times the
/// largest eigenvalue.
Eigen::Index count_components_spectral(const SnnGraph& graph, double relative_tolerance = 1e-8);

Eigen::Index count_components_union_find(const SnnGraph& graph);

/// Connected-component ids, numbered in order of each component's smallest
/// member index.
LabelVector component_labels(const SnnGraph& graph);

struct LayerClustering {
  LabelVector labels;
  int k = 0;
  int layer_index = 0;
  std::vector<Eigen::Index> subsample_indices;
};

struct ClusterConfig {
  double beta = 2.0;
  Eigen::Index subsample_cap = 2000;
  Eigen::Index knn_k = 10;
  std::uint64_t seed = 0;
  // Distances below this are ties. A layer whose whole span is under it is
  // one cluster; without it, rounding in a collapsed layer reads as gaps.
  double resolution = 1e-9;
  // Count components from Laplacian eigenvalues instead of union-find.
  bool spectral = false;
  double spectral_tolerance = 1e-8;
  // Relabel each clustered point by the majority of its knn_k nearest
  // clustered points (itself included), so stray points join a neighbor.
  bool smooth = true;
  // Reuse the layer-1 subsample on every layer instead of redrawing.
  bool fixed_subsample = false;
};

/// Clusters one layer. Above `subsample_cap` points, a seeded uniform
/// subsample (seed + layer_index) is clustered and every other point takes
/// the majority label of its `knn_k` nearest subsampled points. With
/// `smooth`, clustered points are voted the same way first.
LayerClustering cluster_layer(const Eigen::Ref<const Eigen::VectorXd>& coords, const ClusterConfig& cfg,
                              int layer_index = 1);

std::vector<LayerClustering> cluster_tree(const TreeEmbedding& tree, const ClusterConfig& cfg);

}  // namespace treesne
