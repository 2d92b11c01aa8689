#include "treesne/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "treesne/error.hpp"

namespace treesne {
namespace {

struct Neighbor {
  double dist;
  Eigen::Index id;
  bool operator<(const Neighbor& o) const { return dist < o.dist || (dist == o.dist && id < o.id); }
};

// Points sorted by coordinate, ties by index.
struct SortedLine {
  std::vector<double> coords;
  std::vector<Eigen::Index> ids;

  SortedLine(const Eigen::Ref<const Eigen::VectorXd>& values, const std::vector<Eigen::Index>& members) {
    ids = members;
    std::sort(ids.begin(), ids.end(), [&](Eigen::Index a, Eigen::Index b) {
      return values(a) < values(b) || (values(a) == values(b) && a < b);
    });
    coords.reserve(ids.size());
    for (auto id : ids) coords.push_back(values(id));
  }
};

// k nearest entries of `line` to coordinate x, scanning outward from the
// sorted slots `left` and `right`. Distance ties at the k-th position are
// all gathered before the final (dist, id) sort, so tie-breaking is exact.
std::vector<Neighbor> nearest_on_line(const SortedLine& line, double x, std::ptrdiff_t left, std::ptrdiff_t right,
                                      std::size_t k) {
  std::vector<Neighbor> found;
  const auto size = static_cast<std::ptrdiff_t>(line.coords.size());
  double kth = 0.0;
  while (left >= 0 || right < size) {
    const double dl = left >= 0 ? x - line.coords[static_cast<std::size_t>(left)] : HUGE_VAL;
    const double dr = right < size ? line.coords[static_cast<std::size_t>(right)] - x : HUGE_VAL;
    const double next = std::min(dl, dr);
    if (found.size() >= k && next > kth) break;
    if (dl <= dr) {
      found.push_back({dl, line.ids[static_cast<std::size_t>(left)]});
      --left;
    } else {
      found.push_back({dr, line.ids[static_cast<std::size_t>(right)]});
      ++right;
    }
    if (found.size() == k) kth = found.back().dist;
  }
  std::sort(found.begin(), found.end());
  if (found.size() > k) found.resize(k);
  return found;
}

class DisjointSets {
 public:
  explicit DisjointSets(Eigen::Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<Eigen::Index> parent_;
};

// Relabels so that labels appear as 0, 1, 2, ... in order of first occurrence.
int canonicalize(std::vector<int>& labels) {
  std::map<int, int> remap;
  for (int& l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    l = it->second;
  }
  return static_cast<int>(remap.size());
}

// Majority label among the k points of `line` nearest to x; ties go to the
// nearest point's label.
int vote(const SortedLine& line, const std::vector<int>& labels, double x, std::size_t k, std::map<int, int>& votes) {
  const auto upper = std::lower_bound(line.coords.begin(), line.coords.end(), x) - line.coords.begin();
  const auto found = nearest_on_line(line, x, upper - 1, upper, k);
  votes.clear();
  for (const auto& nb : found) ++votes[labels[static_cast<std::size_t>(nb.id)]];
  int best_count = 0;
  for (const auto& [label, count] : votes) best_count = std::max(best_count, count);
  int winners = 0;
  int winner = -1;
  for (const auto& [label, count] : votes) {
    if (count == best_count) {
      ++winners;
      winner = label;
    }
  }
  return winners == 1 ? winner : labels[static_cast<std::size_t>(found.front().id)];
}

// Each member of `line` takes the vote of its k nearest members, itself
// included. Labels of points outside `line` are left as they are.
std::vector<int> smoothed(const SortedLine& line, const std::vector<int>& labels, std::size_t k) {
  std::vector<int> out = labels;
  std::map<int, int> votes;
  for (std::size_t p = 0; p < line.ids.size(); ++p) {
    const auto slot = static_cast<std::ptrdiff_t>(p);
    auto found = nearest_on_line(line, line.coords[p], slot - 1, slot + 1, k > 1 ? k - 1 : 1);
    votes.clear();
    const int own = labels[static_cast<std::size_t>(line.ids[p])];
    ++votes[own];
    for (const auto& nb : found) ++votes[labels[static_cast<std::size_t>(nb.id)]];
    int best_count = 0;
    for (const auto& [label, count] : votes) best_count = std::max(best_count, count);
    int winners = 0;
    int winner = own;
    for (const auto& [label, count] : votes) {
      if (count == best_count) {
        ++winners;
        winner = label;
      }
    }
    out[static_cast<std::size_t>(line.ids[p])] = winners == 1 ? winner : own;
  }
  return out;
}

}  // namespace

bool SnnGraph::has_edge(Eigen::Index i, Eigen::Index j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

Eigen::Index snn_neighbor_count(Eigen::Index n, double beta) {
  const auto k = static_cast<Eigen::Index>(std::ceil(beta * std::log(static_cast<double>(n))));
  return std::clamp<Eigen::Index>(k, 1, std::max<Eigen::Index>(1, n - 1));
}

std::vector<std::vector<Eigen::Index>> knn_1d(const Eigen::Ref<const Eigen::VectorXd>& coords, Eigen::Index k) {
  const Eigen::Index n = coords.size();
  if (k < 1 || k > n - 1) throw ParameterError("knn_1d: k must be in [1, n - 1]");
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  const SortedLine line(coords, all);
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < line.ids.size(); ++p) {
    const auto slot = static_cast<std::ptrdiff_t>(p);
    const auto found = nearest_on_line(line, line.coords[p], slot - 1, slot + 1, static_cast<std::size_t>(k));
    auto& list = out[static_cast<std::size_t>(line.ids[p])];
    list.reserve(found.size());
    for (const auto& nb : found) list.push_back(nb.id);
  }
  return out;
}

std::vector<double> knn_radius_1d(const Eigen::Ref<const Eigen::VectorXd>& coords, Eigen::Index k) {
  const Eigen::Index n = coords.size();
  if (k < 1 || k > n - 1) throw ParameterError("knn_radius_1d: k must be in [1, n - 1]");
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  const SortedLine line(coords, all);
  std::vector<double> radius(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < line.ids.size(); ++p) {
    const auto slot = static_cast<std::ptrdiff_t>(p);
    const auto found = nearest_on_line(line, line.coords[p], slot - 1, slot + 1, static_cast<std::size_t>(k));
    radius[static_cast<std::size_t>(line.ids[p])] = found.back().dist;
  }
  return radius;
}

SnnGraph snn_graph_with_k(const Eigen::Ref<const Eigen::VectorXd>& coords, Eigen::Index k, double resolution) {
  const Eigen::Index n = coords.size();
  if (n < 2) throw ParameterError("snn_graph needs at least 2 points");
  if (!(resolution >= 0.0)) throw ParameterError("resolution must be >= 0");
  SnnGraph graph;
  graph.n = n;
  graph.k_used = k;
  // j is a neighbor of i iff |y_i - y_j| <= radius_i, so (i, j) is mutual iff
  // the distance is within both radii. Scan rightward in sorted order.
  auto radius = knn_radius_1d(coords, k);
  for (double& r : radius) r = std::max(r, resolution);
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  const SortedLine line(coords, all);
  for (std::size_t p = 0; p < line.ids.size(); ++p) {
    const Eigen::Index i = line.ids[p];
    const double ri = radius[static_cast<std::size_t>(i)];
    for (std::size_t q = p + 1; q < line.ids.size(); ++q) {
      const double d = line.coords[q] - line.coords[p];
      if (d > ri) break;
      const Eigen::Index j = line.ids[q];
      if (d <= radius[static_cast<std::size_t>(j)]) graph.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

SnnGraph snn_graph(const Eigen::Ref<const Eigen::VectorXd>& coords, double beta, double resolution) {
  const Eigen::Index n = coords.size();
  if (n < 3) throw ParameterError("snn_graph needs at least 3 points, got " + std::to_string(n));
  if (!(beta > 0)) throw ParameterError("beta must be > 0");
  return snn_graph_with_k(coords, snn_neighbor_count(n, beta), resolution);
}

Eigen::MatrixXd laplacian(const SnnGraph& graph) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(graph.n, graph.n);
  for (const auto& [i, j] : graph.edges) {
    L(i, j) -= 1.0;
    L(j, i) -= 1.0;
    L(i, i) += 1.0;
    L(j, j) += 1.0;
  }
  return L;
}

Eigen::Index count_components_spectral(const SnnGraph& graph, double relative_tolerance) {
  if (graph.n < 1) throw ParameterError("graph is empty");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(graph), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ComputationError("Laplacian eigendecomposition failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  if (largest == 0.0) return graph.n;
  return (ev.array() < relative_tolerance * largest).count();
}

Eigen::Index count_components_union_find(const SnnGraph& graph) {
  if (graph.n < 1) throw ParameterError("graph is empty");
  DisjointSets sets(graph.n);
  for (const auto& [i, j] : graph.edges) sets.unite(i, j);
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < graph.n; ++i) count += sets.find(i) == i;
  return count;
}

LabelVector component_labels(const SnnGraph& graph) {
  if (graph.n < 1) throw ParameterError("graph is empty");
  DisjointSets sets(graph.n);
  for (const auto& [i, j] : graph.edges) sets.unite(i, j);
  LabelVector out;
  out.labels.resize(static_cast<std::size_t>(graph.n));
  // Roots are the smallest member of each set, so first-occurrence order
  // matches smallest-member order.
  for (Eigen::Index i = 0; i < graph.n; ++i) out.labels[static_cast<std::size_t>(i)] = static_cast<int>(sets.find(i));
  canonicalize(out.labels);
  out.name = "components";
  return out;
}

LayerClustering cluster_layer(const Eigen::Ref<const Eigen::VectorXd>& coords, const ClusterConfig& cfg,
                              int layer_index) {
  const Eigen::Index n = coords.size();
  if (n < 3) throw ParameterError("cluster_layer needs at least 3 points");
  if (cfg.subsample_cap < 3) throw ParameterError("subsample_cap must be >= 3");
  if (cfg.knn_k < 1) throw ParameterError("knn_k must be >= 1");
  if (!(cfg.resolution >= 0.0)) throw ParameterError("resolution must be >= 0");

  LayerClustering out;
  out.layer_index = layer_index;

  if (n <= cfg.subsample_cap) {
    out.subsample_indices.resize(static_cast<std::size_t>(n));
    std::iota(out.subsample_indices.begin(), out.subsample_indices.end(), Eigen::Index{0});
    const SnnGraph graph = snn_graph(coords, cfg.beta, cfg.resolution);
    if (cfg.spectral) {
      const auto k_spectral = count_components_spectral(graph, cfg.spectral_tolerance);
      if (k_spectral != count_components_union_find(graph)) {
        throw ComputationError("spectral component count disagrees with graph connectivity");
      }
    }
    out.labels = component_labels(graph);
    if (cfg.smooth) {
      const SortedLine line(coords, out.subsample_indices);
      const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(cfg.knn_k, n));
      out.labels.labels = smoothed(line, out.labels.labels, k);
    }
    out.k = canonicalize(out.labels.labels);
    out.labels.name = "layer " + std::to_string(layer_index);
    return out;
  }

  // Uniform subsample without replacement (partial Fisher-Yates).
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(cfg.fixed_subsample ? 1 : layer_index));
  const auto cap = static_cast<std::size_t>(cfg.subsample_cap);
  for (std::size_t s = 0; s < cap; ++s) {
    std::uniform_int_distribution<std::size_t> pick(s, perm.size() - 1);
    std::swap(perm[s], perm[pick(rng)]);
  }
  perm.resize(cap);
  std::sort(perm.begin(), perm.end());
  out.subsample_indices = perm;

  Eigen::VectorXd sub_coords(static_cast<Eigen::Index>(cap));
  for (std::size_t s = 0; s < cap; ++s) sub_coords(static_cast<Eigen::Index>(s)) = coords(perm[s]);
  const SnnGraph graph = snn_graph(sub_coords, cfg.beta, cfg.resolution);
  if (cfg.spectral && count_components_spectral(graph, cfg.spectral_tolerance) != count_components_union_find(graph)) {
    throw ComputationError("spectral component count disagrees with graph connectivity");
  }
  const LabelVector sub_labels = component_labels(graph);

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (std::size_t s = 0; s < cap; ++s) labels[static_cast<std::size_t>(perm[s])] = sub_labels[s];

  const SortedLine line(coords, perm);
  const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(cfg.knn_k, static_cast<Eigen::Index>(cap)));
  if (cfg.smooth) labels = smoothed(line, labels, k);
  std::map<int, int> votes;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] >= 0) continue;
    labels[static_cast<std::size_t>(i)] = vote(line, labels, coords(i), k, votes);
  }
  out.k = canonicalize(labels);
  out.labels.labels = std::move(labels);
  out.labels.name = "layer " + std::to_string(layer_index);
  return out;
}

std::vector<LayerClustering> cluster_tree(const TreeEmbedding& tree, const ClusterConfig& cfg) {
  std::vector<LayerClustering> out;
  out.reserve(tree.layers.size());
  for (const auto& layer : tree.layers) out.push_back(cluster_layer(layer.coords, cfg, layer.index));
  return out;
}

}  // namespace treesne
