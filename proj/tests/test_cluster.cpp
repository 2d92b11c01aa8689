#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "treesne/alphasel.hpp"
#include "treesne/cluster.hpp"
#include "treesne/error.hpp"

using namespace treesne;

namespace {

// Brute-force mutual kNN edges with tie-inclusive neighborhoods.
std::vector<std::pair<Eigen::Index, Eigen::Index>> brute_snn(const Eigen::VectorXd& x, Eigen::Index k,
                                                             double resolution = 0.0) {
  const Eigen::Index n = x.size();
  std::vector<double> radius(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> d;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) d.push_back(std::abs(x(i) - x(j)));
    std::sort(d.begin(), d.end());
    radius[i] = std::max(d[k - 1], resolution);
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(x(i) - x(j)) <= std::min(radius[i], radius[j])) edges.emplace_back(i, j);
  return edges;
}

std::vector<std::pair<long, long>> as_long(const SnnGraph& g) {
  std::vector<std::pair<long, long>> out;
  for (const auto& [a, b] : g.edges) out.emplace_back(a, b);
  return out;
}

Eigen::VectorXd gaussian_line(int n, std::mt19937_64& rng, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  Eigen::VectorXd x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

}  // namespace

TEST(Snn, NeighborCount) {
  EXPECT_EQ(snn_neighbor_count(2000, 2.0), 16);
  EXPECT_EQ(snn_neighbor_count(100, 2.0), 10);
  EXPECT_EQ(snn_neighbor_count(3, 100.0), 2);
}

TEST(Snn, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x = gaussian_line(60, rng);
    // Coincident points and a rounded copy exercise ties.
    x(5) = x(6);
    for (int i = 40; i < 50; ++i) x(i) = std::round(x(i) * 4) / 4;
    const Eigen::Index k = 1 + trial % 7;
    EXPECT_EQ(snn_graph_with_k(x, k).edges, brute_snn(x, k)) << "trial " << trial;
    EXPECT_EQ(snn_graph_with_k(x, k, 0.3).edges, brute_snn(x, k, 0.3)) << "trial " << trial;
  }
}

TEST(Snn, KnnOnLineMatchesBruteForce) {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd x = gaussian_line(50, rng);
  const auto nb = knn_1d(x, 4);
  for (Eigen::Index i = 0; i < 50; ++i) {
    std::vector<std::pair<double, Eigen::Index>> all;
    for (Eigen::Index j = 0; j < 50; ++j)
      if (j != i) all.emplace_back(std::abs(x(i) - x(j)), j);
    std::sort(all.begin(), all.end());
    for (int c = 0; c < 4; ++c) EXPECT_EQ(nb[i][c], all[c].second);
  }
  EXPECT_THROW(knn_1d(x, 50), ParameterError);
}

TEST(Snn, EdgesSymmetricAndSorted) {
  std::mt19937_64 rng(3);
  const auto g = snn_graph(gaussian_line(200, rng), 2.0);
  EXPECT_TRUE(std::is_sorted(g.edges.begin(), g.edges.end()));
  for (const auto& [a, b] : g.edges) {
    EXPECT_LT(a, b);
    EXPECT_TRUE(g.has_edge(a, b));
    EXPECT_TRUE(g.has_edge(b, a));
  }
}

TEST(Snn, GapSplitsTwoGroups) {
  Eigen::VectorXd x(40);
  for (int i = 0; i < 20; ++i) {
    x(i) = i * 0.1;
    x(20 + i) = 100.0 + i * 0.1;
  }
  const auto g = snn_graph(x, 2.0);
  for (const auto& [a, b] : g.edges) EXPECT_EQ(a < 20, b < 20);
  EXPECT_EQ(count_components_union_find(g), 2);
  EXPECT_EQ(count_components_spectral(g), 2);
}

TEST(Components, SpectralAgreesWithUnionFind) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    // Clumps at random offsets so the component count varies.
    Eigen::VectorXd x(60);
    for (int i = 0; i < 60; ++i) x(i) = 50.0 * pick(rng) + 10.0 * (i % 3) + std::normal_distribution<double>(0, 0.5)(rng);
    const auto g = snn_graph_with_k(x, 1 + trial % 5);
    EXPECT_EQ(count_components_spectral(g), count_components_union_find(g)) << "trial " << trial;
  }
}

TEST(Components, LabelsMatchBfsOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = gaussian_line(80, rng, 5.0);
    const auto g = snn_graph_with_k(x, 2);
    const auto labels = component_labels(g);
    EXPECT_EQ(labels.labels, oracle::bfs_components(80, as_long(g)));
  }
}

TEST(Components, PathGraphIsConnected) {
  SnnGraph g;
  g.n = 5;
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  EXPECT_EQ(count_components_union_find(g), 1);
  EXPECT_EQ(count_components_spectral(g), 1);
  g.edges = {{0, 1}, {1, 2}, {0, 2}};
  EXPECT_EQ(count_components_union_find(g), 3);
  EXPECT_EQ(component_labels(g).labels, (std::vector<int>{0, 0, 0, 1, 2}));
}

TEST(Components, LaplacianRowsSumToZero) {
  std::mt19937_64 rng(6);
  const auto g = snn_graph(gaussian_line(30, rng), 2.0);
  const Eigen::MatrixXd L = laplacian(g);
  EXPECT_LT(L.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(L, L.transpose());
}

TEST(ClusterLayer, TwoGapsGiveThreeClusters) {
  Eigen::VectorXd x(100);
  for (int i = 0; i < 100; ++i) x(i) = (i / 34) * 50.0 + (i % 34) * 0.2;
  const auto c = cluster_layer(x, ClusterConfig{});
  EXPECT_EQ(c.k, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(c.labels.labels[i], i / 34);
}

TEST(ClusterLayer, SubsampledBlobsRecovered) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd x(5000);
  std::vector<int> truth(5000);
  for (int i = 0; i < 5000; ++i) {
    truth[i] = i % 3;
    x(i) = 40.0 * truth[i] + g(rng);
  }
  ClusterConfig cfg;
  cfg.seed = 11;
  const auto c = cluster_layer(x, cfg, 1);
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.subsample_indices.size(), 2000u);
  EXPECT_DOUBLE_EQ(nmi(std::span<const int>(c.labels.labels), std::span<const int>(truth)), 1.0);
  const auto again = cluster_layer(x, cfg, 1);
  EXPECT_EQ(again.labels.labels, c.labels.labels);
  EXPECT_EQ(again.subsample_indices, c.subsample_indices);
  EXPECT_NE(cluster_layer(x, cfg, 2).subsample_indices, c.subsample_indices);
}

TEST(ClusterLayer, WiderGapNeverAddsClusters) {
  std::mt19937_64 rng(8);
  const Eigen::VectorXd base = gaussian_line(300, rng);
  int prev = 0;
  for (double gap : {0.0, 1.0, 5.0, 50.0, 500.0}) {
    Eigen::VectorXd x = base;
    for (int i = 150; i < 300; ++i) x(i) += gap;
    ClusterConfig cfg;
    cfg.smooth = false;
    const int k = cluster_layer(x, cfg).k;
    if (gap >= 50.0) EXPECT_GE(k, 2);
    if (gap > 0.0) EXPECT_GE(k, prev);
    prev = k;
  }
}

TEST(ClusterLayer, CollapsedLayerIsOneCluster) {
  Eigen::VectorXd x(50);
  for (int i = 0; i < 50; ++i) x(i) = 3.0 + (i % 7) * 1e-14;
  EXPECT_EQ(cluster_layer(x, ClusterConfig{}).k, 1);
  ClusterConfig exact;
  exact.resolution = 0.0;
  exact.smooth = false;
  EXPECT_GT(cluster_layer(x, exact).k, 1);
}

TEST(ClusterLayer, SmoothingAbsorbsStrays) {
  // A lone point next to a dense group with its own small gap.
  Eigen::VectorXd x(41);
  for (int i = 0; i < 40; ++i) x(i) = (i / 20) * 100.0 + (i % 20) * 0.1;
  x(40) = 2.0 + 1.5;
  ClusterConfig raw;
  raw.smooth = false;
  ClusterConfig smooth;
  EXPECT_GE(cluster_layer(x, raw).k, 2);
  const auto c = cluster_layer(x, smooth);
  EXPECT_EQ(c.k, 2);
  EXPECT_EQ(c.labels.labels[40], c.labels.labels[0]);
}

TEST(ClusterLayer, SpectralPathAgrees) {
  std::mt19937_64 rng(9);
  Eigen::VectorXd x = gaussian_line(400, rng);
  for (int i = 200; i < 400; ++i) x(i) += 30.0;
  ClusterConfig uf;
  ClusterConfig sp;
  sp.spectral = true;
  EXPECT_EQ(cluster_layer(x, uf).labels.labels, cluster_layer(x, sp).labels.labels);
}

TEST(ClusterLayer, BadConfigRejected) {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(10, 0, 1);
  ClusterConfig cfg;
  cfg.resolution = -1;
  EXPECT_THROW(cluster_layer(x, cfg), ParameterError);
  EXPECT_THROW(cluster_layer(Eigen::VectorXd::Zero(2), ClusterConfig{}), ParameterError);
  EXPECT_THROW(snn_graph(x, 0.0), ParameterError);
}
