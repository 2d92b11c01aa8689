#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "treesne/alphasel.hpp"
#include "treesne/error.hpp"

using namespace treesne;

namespace {

double nmi_of(const std::vector<int>& a, const std::vector<int>& b) {
  return nmi(std::span<const int>(a), std::span<const int>(b));
}

// One layer per k, with labels i mod k.
std::vector<LayerClustering> layers_with_k(const std::vector<int>& ks, int n = 60) {
  std::vector<LayerClustering> out;
  for (std::size_t l = 0; l < ks.size(); ++l) {
    LayerClustering c;
    c.k = ks[l];
    c.layer_index = static_cast<int>(l) + 1;
    for (int i = 0; i < n; ++i) c.labels.labels.push_back(i % ks[l]);
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(Nmi, IdenticalAndRelabeledPartitions) {
  const std::vector<int> a = {0, 0, 1, 1, 2, 2};
  EXPECT_DOUBLE_EQ(nmi_of(a, a), 1.0);
  EXPECT_DOUBLE_EQ(nmi_of(a, {5, 5, 3, 3, 9, 9}), 1.0);
}

TEST(Nmi, IndependentPartitionsScoreZero) {
  std::vector<int> a;
  std::vector<int> b;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) {
      a.push_back(i);
      b.push_back(j);
    }
  EXPECT_NEAR(nmi_of(a, b), 0.0, 1e-12);
}

TEST(Nmi, MatchesContingencyOracle) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> a(200);
    std::vector<int> b(200);
    for (int i = 0; i < 200; ++i) {
      a[i] = pick(rng);
      b[i] = (trial % 2) ? (a[i] + pick(rng) % 2) : pick(rng);
    }
    EXPECT_NEAR(nmi_of(a, b), oracle::nmi(a, b), 1e-12);
  }
}

TEST(Nmi, SymmetricAndPermutationInvariant) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> pick(0, 4);
  std::vector<int> a(100);
  std::vector<int> b(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = pick(rng);
    b[i] = pick(rng);
  }
  EXPECT_EQ(nmi_of(a, b), nmi_of(b, a));
  std::vector<int> order(100);
  for (int i = 0; i < 100; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> pa(100);
  std::vector<int> pb(100);
  for (int i = 0; i < 100; ++i) {
    pa[i] = a[order[i]];
    pb[i] = b[order[i]];
  }
  EXPECT_NEAR(nmi_of(pa, pb), nmi_of(a, b), 1e-12);
  const double v = nmi_of(a, b);
  EXPECT_GE(v, 0.0);
  EXPECT_LE(v, 1.0);
}

TEST(Nmi, DegenerateEntropy) {
  EXPECT_DOUBLE_EQ(nmi_of({1, 1, 1}, {4, 4, 4}), 1.0);
  EXPECT_DOUBLE_EQ(nmi_of({1, 1, 1}, {0, 1, 2}), 0.0);
  EXPECT_THROW(nmi_of({1, 2}, {1}), ParameterError);
  EXPECT_THROW(nmi_of({}, {}), ParameterError);
}

TEST(StableRuns, WorkedExample) {
  const auto layers = layers_with_k({3, 3, 5, 5, 5, 6});
  const std::vector<double> alphas = {1.0, 0.9, 0.81, 0.729, 0.6561, 0.59049};
  const auto runs = stable_runs(layers, alphas);
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[0].layer_first, 1);
  EXPECT_EQ(runs[0].layer_last, 2);
  EXPECT_EQ(runs[0].k, 3);
  EXPECT_NEAR(runs[0].alpha_range, 0.1, 1e-12);
  EXPECT_EQ(runs[1].layer_first, 3);
  EXPECT_EQ(runs[1].layer_last, 5);
  EXPECT_EQ(runs[1].k, 5);
  EXPECT_NEAR(runs[1].alpha_range, 0.1539, 1e-12);
  EXPECT_EQ(runs[2].length(), 1);
  EXPECT_EQ(runs[2].alpha_range, 0.0);

  const auto pick = select_alpha_clustering(layers, alphas);
  EXPECT_EQ(pick.k, 5);
  EXPECT_EQ(pick.layer_first, 3);
  EXPECT_EQ(pick.layer_last, 5);
  EXPECT_EQ(pick.labels.labels, layers[2].labels.labels);
}

TEST(StableRuns, SameKButDifferentLabelsBreaksRun) {
  auto layers = layers_with_k({2, 2, 2});
  for (auto& v : layers[1].labels.labels) v = 0;
  for (int i = 0; i < 30; ++i) layers[1].labels.labels[i] = 1;
  const auto runs = stable_runs(layers, std::vector<double>{1.0, 0.5, 0.25});
  EXPECT_EQ(runs.size(), 3u);
}

TEST(StableRuns, RangesNeverExceedSpan) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> ks(12);
    for (auto& k : ks) k = pick(rng);
    std::vector<double> alphas(12);
    for (int l = 0; l < 12; ++l) alphas[l] = std::pow(0.8, l);
    const auto runs = stable_runs(layers_with_k(ks), alphas);
    double total = 0.0;
    int covered = 0;
    for (const auto& r : runs) {
      total += r.alpha_range;
      covered += r.length();
      EXPECT_GE(r.alpha_range, 0.0);
    }
    EXPECT_EQ(covered, 12);
    EXPECT_LE(total, alphas.front() - alphas.back() + 1e-12);
  }
}

TEST(StableRuns, TiesGoToEarlierRun) {
  const auto layers = layers_with_k({2, 2, 4, 4});
  const auto pick = select_alpha_clustering(layers, std::vector<double>{1.0, 0.75, 0.5, 0.25});
  EXPECT_EQ(pick.k, 2);
  EXPECT_EQ(pick.layer_first, 1);
}

TEST(StableRuns, AllSingletonsFallBackToFirstLayer) {
  const auto layers = layers_with_k({1, 2, 3, 4});
  const auto pick = select_alpha_clustering(layers, std::vector<double>{1.0, 0.5, 0.25, 0.125});
  EXPECT_EQ(pick.layer_first, 1);
  EXPECT_EQ(pick.k, 1);
  EXPECT_EQ(pick.alpha_range, 0.0);
}

TEST(StableRuns, InputsChecked) {
  const auto layers = layers_with_k({2, 2});
  EXPECT_THROW(stable_runs(layers, std::vector<double>{1.0}), ParameterError);
  EXPECT_THROW(stable_runs(layers_with_k({2}), std::vector<double>{1.0}), ParameterError);
}

TEST(Summary, ListsRuns) {
  const auto layers = layers_with_k({3, 3, 5});
  const std::vector<double> alphas = {1.0, 0.5, 0.25};
  const auto runs = stable_runs(layers, alphas);
  const auto text = format_summary(select_alpha_clustering(layers, alphas), runs);
  EXPECT_NE(text.find("k=3\n"), std::string::npos);
  EXPECT_NE(text.find("n_runs=2\n"), std::string::npos);
  EXPECT_NE(text.find("run.1=3-3 k=5"), std::string::npos);
}
