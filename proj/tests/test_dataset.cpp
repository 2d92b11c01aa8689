#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "treesne/dataset.hpp"
#include "treesne/error.hpp"

using namespace treesne;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("treesne_test_" + name);
}

DataMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  DataMatrix d;
  d.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return d;
}

}  // namespace

TEST(CsvMatrix, ParsesPlainRows) {
  const auto d = parse_csv_matrix("1,2\n3,4\n5,6\n");
  ASSERT_EQ(d.rows(), 3);
  ASSERT_EQ(d.cols(), 2);
  EXPECT_EQ(d.values(2, 1), 6.0);
}

TEST(CsvMatrix, SkipsHeaderLine) {
  const auto d = parse_csv_matrix("a,b\n1,2\n3,4\n");
  EXPECT_EQ(d.rows(), 2);
  EXPECT_EQ(d.values(0, 0), 1.0);
}

TEST(CsvMatrix, RaggedRowReportsLine) {
  try {
    parse_csv_matrix("1,2\n3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(CsvMatrix, NonFiniteRejected) {
  try {
    parse_csv_matrix("1,2\nnan,4\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1, col 0"), std::string::npos);
  }
}

TEST(CsvMatrix, EmptyInputIsError) { EXPECT_THROW(parse_csv_matrix("\n\n"), ParseError); }

TEST(CsvMatrix, RoundTripIsExact) {
  DataMatrix d;
  d.values = RowMatrix::Random(7, 3) * 1e3;
  d.values(0, 0) = 0.1;
  const auto back = parse_csv_matrix(format_csv_matrix(d));
  EXPECT_EQ(back.values, d.values);
}

TEST(RawMatrix, RoundTripIsExact) {
  DataMatrix d;
  d.values = RowMatrix::Random(5, 4);
  const auto path = temp_path("raw.bin");
  save_matrix(path, d, MatrixFormat::kRawF64);
  EXPECT_EQ(std::filesystem::file_size(path), 16u + 5 * 4 * 8);
  const auto back = load_matrix(path, MatrixFormat::kRawF64);
  EXPECT_EQ(back.values, d.values);
  std::filesystem::remove(path);
}

TEST(LoadMatrix, MissingFileIsIoError) {
  try {
    load_matrix("/nonexistent/dir/x.csv", MatrixFormat::kCsv);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("no such file"), std::string::npos);
  }
}

TEST(Validate, SingleRowRejected) {
  DataMatrix d;
  d.values = RowMatrix::Zero(1, 3);
  EXPECT_THROW(validate(d), ValidationError);
}

TEST(Labels, ParseAndReject) {
  EXPECT_EQ(parse_labels("0\n2\n1\n").labels, (std::vector<int>{0, 2, 1}));
  EXPECT_THROW(parse_labels("0\nx\n"), ParseError);
  EXPECT_THROW(parse_labels("-1\n"), ValidationError);
}

TEST(Pca, MatchesJacobiOracle) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 40;
  const int dim = 5;
  DataMatrix d;
  d.values.resize(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) d.values(i, j) = g(rng) * (j + 1) + (j == 2 ? 0.5 * d.values(i, 0) : 0.0);

  // Oracle: covariance eigenvectors by Jacobi rotations.
  std::vector<double> mean(dim, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) mean[j] += d.values(i, j) / n;
  oracle::Matrix cov(dim, std::vector<double>(dim, 0.0));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) cov[a][b] += (d.values(i, a) - mean[a]) * (d.values(i, b) - mean[b]) / (n - 1);
  const auto [values, vectors] = oracle::jacobi_eigen(cov);

  const auto reduced = pca_reduce(d, 3);
  ASSERT_EQ(reduced.cols(), 3);
  for (int c = 0; c < 3; ++c) {
    std::vector<double> axis(dim);
    int biggest = 0;
    for (int j = 0; j < dim; ++j) {
      axis[j] = vectors[j][c];
      if (std::abs(axis[j]) > std::abs(axis[biggest])) biggest = j;
    }
    const double sign = axis[biggest] > 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) {
      double proj = 0.0;
      for (int j = 0; j < dim; ++j) proj += (d.values(i, j) - mean[j]) * axis[j] * sign;
      EXPECT_NEAR(reduced.values(i, c), proj, 1e-8);
    }
  }
}

TEST(Pca, WideDataMatchesTallPath) {
  DataMatrix d;
  d.values = RowMatrix::Random(6, 10);
  const auto reduced = pca_reduce(d, 4);
  // Column variances equal the top eigenvalues of the covariance.
  const Eigen::MatrixXd centered = d.values.rowwise() - d.values.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 5.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  for (int c = 0; c < 4; ++c) {
    const double var = reduced.values.col(c).squaredNorm() / 5.0;
    EXPECT_NEAR(var, es.eigenvalues()(9 - c), 1e-9);
  }
}

TEST(Pca, VariancesNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticParams p;
    p.n_points = 50;
    p.dims = 8;
    p.seed = seed;
    const auto [d, l] = generate_synthetic(SyntheticKind::kGaussianBlobs, p);
    const auto r = pca_reduce(d, 6);
    for (int c = 1; c < 6; ++c) {
      EXPECT_LE(r.values.col(c).squaredNorm(), r.values.col(c - 1).squaredNorm() * (1 + 1e-12));
    }
  }
}

TEST(Pca, ComponentCountChecked) {
  DataMatrix d;
  d.values = RowMatrix::Random(5, 3);
  EXPECT_THROW(pca_reduce(d, 4), ParameterError);
  EXPECT_THROW(pca_reduce(d, 0), ParameterError);
}

TEST(Subset, KeepsSelectedClustersAndIds) {
  const auto d = from_rows({{0}, {1}, {2}, {3}, {4}});
  LabelVector l{{0, 1, 2, 1, 0}, "l"};
  const auto s = subset_by_cluster(d, l, {1});
  ASSERT_EQ(s.rows(), 2);
  EXPECT_EQ(s.values(0, 0), 1.0);
  EXPECT_EQ(s.values(1, 0), 3.0);
  EXPECT_EQ(s.row_ids, (std::vector<std::int64_t>{1, 3}));
  const auto again = subset_by_cluster(s, LabelVector{{5, 6}, ""}, {6});
  EXPECT_EQ(again.row_ids, (std::vector<std::int64_t>{3}));
  EXPECT_EQ(subset_labels(l, {0, 2}).labels, (std::vector<int>{0, 2, 0}));
}

TEST(Means, PerClusterAverages) {
  const auto d = from_rows({{1, 10}, {3, 20}, {5, 30}});
  const auto m = cluster_mean_features(d, LabelVector{{0, 0, 4}, ""});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.at(0)(0), 2.0);
  EXPECT_DOUBLE_EQ(m.at(0)(1), 15.0);
  EXPECT_DOUBLE_EQ(m.at(4)(1), 30.0);  // singleton cluster is the row itself
}

TEST(Means, LengthMismatchRejected) {
  const auto d = from_rows({{1}, {2}});
  EXPECT_ANY_THROW(cluster_mean_features(d, LabelVector{{0}, ""}));
}

TEST(Synthetic, UniformNoiseInUnitCube) {
  SyntheticParams p;
  p.n_points = 5000;
  p.dims = 100;
  p.seed = 9;
  const auto [d, l] = generate_synthetic(SyntheticKind::kUniformNoise, p);
  EXPECT_GE(d.values.minCoeff(), 0.0);
  EXPECT_LT(d.values.maxCoeff(), 1.0);
  for (int v : l.labels) EXPECT_EQ(v, 0);
}

TEST(Synthetic, BlobsAreSeparatedAndLabeled) {
  SyntheticParams p;
  p.n_points = 500;
  p.dims = 10;
  p.seed = 1;
  const auto [d, l] = generate_synthetic(SyntheticKind::kGaussianBlobs, p);
  std::map<int, Eigen::VectorXd> centers = cluster_mean_features(d, l);
  ASSERT_EQ(centers.size(), 5u);
  for (const auto& [a, ca] : centers)
    for (const auto& [b, cb] : centers)
      if (a < b) EXPECT_GE((ca - cb).norm(), 18.0);
}

TEST(Synthetic, SwissRollLabelsFollowPosition) {
  SyntheticParams p;
  p.n_points = 300;
  p.dims = 3;
  p.seed = 2;
  const auto [d, l] = generate_synthetic(SyntheticKind::kSwissRoll, p);
  EXPECT_EQ(d.cols(), 3);
  std::set<int> distinct(l.labels.begin(), l.labels.end());
  EXPECT_EQ(distinct.size(), 10u);
}

TEST(Synthetic, PlaneHasRankTwo) {
  SyntheticParams p;
  p.n_points = 200;
  p.dims = 20;
  p.seed = 4;
  const auto [d, l] = generate_synthetic(SyntheticKind::kUniformPlane, p);
  const Eigen::MatrixXd centered = d.values.rowwise() - d.values.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  EXPECT_GT(svd.singularValues()(1), 1e-3);
  EXPECT_LT(svd.singularValues()(2), 1e-9);
}

TEST(Synthetic, DeterministicPerSeed) {
  SyntheticParams p;
  p.n_points = 100;
  p.seed = 7;
  const auto a = generate_synthetic(SyntheticKind::kGaussianBlobs, p);
  const auto b = generate_synthetic(SyntheticKind::kGaussianBlobs, p);
  EXPECT_EQ(a.first.values, b.first.values);
  EXPECT_THROW(parse_synthetic_kind("spiral"), ParameterError);
}
