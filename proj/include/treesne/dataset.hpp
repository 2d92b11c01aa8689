#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace treesne {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N x D observation matrix, one observation per row.
///
/// `row_ids` is either empty or has one entry per row; subsetting fills it
/// with original row indices so that provenance survives repeated filtering.
struct DataMatrix {
  RowMatrix values;
  std::vector<std::int64_t> row_ids;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Integer label per row. Labels are nonnegative.
struct LabelVector {
  std::vector<int> labels;
  std::string name;

  std::size_t size() const { return labels.size(); }
  int operator[](std::size_t i) const { return labels[i]; }
};

enum class MatrixFormat { kCsv, kRawF64 };

MatrixFormat parse_matrix_format(const std::string& name);

/// Throws ValidationError unless N >= 2, D >= 1 and every value is finite.
void validate(const DataMatrix& data);

DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
DataMatrix parse_csv_matrix(const std::string& text);

void save_matrix(const std::filesystem::path& path, const DataMatrix& data, MatrixFormat format);
std::string format_csv_matrix(const DataMatrix& data);

LabelVector load_labels(const std::filesystem::path& path);
LabelVector parse_labels(const std::string& text);
void save_labels(const std::filesystem::path& path, const LabelVector& labels);

/// Projects mean-centered data onto its top principal components.
///
/// Components are ordered by decreasing variance. Each component's sign is
/// chosen so that its largest-magnitude loading is positive.
DataMatrix pca_reduce(const DataMatrix& data, Eigen::Index components);

DataMatrix subset_by_cluster(const DataMatrix& data, const LabelVector& labels,
                             const std::set<int>& keep);

LabelVector subset_labels(const LabelVector& labels, const std::set<int>& keep);

std::map<int, Eigen::VectorXd> cluster_mean_features(const DataMatrix& data,
                                                     const LabelVector& labels);

enum class SyntheticKind { kGaussianBlobs, kSwissRoll, kUniformNoise, kUniformPlane };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

struct SyntheticParams {
  Eigen::Index n_points = 1000;
  Eigen::Index dims = 10;
  int n_blobs = 5;
  double blob_std = 1.0;
  double separation = 20.0;
  double noise = 0.0;  // swiss-roll only
  std::uint64_t seed = 0;
};

std::pair<DataMatrix, LabelVector> generate_synthetic(SyntheticKind kind,
                                                      const SyntheticParams& params);

}  // namespace treesne
