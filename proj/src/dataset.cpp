#include "treesne/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

#include "treesne/error.hpp"

namespace treesne {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": no such file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && !field.empty();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

DataMatrix parse_raw_f64(const std::string& bytes, const std::string& origin) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  if (bytes.size() < 16) throw ParseError(origin + ": raw matrix shorter than its 16-byte header");
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  std::memcpy(&n, bytes.data(), 8);
  std::memcpy(&d, bytes.data() + 8, 8);
  if (n == 0) throw ParseError(origin + ": no rows");
  if (d == 0 || n > (bytes.size() - 16) / 8 / d || bytes.size() != 16 + n * d * 8) {
    throw ParseError(origin + ": raw payload size does not match header " + std::to_string(n) + "x" +
                     std::to_string(d));
  }
  DataMatrix data;
  data.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::memcpy(data.values.data(), bytes.data() + 16, n * d * 8);
  return data;
}

}  // namespace

MatrixFormat parse_matrix_format(const std::string& name) {
  if (name == "csv") return MatrixFormat::kCsv;
  if (name == "raw-f64" || name == "raw") return MatrixFormat::kRawF64;
  throw ParameterError("unknown matrix format '" + name + "' (expected csv or raw-f64)");
}

void validate(const DataMatrix& data) {
  if (data.rows() < 2) throw ValidationError("matrix needs at least 2 rows, got " + std::to_string(data.rows()));
  if (data.cols() < 1) throw ValidationError("matrix needs at least 1 column");
  if (!data.row_ids.empty() && static_cast<Eigen::Index>(data.row_ids.size()) != data.rows()) {
    throw ValidationError("row_ids length does not match row count");
  }
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (!std::isfinite(data.values(i, j))) {
        throw ValidationError("non-finite value at (row " + std::to_string(i) + ", col " + std::to_string(j) + ")");
      }
    }
  }
}

DataMatrix parse_csv_matrix(const std::string& text) {
  const auto lines = split_lines(text);
  std::vector<double> flat;
  Eigen::Index n_cols = -1;
  Eigen::Index n_rows = 0;
  bool first = true;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = trim(lines[ln]);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t c = 0; c < fields.size(); ++c) numeric = numeric && parse_double(fields[c], row[c]);
    if (first) {
      first = false;
      if (!numeric) continue;  // header row
    }
    if (!numeric) {
      throw ParseError("line " + std::to_string(ln + 1) + ": malformed row (non-numeric field)");
    }
    if (n_cols < 0) n_cols = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw ParseError("line " + std::to_string(ln + 1) + ": expected " + std::to_string(n_cols) +
                       " fields, got " + std::to_string(row.size()));
    }
    flat.insert(flat.end(), row.begin(), row.end());
    ++n_rows;
  }
  if (n_rows == 0) throw ParseError("no rows");
  DataMatrix data;
  data.values = Eigen::Map<const RowMatrix>(flat.data(), n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      if (!std::isfinite(data.values(i, j))) {
        throw ValidationError("non-finite value at (row " + std::to_string(i) + ", col " + std::to_string(j) + ")");
      }
    }
  }
  return data;
}

DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  const std::string bytes = read_file(path);
  DataMatrix data;
  try {
    data = format == MatrixFormat::kCsv ? parse_csv_matrix(bytes) : parse_raw_f64(bytes, path.string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  validate(data);
  return data;
}

std::string format_csv_matrix(const DataMatrix& data) {
  std::string out;
  char buf[32];
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j > 0) out += ',';
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), data.values(i, j));
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

void save_matrix(const std::filesystem::path& path, const DataMatrix& data, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  if (format == MatrixFormat::kCsv) {
    out << format_csv_matrix(data);
  } else {
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(data.rows()));
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(data.cols()));
    out.write(reinterpret_cast<const char*>(data.values.data()),
              static_cast<std::streamsize>(data.values.size() * sizeof(double)));
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

LabelVector parse_labels(const std::string& text) {
  LabelVector out;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = trim(lines[ln]);
    if (line.empty()) continue;
    int value = 0;
    const char* end = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(line.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      throw ParseError("line " + std::to_string(ln + 1) + ": malformed label '" + std::string(line) + "'");
    }
    if (value < 0) throw ValidationError("line " + std::to_string(ln + 1) + ": negative label");
    out.labels.push_back(value);
  }
  return out;
}

LabelVector load_labels(const std::filesystem::path& path) {
  try {
    auto labels = parse_labels(read_file(path));
    labels.name = path.filename().string();
    return labels;
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_labels(const std::filesystem::path& path, const LabelVector& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  for (int l : labels.labels) out << l << '\n';
}

DataMatrix pca_reduce(const DataMatrix& data, Eigen::Index components) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (components < 1 || components > std::min(n, d)) {
    throw ParameterError("pca components must be in [1, " + std::to_string(std::min(n, d)) + "], got " +
                         std::to_string(components));
  }
  const Eigen::MatrixXd centered = data.values.rowwise() - data.values.colwise().mean();

  // Columns of `loadings` are unit principal axes, largest variance first.
  Eigen::MatrixXd loadings(d, components);
  if (d <= n) {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw ComputationError("pca: eigendecomposition failed");
    loadings = solver.eigenvectors().rightCols(components).rowwise().reverse();
  } else {
    // Wide data: diagonalize the N x N Gram matrix instead.
    const Eigen::MatrixXd gram = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw ComputationError("pca: eigendecomposition failed");
    for (Eigen::Index c = 0; c < components; ++c) {
      const Eigen::Index col = n - 1 - c;
      Eigen::VectorXd axis = centered.transpose() * solver.eigenvectors().col(col);
      const double norm = axis.norm();
      loadings.col(c) = norm > 0 ? Eigen::VectorXd(axis / norm) : Eigen::VectorXd::Unit(d, c);
    }
  }
  for (Eigen::Index c = 0; c < components; ++c) {
    Eigen::Index arg = 0;
    loadings.col(c).cwiseAbs().maxCoeff(&arg);
    if (loadings(arg, c) < 0) loadings.col(c) *= -1.0;
  }

  DataMatrix out;
  out.values = centered * loadings;
  out.row_ids = data.row_ids;
  return out;
}

DataMatrix subset_by_cluster(const DataMatrix& data, const LabelVector& labels, const std::set<int>& keep) {
  if (static_cast<Eigen::Index>(labels.size()) != data.rows()) {
    throw ParameterError("label count " + std::to_string(labels.size()) + " does not match row count " +
                         std::to_string(data.rows()));
  }
  if (keep.empty()) throw ParameterError("empty keep set");
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (keep.contains(labels[i])) rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (rows.empty()) throw ValidationError("empty subset");

  DataMatrix out;
  out.values = data.values(rows, Eigen::all);
  out.row_ids.reserve(rows.size());
  for (auto r : rows) out.row_ids.push_back(data.row_ids.empty() ? r : data.row_ids[r]);
  return out;
}

LabelVector subset_labels(const LabelVector& labels, const std::set<int>& keep) {
  LabelVector out;
  out.name = labels.name;
  for (int l : labels.labels) {
    if (keep.contains(l)) out.labels.push_back(l);
  }
  return out;
}

std::map<int, Eigen::VectorXd> cluster_mean_features(const DataMatrix& data, const LabelVector& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != data.rows()) {
    throw ParameterError("label count does not match row count");
  }
  std::map<int, Eigen::VectorXd> sums;
  std::map<int, Eigen::Index> counts;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    auto [it, inserted] = sums.try_emplace(labels[i], Eigen::VectorXd::Zero(data.cols()));
    it->second += data.values.row(i).transpose();
    ++counts[labels[i]];
  }
  for (auto& [label, sum] : sums) sum /= static_cast<double>(counts[label]);
  return sums;
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "gaussian-blobs") return SyntheticKind::kGaussianBlobs;
  if (name == "swiss-roll") return SyntheticKind::kSwissRoll;
  if (name == "uniform-noise") return SyntheticKind::kUniformNoise;
  if (name == "uniform-plane") return SyntheticKind::kUniformPlane;
  throw ParameterError("unknown synthetic kind '" + name + "'");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kGaussianBlobs: return "gaussian-blobs";
    case SyntheticKind::kSwissRoll: return "swiss-roll";
    case SyntheticKind::kUniformNoise: return "uniform-noise";
    case SyntheticKind::kUniformPlane: return "uniform-plane";
  }
  return "unknown";
}

std::pair<DataMatrix, LabelVector> generate_synthetic(SyntheticKind kind, const SyntheticParams& params) {
  const Eigen::Index n = params.n_points;
  const Eigen::Index d = params.dims;
  if (n < 2 || d < 1) throw ParameterError("synthetic data needs n_points >= 2 and dims >= 1");

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  DataMatrix data;
  data.values = RowMatrix::Zero(n, d);
  LabelVector labels;
  labels.labels.assign(static_cast<std::size_t>(n), 0);
  labels.name = to_string(kind);

  switch (kind) {
    case SyntheticKind::kGaussianBlobs: {
      const int k = params.n_blobs;
      if (k < 1 || params.blob_std <= 0 || params.separation <= 0) {
        throw ParameterError("gaussian-blobs needs n_blobs >= 1, blob_std > 0, separation > 0");
      }
      // Centroids pairwise exactly `separation` apart when there is room for a
      // scaled simplex; otherwise random centroids with rejection.
      Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, d);
      if (d >= k) {
        for (int c = 0; c < k; ++c) centroids(c, c) = params.separation / std::numbers::sqrt2;
      } else {
        const double box = params.separation * std::max(2.0, std::pow(static_cast<double>(k), 1.0 / d));
        std::uniform_real_distribution<double> coord(-box, box);
        for (int c = 0; c < k; ++c) {
          for (int attempt = 0;; ++attempt) {
            if (attempt > 100000) throw ParameterError("gaussian-blobs: cannot place separated centroids");
            for (Eigen::Index j = 0; j < d; ++j) centroids(c, j) = coord(rng);
            bool ok = true;
            for (int o = 0; o < c && ok; ++o) ok = (centroids.row(c) - centroids.row(o)).norm() >= params.separation;
            if (ok) break;
          }
        }
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const int c = static_cast<int>((i * k) / n);
        labels.labels[static_cast<std::size_t>(i)] = c;
        for (Eigen::Index j = 0; j < d; ++j) data.values(i, j) = centroids(c, j) + params.blob_std * gauss(rng);
      }
      break;
    }
    case SyntheticKind::kSwissRoll: {
      if (d < 3) throw ParameterError("swiss-roll needs dims >= 3");
      const double t_min = 1.5 * std::numbers::pi;
      const double t_max = 4.5 * std::numbers::pi;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double t = t_min + (t_max - t_min) * unit(rng);
        const double h = 21.0 * unit(rng);
        data.values(i, 0) = t * std::cos(t);
        data.values(i, 1) = h;
        data.values(i, 2) = t * std::sin(t);
        if (params.noise > 0) {
          for (Eigen::Index j = 0; j < 3; ++j) data.values(i, j) += params.noise * gauss(rng);
        }
        const int decile = static_cast<int>(10.0 * (t - t_min) / (t_max - t_min));
        labels.labels[static_cast<std::size_t>(i)] = std::clamp(decile, 0, 9);
      }
      break;
    }
    case SyntheticKind::kUniformNoise: {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) data.values(i, j) = unit(rng);
      }
      break;
    }
    case SyntheticKind::kUniformPlane: {
      if (d < 2) throw ParameterError("uniform-plane needs dims >= 2");
      Eigen::MatrixXd frame(d, 2);
      for (Eigen::Index j = 0; j < d; ++j) {
        frame(j, 0) = gauss(rng);
        frame(j, 1) = gauss(rng);
      }
      const Eigen::MatrixXd basis = Eigen::HouseholderQR<Eigen::MatrixXd>(frame).householderQ() *
                                    Eigen::MatrixXd::Identity(d, 2);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double u = unit(rng);
        const double v = unit(rng);
        data.values.row(i) = (u * basis.col(0) + v * basis.col(1)).transpose();
      }
      break;
    }
  }
  return {std::move(data), std::move(labels)};
}

}  // namespace treesne
