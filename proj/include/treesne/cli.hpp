#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "treesne/cluster.hpp"
#include "treesne/tree.hpp"

namespace treesne {

/// Every tunable of an embed/cluster run. Serialized as flat `key=value`
/// lines; the same format is read back from config files and manifests.
struct RunConfig {
  std::string input;
  std::string format = "csv";
  std::string labels;
  long pca_components = 0;  // 0 = no PCA
  int n_layers = 30;
  double alpha_floor = 0.01;
  double perplexity_floor = 2.0;
  double init_std = 1e-4;
  std::uint64_t seed = 0;

  std::string repulsion = "exact";
  long grid_size = 64;
  int first_iterations = 1000;
  int early_iterations = 250;
  int later_iterations = 250;
  double early_exaggeration = 12.0;
  double exaggeration = 12.0;
  std::string first_learning_rate = "auto";  // N / early_exaggeration
  std::string later_learning_rate = "auto";  // 0.1 N / 12
  double momentum_start = 0.5;
  double momentum_late = 0.8;
  bool adaptive_gains = true;

  double beta = 2.0;
  long subsample_cap = 2000;
  long knn_k = 10;
  double resolution = 1e-9;
  bool smooth = true;
  bool fixed_subsample = false;
  bool spectral = false;

  /// Throws ParameterError for unknown keys or unparsable values. Keys that
  /// only describe a finished run (r, n_points, ...) are accepted and ignored.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> values() const;
  void validate() const;

  TreeConfig tree_config(Eigen::Index n_points) const;
  ClusterConfig cluster_config() const;
};

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
void load_config_file(const std::filesystem::path& path, RunConfig& cfg);

/// Resolved settings plus derived values of an embed run.
std::string format_manifest(const RunConfig& cfg, Eigen::Index n_points, Eigen::Index n_dims);

/// Plain label file (one per line) or a `point_index,label` CSV.
LabelVector load_label_file(const std::filesystem::path& path);

/// Entry point of the `treesne` tool. Returns the process exit code:
/// 0 success, 1 computational failure, 2 usage or IO error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace treesne
