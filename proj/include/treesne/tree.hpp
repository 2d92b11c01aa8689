#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "treesne/dataset.hpp"
#include "treesne/embed1d.hpp"

namespace treesne {

/// Geometric (alpha, perplexity) schedule for the layer stack.
///
/// alphas[0] = 1 and alphas[l+1] = r * alphas[l] with r = alpha_floor^(1/n_layers);
/// perplexities[0] = sqrt(N) and perplexities[l+1] = perplexities[l]^r.
/// The perplexities here are the raw schedule; build_tree clamps them to the
/// feasible range before calibrating.
struct LayerSchedule {
  int n_layers = 0;
  double r = 0.0;
  double alpha_floor = 0.01;
  std::vector<double> alphas;
  std::vector<double> perplexities;
};

LayerSchedule make_schedule(Eigen::Index n_points, int n_layers, double alpha_floor = 0.01);

struct Layer {
  Embedding1D<double> coords;
  double alpha = 1.0;
  double perplexity = 0.0;  // effective perplexity used for calibration
  int index = 1;            // 1-based, layer 1 at the bottom
};

struct TreeEmbedding {
  std::vector<Layer> layers;
  Eigen::Index n = 0;
  std::vector<std::string> warnings;

  std::vector<double> alphas() const;
};

/// Optimizer policies for the first layer and for every later layer.
struct TreeConfig {
  OptimizerConfig first_layer;
  OptimizerConfig later_layers;
  double perplexity_floor = 2.0;
  double init_std = 1e-4;
  std::uint64_t seed = 0;
};

/// First layer: 1000 iterations, early exaggeration 12 for 250 of them,
/// learning rate N/12. Later layers: 250 iterations at learning rate
/// 0.1 * N/12 without early exaggeration. Constant exaggeration 12 and
/// momentum 0.5 -> 0.8 throughout.
TreeConfig default_tree_config(Eigen::Index n_points, std::uint64_t seed = 0);

/// Perplexity actually used for a scheduled value: clamped to
/// [perplexity_floor, (N - 1) / 3].
double effective_perplexity(double scheduled, Eigen::Index n_points, double perplexity_floor);

TreeEmbedding build_tree(const DataMatrix& data, const LayerSchedule& schedule, const TreeConfig& cfg);

/// Tree CSV: `layer,point_index,coord,alpha,perplexity[,cluster_label]`,
/// one row per point per layer, doubles in shortest round-trip form.
std::string format_tree_csv(const TreeEmbedding& tree,
                            const std::vector<LabelVector>* layer_labels = nullptr);
void save_tree_csv(const std::filesystem::path& path, const TreeEmbedding& tree,
                   const std::vector<LabelVector>* layer_labels = nullptr);

struct ParsedTree {
  TreeEmbedding tree;
  std::optional<std::vector<LabelVector>> layer_labels;
};

ParsedTree parse_tree_csv(const std::string& text);
ParsedTree load_tree_csv(const std::filesystem::path& path);

}  // namespace treesne
