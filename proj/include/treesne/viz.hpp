#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "treesne/dataset.hpp"
#include "treesne/tree.hpp"

namespace treesne {

enum class ColorMode { kCategorical, kContinuous };

/// 20 fixed colors; label l is drawn with entry l mod 20.
const std::vector<std::string>& default_palette();

/// Control points of the continuous ramp, evenly spaced on [0, 1].
const std::vector<std::string>& viridis_stops();

struct PlotSpec {
  int width = 800;
  int height = 600;
  double margin = 20.0;
  double point_radius = 1.5;
  ColorMode color_mode = ColorMode::kCategorical;
  std::vector<std::string> palette = default_palette();
  std::string colormap = "viridis";
  // Scale x within each layer instead of across the whole tree.
  bool per_layer_x = false;
  std::string background = "#ffffff";

  void validate() const;
};

/// "#rrggbb" for t in [0, 1] (clamped), linear between ramp stops.
std::string colormap_color(const std::string& name, double t);

/// One strip per layer, layer 1 at the bottom, one circle per point. Every
/// layer uses the same per-point colors.
std::string render_tree(const TreeEmbedding& tree, const LabelVector& labels, const PlotSpec& spec = {});
std::string render_tree(const TreeEmbedding& tree, const Eigen::Ref<const Eigen::VectorXd>& feature,
                        const PlotSpec& spec = {});

/// Categorical plot where each layer is colored by its own labels.
std::string render_tree(const TreeEmbedding& tree, const std::vector<LabelVector>& layer_labels,
                        const PlotSpec& spec = {});

void save_svg(const std::filesystem::path& path, const std::string& svg);

}  // namespace treesne
