#include "treesne/viz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "treesne/error.hpp"

namespace treesne {
namespace {

std::array<int, 3> parse_hex(const std::string& color) {
  unsigned r = 0;
  unsigned g = 0;
  unsigned b = 0;
  if (color.size() != 7 || color[0] != '#' || std::sscanf(color.c_str() + 1, "%2x%2x%2x", &r, &g, &b) != 3) {
    throw ParameterError("bad color '" + color + "', expected #rrggbb");
  }
  return {static_cast<int>(r), static_cast<int>(g), static_cast<int>(b)};
}

std::string to_hex(const std::array<int, 3>& rgb) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

// Maps values to [lo, hi]; a constant range goes to the midpoint.
struct Scale {
  double vmin = 0.0;
  double vmax = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  double operator()(double v) const {
    if (!(vmax > vmin)) return 0.5 * (lo + hi);
    return lo + (v - vmin) / (vmax - vmin) * (hi - lo);
  }
};

// Per-layer, per-point fill colors.
using FillFn = std::string (*)(const void*, std::size_t layer, Eigen::Index point);

std::string render(const TreeEmbedding& tree, const PlotSpec& spec, const void* ctx, FillFn fill) {
  spec.validate();
  if (tree.layers.empty() || tree.n < 1) throw ParameterError("render_tree: empty tree");

  const double x_lo = spec.margin;
  const double x_hi = spec.width - spec.margin;
  const double y_bottom = spec.height - spec.margin;
  const double y_top = spec.margin;
  const auto n_layers = tree.layers.size();

  Scale global{HUGE_VAL, -HUGE_VAL, x_lo, x_hi};
  for (const auto& layer : tree.layers) {
    if (layer.coords.size() != tree.n) throw ParameterError("render_tree: layer size mismatch");
    global.vmin = std::min(global.vmin, layer.coords.minCoeff());
    global.vmax = std::max(global.vmax, layer.coords.maxCoeff());
  }

  std::string out;
  char buf[160];
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                spec.width, spec.height, spec.width, spec.height);
  out += buf;
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" fill=\"" + spec.background + "\"/>\n";

  for (std::size_t l = 0; l < n_layers; ++l) {
    const Layer& layer = tree.layers[l];
    Scale x = global;
    if (spec.per_layer_x) {
      x.vmin = layer.coords.minCoeff();
      x.vmax = layer.coords.maxCoeff();
    }
    const double y = n_layers == 1 ? 0.5 * (y_bottom + y_top)
                                   : y_bottom - (y_bottom - y_top) * static_cast<double>(l) /
                                                    static_cast<double>(n_layers - 1);
    std::snprintf(buf, sizeof(buf), "<g id=\"layer-%d\" stroke=\"none\">\n", layer.index);
    out += buf;
    for (Eigen::Index i = 0; i < tree.n; ++i) {
      std::snprintf(buf, sizeof(buf), "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"%s\"/>\n",
                    x(layer.coords(i)), y, spec.point_radius, fill(ctx, l, i).c_str());
      out += buf;
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

struct LabelCtx {
  const LabelVector* labels;
  const std::vector<std::string>* palette;
};

struct LayerLabelCtx {
  const std::vector<LabelVector>* labels;
  const std::vector<std::string>* palette;
};

struct FeatureCtx {
  std::vector<std::string> colors;
};

const std::string& cycle(const std::vector<std::string>& palette, int label) {
  const auto size = static_cast<long>(palette.size());
  const long idx = ((label % size) + size) % size;
  return palette[static_cast<std::size_t>(idx)];
}

}  // namespace

const std::vector<std::string>& default_palette() {
  static const std::vector<std::string> colors = {
      "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
      "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff", "#9a6324", "#fffac8",
      "#800000", "#aaffc3", "#808000", "#ffd8b1", "#000075", "#808080"};
  return colors;
}

const std::vector<std::string>& viridis_stops() {
  static const std::vector<std::string> stops = {"#440154", "#472d7b", "#3b528b", "#2c728e", "#21918c",
                                                 "#28ae80", "#5ec962", "#addc30", "#fde725"};
  return stops;
}

void PlotSpec::validate() const {
  if (width <= 0 || height <= 0) throw ParameterError("plot width and height must be positive");
  if (!(margin >= 0) || 2 * margin >= width || 2 * margin >= height) throw ParameterError("plot margin too large");
  if (!(point_radius > 0)) throw ParameterError("point_radius must be positive");
  if (color_mode == ColorMode::kCategorical && palette.empty()) throw ParameterError("palette is empty");
  for (const auto& c : palette) parse_hex(c);
  parse_hex(background);
  if (colormap != "viridis") throw ParameterError("unknown colormap '" + colormap + "'");
}

std::string colormap_color(const std::string& name, double t) {
  if (name != "viridis") throw ParameterError("unknown colormap '" + name + "'");
  const auto& stops = viridis_stops();
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * static_cast<double>(stops.size() - 1);
  const auto seg = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
  const double f = pos - static_cast<double>(seg);
  const auto a = parse_hex(stops[seg]);
  const auto b = parse_hex(stops[seg + 1]);
  std::array<int, 3> rgb{};
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(a[c] + f * (b[c] - a[c])));
  return to_hex(rgb);
}

std::string render_tree(const TreeEmbedding& tree, const LabelVector& labels, const PlotSpec& spec) {
  if (static_cast<Eigen::Index>(labels.size()) != tree.n) {
    throw ParameterError("render_tree: " + std::to_string(labels.size()) + " labels for " + std::to_string(tree.n) +
                         " points");
  }
  if (spec.color_mode != ColorMode::kCategorical) throw ParameterError("render_tree: labels need categorical mode");
  const LabelCtx ctx{&labels, &spec.palette};
  return render(tree, spec, &ctx, [](const void* p, std::size_t, Eigen::Index i) {
    const auto* c = static_cast<const LabelCtx*>(p);
    return cycle(*c->palette, (*c->labels)[static_cast<std::size_t>(i)]);
  });
}

std::string render_tree(const TreeEmbedding& tree, const std::vector<LabelVector>& layer_labels,
                        const PlotSpec& spec) {
  if (layer_labels.size() != tree.layers.size()) throw ParameterError("render_tree: one label vector per layer");
  for (const auto& l : layer_labels) {
    if (static_cast<Eigen::Index>(l.size()) != tree.n) throw ParameterError("render_tree: label length mismatch");
  }
  if (spec.color_mode != ColorMode::kCategorical) throw ParameterError("render_tree: labels need categorical mode");
  const LayerLabelCtx ctx{&layer_labels, &spec.palette};
  return render(tree, spec, &ctx, [](const void* p, std::size_t layer, Eigen::Index i) {
    const auto* c = static_cast<const LayerLabelCtx*>(p);
    return cycle(*c->palette, (*c->labels)[layer][static_cast<std::size_t>(i)]);
  });
}

std::string render_tree(const TreeEmbedding& tree, const Eigen::Ref<const Eigen::VectorXd>& feature,
                        const PlotSpec& spec) {
  if (feature.size() != tree.n) {
    throw ParameterError("render_tree: " + std::to_string(feature.size()) + " feature values for " +
                         std::to_string(tree.n) + " points");
  }
  if (!feature.allFinite()) throw ParameterError("render_tree: feature has non-finite values");
  if (spec.color_mode != ColorMode::kContinuous) throw ParameterError("render_tree: feature needs continuous mode");
  spec.validate();
  const Scale norm{feature.minCoeff(), feature.maxCoeff(), 0.0, 1.0};
  FeatureCtx ctx;
  ctx.colors.reserve(static_cast<std::size_t>(feature.size()));
  for (Eigen::Index i = 0; i < feature.size(); ++i) ctx.colors.push_back(colormap_color(spec.colormap, norm(feature(i))));
  return render(tree, spec, &ctx, [](const void* p, std::size_t, Eigen::Index i) {
    return static_cast<const FeatureCtx*>(p)->colors[static_cast<std::size_t>(i)];
  });
}

void save_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << svg;
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace treesne
