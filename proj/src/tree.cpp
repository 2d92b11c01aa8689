#include "treesne/tree.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

#include "treesne/error.hpp"

namespace treesne {

LayerSchedule make_schedule(Eigen::Index n_points, int n_layers, double alpha_floor) {
  if (n_layers < 2) throw ParameterError("n_layers must be >= 2, got " + std::to_string(n_layers));
  if (!(alpha_floor > 0.0 && alpha_floor < 1.0)) {
    throw ParameterError("alpha_floor must be in (0, 1), got " + std::to_string(alpha_floor));
  }
  if (n_points < 2) throw ParameterError("schedule needs at least 2 points");

  LayerSchedule s;
  s.n_layers = n_layers;
  s.alpha_floor = alpha_floor;
  s.r = std::exp(std::log(alpha_floor) / n_layers);
  s.alphas.resize(static_cast<std::size_t>(n_layers));
  s.perplexities.resize(static_cast<std::size_t>(n_layers));
  s.alphas[0] = 1.0;
  s.perplexities[0] = std::sqrt(static_cast<double>(n_points));
  for (std::size_t l = 1; l < s.alphas.size(); ++l) {
    s.alphas[l] = s.r * s.alphas[l - 1];
    s.perplexities[l] = std::pow(s.perplexities[l - 1], s.r);
  }
  return s;
}

std::vector<double> TreeEmbedding::alphas() const {
  std::vector<double> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) out.push_back(layer.alpha);
  return out;
}

TreeConfig default_tree_config(Eigen::Index n_points, std::uint64_t seed) {
  TreeConfig cfg;
  cfg.seed = seed;
  const double n = static_cast<double>(n_points);

  cfg.first_layer.iterations = 1000;
  cfg.first_layer.early_iterations = 250;
  cfg.first_layer.early_exaggeration = 12.0;
  cfg.first_layer.exaggeration = 12.0;
  cfg.first_layer.learning_rate = n / cfg.first_layer.early_exaggeration;
  cfg.first_layer.momentum_start = 0.5;
  cfg.first_layer.momentum_late = 0.8;
  cfg.first_layer.seed = seed;

  cfg.later_layers = cfg.first_layer;
  cfg.later_layers.iterations = 250;
  cfg.later_layers.early_iterations = 0;
  cfg.later_layers.early_exaggeration = cfg.later_layers.exaggeration;
  cfg.later_layers.learning_rate = 0.1 * n / 12.0;
  return cfg;
}

double effective_perplexity(double scheduled, Eigen::Index n_points, double perplexity_floor) {
  const double ceiling = max_feasible_perplexity(n_points);
  return std::max(perplexity_floor, std::min(scheduled, ceiling));
}

TreeEmbedding build_tree(const DataMatrix& data, const LayerSchedule& schedule, const TreeConfig& cfg) {
  validate(data);
  const Eigen::Index n = data.rows();
  if (n < 10) throw ParameterError("build_tree needs at least 10 points, got " + std::to_string(n));
  if (schedule.alphas.size() != static_cast<std::size_t>(schedule.n_layers) ||
      schedule.perplexities.size() != schedule.alphas.size() || schedule.n_layers < 1) {
    throw ParameterError("malformed layer schedule");
  }
  if (!(cfg.perplexity_floor > 1.0)) throw ParameterError("perplexity_floor must be > 1");
  if (max_feasible_perplexity(n) < cfg.perplexity_floor) {
    throw ParameterError("too few points for perplexity floor " + std::to_string(cfg.perplexity_floor));
  }
  cfg.first_layer.validate();
  cfg.later_layers.validate();

  TreeEmbedding tree;
  tree.n = n;

  // One neighbor search sized for the largest perplexity; later layers
  // recalibrate bandwidths over the same lists.
  const double top_perplexity = effective_perplexity(schedule.perplexities.front(), n, cfg.perplexity_floor);
  const NeighborLists neighbors = knn(data, support_size(top_perplexity, n));

  Embedding1D<double> coords(n);
  {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, cfg.init_std);
    for (Eigen::Index i = 0; i < n; ++i) coords(i) = gauss(rng);
  }

  for (int l = 0; l < schedule.n_layers; ++l) {
    const int layer_number = l + 1;
    const double scheduled = schedule.perplexities[static_cast<std::size_t>(l)];
    const double perplexity = effective_perplexity(scheduled, n, cfg.perplexity_floor);
    if (perplexity != scheduled) {
      tree.warnings.push_back("layer " + std::to_string(layer_number) + ": perplexity " + std::to_string(scheduled) +
                              " clamped to " + std::to_string(perplexity));
    }
    const Bandwidths bandwidths = calibrate_bandwidths(neighbors, perplexity);
    if (!bandwidths.converged()) {
      tree.warnings.push_back("layer " + std::to_string(layer_number) + ": bandwidth search did not converge for " +
                              std::to_string(bandwidths.unconverged.size()) + " points");
    }
    const AffinityMatrix P = build_affinities(neighbors, bandwidths, perplexity);
    const KernelParam<double> param(schedule.alphas[static_cast<std::size_t>(l)]);
    const OptimizerConfig& opt = l == 0 ? cfg.first_layer : cfg.later_layers;
    try {
      coords = optimize(P, coords, param, opt);
    } catch (const ComputationError& e) {
      throw ComputationError("layer " + std::to_string(layer_number) + ": " + e.what());
    }
    tree.layers.push_back({coords, param.alpha(), perplexity, layer_number});
  }
  return tree;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

std::string format_tree_csv(const TreeEmbedding& tree, const std::vector<LabelVector>* layer_labels) {
  if (layer_labels && layer_labels->size() != tree.layers.size()) {
    throw ParameterError("per-layer label count does not match layer count");
  }
  std::string out = "layer,point_index,coord,alpha,perplexity";
  if (layer_labels) out += ",cluster_label";
  out += '\n';
  for (std::size_t l = 0; l < tree.layers.size(); ++l) {
    const Layer& layer = tree.layers[l];
    if (layer_labels && static_cast<Eigen::Index>((*layer_labels)[l].size()) != tree.n) {
      throw ParameterError("per-layer labels have wrong length");
    }
    for (Eigen::Index i = 0; i < tree.n; ++i) {
      out += std::to_string(layer.index);
      out += ',';
      out += std::to_string(i);
      out += ',';
      append_double(out, layer.coords(i));
      out += ',';
      append_double(out, layer.alpha);
      out += ',';
      append_double(out, layer.perplexity);
      if (layer_labels) {
        out += ',';
        out += std::to_string((*layer_labels)[l][static_cast<std::size_t>(i)]);
      }
      out += '\n';
    }
  }
  return out;
}

void save_tree_csv(const std::filesystem::path& path, const TreeEmbedding& tree,
                   const std::vector<LabelVector>* layer_labels) {
  const std::string text = format_tree_csv(tree, layer_labels);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

ParsedTree parse_tree_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("tree csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_labels = false;
  if (line == "layer,point_index,coord,alpha,perplexity,cluster_label") {
    with_labels = true;
  } else if (line != "layer,point_index,coord,alpha,perplexity") {
    throw ParseError("tree csv: unexpected header '" + line + "'");
  }

  struct Row {
    long layer;
    long point;
    double coord;
    double alpha;
    double perplexity;
    int label;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto c = rest.find(',');
      fields.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    const std::size_t expected = with_labels ? 6 : 5;
    const auto fail = [&]() -> ParseError { return ParseError("tree csv line " + std::to_string(line_no) + ": malformed row"); };
    if (fields.size() != expected) throw fail();
    Row r{};
    auto parse = [&](std::string_view f, auto& v) {
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) throw fail();
    };
    parse(fields[0], r.layer);
    parse(fields[1], r.point);
    parse(fields[2], r.coord);
    parse(fields[3], r.alpha);
    parse(fields[4], r.perplexity);
    if (with_labels) parse(fields[5], r.label);
    if (!std::isfinite(r.coord) || !std::isfinite(r.alpha) || !std::isfinite(r.perplexity)) throw fail();
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError("tree csv: no rows");

  // Rows must be grouped by layer 1..L with points 0..N-1 in order.
  ParsedTree parsed;
  TreeEmbedding& tree = parsed.tree;
  std::size_t pos = 0;
  while (pos < rows.size()) {
    const long layer_no = rows[pos].layer;
    if (layer_no != static_cast<long>(tree.layers.size()) + 1) {
      throw ParseError("tree csv: layers must be numbered consecutively from 1");
    }
    std::size_t end = pos;
    while (end < rows.size() && rows[end].layer == layer_no) ++end;
    const auto count = static_cast<Eigen::Index>(end - pos);
    if (tree.layers.empty()) {
      tree.n = count;
    } else if (count != tree.n) {
      throw ParseError("tree csv: layer " + std::to_string(layer_no) + " has " + std::to_string(count) +
                       " points, expected " + std::to_string(tree.n));
    }
    Layer layer;
    layer.index = static_cast<int>(layer_no);
    layer.alpha = rows[pos].alpha;
    layer.perplexity = rows[pos].perplexity;
    layer.coords.resize(count);
    LabelVector labels;
    for (std::size_t q = pos; q < end; ++q) {
      if (rows[q].point != static_cast<long>(q - pos)) throw ParseError("tree csv: point indices out of order");
      if (rows[q].alpha != layer.alpha || rows[q].perplexity != layer.perplexity) {
        throw ParseError("tree csv: alpha/perplexity vary within layer " + std::to_string(layer_no));
      }
      layer.coords(static_cast<Eigen::Index>(q - pos)) = rows[q].coord;
      if (with_labels) labels.labels.push_back(rows[q].label);
    }
    tree.layers.push_back(std::move(layer));
    if (with_labels) {
      if (!parsed.layer_labels) parsed.layer_labels.emplace();
      labels.name = "layer " + std::to_string(layer_no);
      parsed.layer_labels->push_back(std::move(labels));
    }
    pos = end;
  }
  return parsed;
}

ParsedTree load_tree_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": no such file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_tree_csv(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace treesne
