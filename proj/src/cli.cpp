#include "treesne/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "treesne/alphasel.hpp"
#include "treesne/dataset.hpp"
#include "treesne/error.hpp"
#include "treesne/viz.hpp"

namespace treesne {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ParameterError("config: bad value '" + text + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ParameterError("config: bad value '" + text + "' for " + key + " (expected true or false)");
}

struct Field {
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

template <typename T>
Field number_field(const std::string& key, T& ref) {
  return {[&ref, key](const std::string& v) { ref = parse_number<T>(key, v); },
          [&ref] {
            if constexpr (std::is_floating_point_v<T>) {
              return fmt(ref);
            } else {
              return std::to_string(ref);
            }
          }};
}

Field string_field(std::string& ref) {
  return {[&ref](const std::string& v) { ref = v; }, [&ref] { return ref; }};
}

Field bool_field(const std::string& key, bool& ref) {
  return {[&ref, key](const std::string& v) { ref = parse_bool(key, v); }, [&ref] { return ref ? "true" : "false"; }};
}

// Binds every key to a member of `c`. Const access goes through a copy.
std::map<std::string, Field> fields(RunConfig& c) {
  return {
      {"input", string_field(c.input)},
      {"format", string_field(c.format)},
      {"labels", string_field(c.labels)},
      {"pca_components", number_field("pca_components", c.pca_components)},
      {"n_layers", number_field("n_layers", c.n_layers)},
      {"alpha_floor", number_field("alpha_floor", c.alpha_floor)},
      {"perplexity_floor", number_field("perplexity_floor", c.perplexity_floor)},
      {"init_std", number_field("init_std", c.init_std)},
      {"seed", number_field("seed", c.seed)},
      {"repulsion", string_field(c.repulsion)},
      {"grid_size", number_field("grid_size", c.grid_size)},
      {"first_iterations", number_field("first_iterations", c.first_iterations)},
      {"early_iterations", number_field("early_iterations", c.early_iterations)},
      {"later_iterations", number_field("later_iterations", c.later_iterations)},
      {"early_exaggeration", number_field("early_exaggeration", c.early_exaggeration)},
      {"exaggeration", number_field("exaggeration", c.exaggeration)},
      {"first_learning_rate", string_field(c.first_learning_rate)},
      {"later_learning_rate", string_field(c.later_learning_rate)},
      {"momentum_start", number_field("momentum_start", c.momentum_start)},
      {"momentum_late", number_field("momentum_late", c.momentum_late)},
      {"adaptive_gains", bool_field("adaptive_gains", c.adaptive_gains)},
      {"beta", number_field("beta", c.beta)},
      {"subsample_cap", number_field("subsample_cap", c.subsample_cap)},
      {"knn_k", number_field("knn_k", c.knn_k)},
      {"resolution", number_field("resolution", c.resolution)},
      {"smooth", bool_field("smooth", c.smooth)},
      {"fixed_subsample", bool_field("fixed_subsample", c.fixed_subsample)},
      {"spectral", bool_field("spectral", c.spectral)},
  };
}

const std::set<std::string>& derived_keys() {
  static const std::set<std::string> keys = {"r", "n_points", "n_dims", "initial_perplexity"};
  return keys;
}

double learning_rate(const std::string& key, const std::string& text, double fallback) {
  return text == "auto" ? fallback : parse_number<double>(key, text);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": no such file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory (" + ec.message() + ")");
}

DataMatrix load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ParameterError("no input given");
  DataMatrix data = load_matrix(cfg.input, parse_matrix_format(cfg.format));
  validate(data);
  if (cfg.pca_components > 0) data = pca_reduce(data, cfg.pca_components);
  return data;
}

std::set<int> parse_keep(const std::string& text) {
  std::set<int> keep;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) keep.insert(parse_number<int>("keep", item));
  if (keep.empty()) throw ParameterError("keep list is empty");
  return keep;
}

// Options shared by commands that take a RunConfig.
struct ConfigOptions {
  std::vector<std::string> config_files;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;

  void add(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_files, "key=value config file or manifest (repeatable)");
    cmd->add_option("--set", sets, "override one setting, key=value (repeatable)");
  }

  // Files first, then named flags, then --set.
  RunConfig resolve(RunConfig cfg) const {
    for (const auto& f : config_files) load_config_file(f, cfg);
    for (const auto& [k, v] : flags) cfg.set(k, v);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

// Adds a flag that is recorded as a config override when given.
void config_flag(CLI::App* cmd, const std::string& name, const std::string& key, const std::string& help,
                 ConfigOptions& opts, std::map<std::string, std::string>& raw) {
  cmd->add_option(name, raw[key], help)->each([&opts, key](const std::string& v) { opts.flags.emplace_back(key, v); });
}

int cmd_generate(const std::string& kind, const SyntheticParams& params, const std::string& output,
                 const std::string& labels_output, const std::string& format, std::ostream& out) {
  const auto [data, labels] = generate_synthetic(parse_synthetic_kind(kind), params);
  save_matrix(output, data, parse_matrix_format(format));
  if (!labels_output.empty()) save_labels(labels_output, labels);
  out << "wrote " << data.rows() << " x " << data.cols() << " to " << output << "\n";
  return 0;
}

int cmd_embed(const RunConfig& cfg, const std::string& output_dir, std::ostream& out, std::ostream& err) {
  const DataMatrix data = load_input(cfg);
  const LayerSchedule schedule = make_schedule(data.rows(), cfg.n_layers, cfg.alpha_floor);
  const TreeEmbedding tree = build_tree(data, schedule, cfg.tree_config(data.rows()));
  for (const auto& w : tree.warnings) err << "warning: " << w << "\n";
  ensure_dir(output_dir);
  const std::filesystem::path dir(output_dir);
  save_tree_csv(dir / "tree.csv", tree);
  write_text(dir / "manifest.txt", format_manifest(cfg, data.rows(), data.cols()));
  out << "embedded " << data.rows() << " points in " << tree.layers.size() << " layers, r=" << fmt(schedule.r)
      << "\n";
  return 0;
}

int cmd_cluster(const RunConfig& cfg, const std::string& tree_path, std::string output_dir, std::ostream& out) {
  const ParsedTree parsed = load_tree_csv(tree_path);
  const TreeEmbedding& tree = parsed.tree;
  if (tree.layers.size() < 2) throw ParameterError("clustering needs at least 2 layers");
  if (output_dir.empty()) output_dir = std::filesystem::path(tree_path).parent_path().string();
  if (output_dir.empty()) output_dir = ".";
  ensure_dir(output_dir);
  const std::filesystem::path dir(output_dir);

  const auto clusterings = cluster_tree(tree, cfg.cluster_config());
  const auto alphas = tree.alphas();
  const auto runs = stable_runs(clusterings, alphas);
  const AlphaClustering selected = select_alpha_clustering(clusterings, alphas);

  std::vector<LabelVector> layer_labels;
  for (const auto& c : clusterings) layer_labels.push_back(c.labels);
  save_tree_csv(dir / "tree_labeled.csv", tree, &layer_labels);

  std::string labels_csv = "point_index,label\n";
  for (std::size_t i = 0; i < selected.labels.size(); ++i) {
    labels_csv += std::to_string(i) + "," + std::to_string(selected.labels[i]) + "\n";
  }
  write_text(dir / "alpha_labels.csv", labels_csv);

  std::string summary = format_summary(selected, runs);
  if (!cfg.labels.empty()) {
    const LabelVector truth = load_label_file(cfg.labels);
    if (truth.size() == selected.labels.size()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", nmi(selected.labels, truth));
      summary += std::string("nmi_labels=") + buf + "\n";
    }
  }
  write_text(dir / "alpha_summary.txt", summary);
  out << summary;
  return 0;
}

int cmd_nmi(const std::string& a, const std::string& b, std::ostream& out) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", nmi(load_label_file(a), load_label_file(b)));
  out << buf << "\n";
  return 0;
}

int cmd_subset(const std::string& input, const std::string& format, const std::string& labels_path,
               const std::string& keep_text, const std::string& output, const std::string& labels_output,
               std::ostream& out) {
  const MatrixFormat fmt_in = parse_matrix_format(format);
  const DataMatrix data = load_matrix(input, fmt_in);
  const LabelVector labels = load_label_file(labels_path);
  const auto keep = parse_keep(keep_text);
  const DataMatrix kept = subset_by_cluster(data, labels, keep);
  save_matrix(output, kept, fmt_in);
  if (!labels_output.empty()) save_labels(labels_output, subset_labels(labels, keep));
  out << "kept " << kept.rows() << " of " << data.rows() << " rows\n";
  return 0;
}

int cmd_means(const std::string& input, const std::string& format, const std::string& labels_path,
              const std::string& output, std::ostream& out) {
  const DataMatrix data = load_matrix(input, parse_matrix_format(format));
  const auto means = cluster_mean_features(data, load_label_file(labels_path));
  std::string text = "label";
  for (Eigen::Index j = 0; j < data.cols(); ++j) text += ",f" + std::to_string(j);
  text += "\n";
  for (const auto& [label, mean] : means) {
    text += std::to_string(label);
    for (Eigen::Index j = 0; j < mean.size(); ++j) text += "," + fmt(mean(j));
    text += "\n";
  }
  write_text(output, text);
  out << "wrote " << means.size() << " cluster means to " << output << "\n";
  return 0;
}

struct PlotArgs {
  std::string tree;
  std::string output;
  std::string labels;
  bool layer_labels = false;
  std::string feature;
  std::string feature_format = "csv";
  long column = 0;
  PlotSpec spec;
};

int cmd_plot(PlotArgs args, std::ostream& out) {
  const ParsedTree parsed = load_tree_csv(args.tree);
  std::string svg;
  if (!args.feature.empty()) {
    const DataMatrix data = load_matrix(args.feature, parse_matrix_format(args.feature_format));
    if (args.column < 0 || args.column >= data.cols()) {
      throw ParameterError("feature column " + std::to_string(args.column) + " out of range");
    }
    args.spec.color_mode = ColorMode::kContinuous;
    const Eigen::VectorXd feature = data.values.col(args.column);
    svg = render_tree(parsed.tree, feature, args.spec);
  } else if (args.layer_labels) {
    if (!parsed.layer_labels) throw ParameterError(args.tree + ": no cluster_label column (run cluster first)");
    svg = render_tree(parsed.tree, *parsed.layer_labels, args.spec);
  } else {
    LabelVector labels;
    if (args.labels.empty()) {
      labels.labels.assign(static_cast<std::size_t>(parsed.tree.n), 0);
    } else {
      labels = load_label_file(args.labels);
    }
    svg = render_tree(parsed.tree, labels, args.spec);
  }
  save_svg(args.output, svg);
  out << "wrote " << args.output << "\n";
  return 0;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (derived_keys().count(key)) return;
  auto table = fields(*this);
  const auto it = table.find(key);
  if (it == table.end()) throw ParameterError("config: unknown key '" + key + "'");
  it->second.set(value);
}

std::map<std::string, std::string> RunConfig::values() const {
  RunConfig copy = *this;
  std::map<std::string, std::string> out;
  for (const auto& [k, f] : fields(copy)) out[k] = f.get();
  return out;
}

void RunConfig::validate() const {
  parse_matrix_format(format);
  if (pca_components < 0) throw ParameterError("pca_components must be >= 0");
  if (n_layers < 2) throw ParameterError("n_layers must be >= 2");
  if (!(alpha_floor > 0 && alpha_floor < 1)) throw ParameterError("alpha_floor must be in (0, 1)");
  if (!(beta > 0)) throw ParameterError("beta must be > 0");
  if (subsample_cap < 3) throw ParameterError("subsample_cap must be >= 3");
  if (knn_k < 1) throw ParameterError("knn_k must be >= 1");
  if (!(init_std > 0)) throw ParameterError("init_std must be > 0");
  if (repulsion != "exact" && repulsion != "interpolated") {
    throw ParameterError("repulsion must be exact or interpolated, got '" + repulsion + "'");
  }
  if (first_learning_rate != "auto") parse_number<double>("first_learning_rate", first_learning_rate);
  if (later_learning_rate != "auto") parse_number<double>("later_learning_rate", later_learning_rate);
  tree_config(100).first_layer.validate();
  tree_config(100).later_layers.validate();
}

TreeConfig RunConfig::tree_config(Eigen::Index n_points) const {
  TreeConfig t = default_tree_config(n_points, seed);
  const double n = static_cast<double>(n_points);
  const RepulsionMethod method = repulsion == "interpolated" ? RepulsionMethod::kInterpolated : RepulsionMethod::kExact;
  for (OptimizerConfig* o : {&t.first_layer, &t.later_layers}) {
    o->repulsion = method;
    o->grid_size = grid_size;
    o->exaggeration = exaggeration;
    o->momentum_start = momentum_start;
    o->momentum_late = momentum_late;
    o->adaptive_gains = adaptive_gains;
    o->seed = seed;
  }
  t.first_layer.iterations = first_iterations;
  t.first_layer.early_iterations = early_iterations;
  t.first_layer.early_exaggeration = early_exaggeration;
  t.first_layer.learning_rate = learning_rate("first_learning_rate", first_learning_rate, n / early_exaggeration);
  t.later_layers.iterations = later_iterations;
  t.later_layers.early_iterations = 0;
  t.later_layers.early_exaggeration = exaggeration;
  t.later_layers.learning_rate = learning_rate("later_learning_rate", later_learning_rate, 0.1 * n / 12.0);
  t.perplexity_floor = perplexity_floor;
  t.init_std = init_std;
  return t;
}

ClusterConfig RunConfig::cluster_config() const {
  ClusterConfig c;
  c.beta = beta;
  c.subsample_cap = subsample_cap;
  c.knn_k = knn_k;
  c.seed = seed;
  c.resolution = resolution;
  c.smooth = smooth;
  c.fixed_subsample = fixed_subsample;
  c.spectral = spectral;
  return c;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void load_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  try {
    for (const auto& [k, v] : parse_config_text(read_text(path))) cfg.set(k, v);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_manifest(const RunConfig& cfg, Eigen::Index n_points, Eigen::Index n_dims) {
  const LayerSchedule schedule = make_schedule(n_points, cfg.n_layers, cfg.alpha_floor);
  const TreeConfig t = cfg.tree_config(n_points);
  RunConfig resolved = cfg;
  resolved.first_learning_rate = fmt(t.first_layer.learning_rate);
  resolved.later_learning_rate = fmt(t.later_layers.learning_rate);
  auto values = resolved.values();
  values["r"] = fmt(schedule.r);
  values["n_points"] = std::to_string(n_points);
  values["n_dims"] = std::to_string(n_dims);
  values["initial_perplexity"] = fmt(schedule.perplexities.front());
  std::string out;
  for (const auto& [k, v] : values) out += k + "=" + v + "\n";
  return out;
}

LabelVector load_label_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (text.rfind("point_index,label", 0) != 0) return load_labels(path);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  LabelVector out;
  out.name = path.filename().string();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const auto bad = [&] { return ParseError(path.string() + ": line " + std::to_string(line_no) + ": malformed row"); };
    if (comma == std::string::npos) throw bad();
    long index = 0;
    int label = 0;
    try {
      index = parse_number<long>("point_index", line.substr(0, comma));
      label = parse_number<int>("label", line.substr(comma + 1));
    } catch (const ParameterError&) {
      throw bad();
    }
    if (index != static_cast<long>(out.labels.size())) throw bad();
    if (label < 0) throw ValidationError(path.string() + ": negative label");
    out.labels.push_back(label);
  }
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stacked one-dimensional t-SNE trees and alpha-clustering", "treesne"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  std::string gen_kind = "gaussian-blobs";
  SyntheticParams gen_params;
  std::string gen_output;
  std::string gen_labels;
  std::string gen_format = "csv";
  gen->add_option("--kind", gen_kind, "gaussian-blobs, swiss-roll, uniform-noise or uniform-plane");
  gen->add_option("-n,--n-points", gen_params.n_points, "number of points");
  gen->add_option("-d,--dims", gen_params.dims, "ambient dimension");
  gen->add_option("--blobs", gen_params.n_blobs, "number of blobs");
  gen->add_option("--blob-std", gen_params.blob_std, "blob standard deviation");
  gen->add_option("--separation", gen_params.separation, "distance between blob centers");
  gen->add_option("--noise", gen_params.noise, "swiss roll noise");
  gen->add_option("--seed", gen_params.seed, "random seed");
  gen->add_option("-o,--output", gen_output, "data file")->required();
  gen->add_option("--labels-output", gen_labels, "ground-truth label file");
  gen->add_option("--format", gen_format, "csv or raw");

  // embed
  auto* embed = app.add_subcommand("embed", "build a tree embedding");
  ConfigOptions embed_opts;
  std::map<std::string, std::string> embed_raw;
  std::string embed_output = ".";
  bool embed_plot_defaults = false;
  embed_opts.add(embed);
  config_flag(embed, "-i,--input", "input", "data matrix", embed_opts, embed_raw);
  config_flag(embed, "--format", "format", "csv or raw", embed_opts, embed_raw);
  config_flag(embed, "--labels", "labels", "ground-truth labels (reported by cluster)", embed_opts,
                           embed_raw);
  config_flag(embed, "--pca", "pca_components", "reduce to this many principal components", embed_opts,
                    embed_raw);
  config_flag(embed, "--n-layers", "n_layers", "number of layers", embed_opts, embed_raw);
  config_flag(embed, "--alpha-floor", "alpha_floor", "alpha of the last layer is above this", embed_opts,
                      embed_raw);
  config_flag(embed, "--seed", "seed", "random seed", embed_opts, embed_raw);
  config_flag(embed, "--repulsion", "repulsion", "exact or interpolated", embed_opts, embed_raw);
  embed->add_flag("--for-plot", embed_plot_defaults, "default to 100 layers");
  embed->add_option("-o,--output", embed_output, "output directory");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "label every layer and select the alpha-clustering");
  ConfigOptions cluster_opts;
  std::map<std::string, std::string> cluster_raw;
  std::string cluster_tree_path;
  std::string cluster_output;
  cluster_opts.add(cluster);
  cluster->add_option("-t,--tree", cluster_tree_path, "tree CSV written by embed")->required();
  cluster->add_option("-o,--output", cluster_output, "output directory (default: next to the tree)");
  config_flag(cluster, "--beta", "beta", "neighbor count factor", cluster_opts, cluster_raw);
  config_flag(cluster, "--subsample-cap", "subsample_cap", "cluster at most this many points", cluster_opts,
                    cluster_raw);
  config_flag(cluster, "--knn-k", "knn_k", "voting neighbors", cluster_opts, cluster_raw);
  config_flag(cluster, "--seed", "seed", "random seed", cluster_opts, cluster_raw);
  config_flag(cluster, "--labels", "labels", "ground-truth labels for an NMI line", cluster_opts,
                           cluster_raw);

  // nmi
  auto* nmi_cmd = app.add_subcommand("nmi", "normalized mutual information of two label files");
  std::string nmi_a;
  std::string nmi_b;
  nmi_cmd->add_option("a", nmi_a, "label file")->required();
  nmi_cmd->add_option("b", nmi_b, "label file")->required();

  // subset
  auto* subset = app.add_subcommand("subset", "keep the rows of selected clusters");
  std::string sub_input;
  std::string sub_format = "csv";
  std::string sub_labels;
  std::string sub_keep;
  std::string sub_output;
  std::string sub_labels_output;
  subset->add_option("-i,--input", sub_input, "data matrix")->required();
  subset->add_option("--format", sub_format, "csv or raw");
  subset->add_option("-l,--labels", sub_labels, "cluster labels")->required();
  subset->add_option("-k,--keep", sub_keep, "comma-separated labels to keep")->required();
  subset->add_option("-o,--output", sub_output, "output matrix")->required();
  subset->add_option("--labels-output", sub_labels_output, "labels of the kept rows");

  // means
  auto* means = app.add_subcommand("means", "per-cluster feature means");
  std::string means_input;
  std::string means_format = "csv";
  std::string means_labels;
  std::string means_output;
  means->add_option("-i,--input", means_input, "data matrix")->required();
  means->add_option("--format", means_format, "csv or raw");
  means->add_option("-l,--labels", means_labels, "cluster labels")->required();
  means->add_option("-o,--output", means_output, "output CSV")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "render a tree as SVG");
  PlotArgs plot_args;
  plot->add_option("-t,--tree", plot_args.tree, "tree CSV")->required();
  plot->add_option("-o,--output", plot_args.output, "SVG file")->required();
  plot->add_option("-l,--labels", plot_args.labels, "color every layer by these labels");
  plot->add_flag("--layer-labels", plot_args.layer_labels, "color each layer by its own cluster_label column");
  plot->add_option("--feature", plot_args.feature, "matrix whose column gives a continuous color");
  plot->add_option("--feature-format", plot_args.feature_format, "csv or raw");
  plot->add_option("--column", plot_args.column, "feature column");
  plot->add_option("--width", plot_args.spec.width, "pixels");
  plot->add_option("--height", plot_args.spec.height, "pixels");
  plot->add_option("--radius", plot_args.spec.point_radius, "point radius in pixels");
  plot->add_flag("--per-layer-x", plot_args.spec.per_layer_x, "scale x within each layer");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_kind, gen_params, gen_output, gen_labels, gen_format, out);
    if (embed->parsed()) {
      RunConfig base;
      if (embed_plot_defaults) base.n_layers = 100;
      return cmd_embed(embed_opts.resolve(base), embed_output, out, err);
    }
    if (cluster->parsed()) return cmd_cluster(cluster_opts.resolve(RunConfig{}), cluster_tree_path, cluster_output, out);
    if (nmi_cmd->parsed()) return cmd_nmi(nmi_a, nmi_b, out);
    if (subset->parsed()) {
      return cmd_subset(sub_input, sub_format, sub_labels, sub_keep, sub_output, sub_labels_output, out);
    }
    if (means->parsed()) return cmd_means(means_input, means_format, means_labels, means_output, out);
    if (plot->parsed()) return cmd_plot(plot_args, out);
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace treesne
