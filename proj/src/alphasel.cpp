#include "treesne/alphasel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <utility>

#include "treesne/error.hpp"

namespace treesne {
namespace {

// Sum after sorting, so the result does not depend on iteration order.
double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double entropy(std::span<const int> x) {
  std::map<int, std::size_t> counts;
  for (int v : x) ++counts[v];
  const double n = static_cast<double>(x.size());
  std::vector<double> terms;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / n;
    terms.push_back(-p * std::log(p));
  }
  return ordered_sum(std::move(terms));
}

bool same_partition(std::span<const int> x, std::span<const int> y) {
  std::map<int, int> fwd;
  std::map<int, int> bwd;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto [f, f_new] = fwd.try_emplace(x[i], y[i]);
    const auto [b, b_new] = bwd.try_emplace(y[i], x[i]);
    if (f->second != y[i] || b->second != x[i]) return false;
  }
  return true;
}

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

double nmi(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size()) {
    throw ParameterError("nmi: length mismatch (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw ParameterError("nmi: empty label vectors");
  const double hx = entropy(x);
  const double hy = entropy(y);
  if (hx == 0.0 || hy == 0.0) return same_partition(x, y) ? 1.0 : 0.0;

  std::map<int, std::size_t> cx;
  std::map<int, std::size_t> cy;
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++cx[x[i]];
    ++cy[y[i]];
    ++joint[{x[i], y[i]}];
  }
  const double n = static_cast<double>(x.size());
  std::vector<double> terms;
  terms.reserve(joint.size());
  for (const auto& [key, c] : joint) {
    const double nxy = static_cast<double>(c);
    const double nx = static_cast<double>(cx[key.first]);
    const double ny = static_cast<double>(cy[key.second]);
    terms.push_back(nxy / n * std::log(n * nxy / (nx * ny)));
  }
  const double mi = ordered_sum(std::move(terms));
  return std::clamp(mi / std::sqrt(hx * hy), 0.0, 1.0);
}

double nmi(const LabelVector& x, const LabelVector& y) { return nmi(std::span(x.labels), std::span(y.labels)); }

bool same_clustering(const LayerClustering& a, const LayerClustering& b, const StabilityOptions& options) {
  return a.k == b.k && nmi(a.labels, b.labels) >= options.nmi_threshold;
}

std::vector<StableRun> stable_runs(std::span<const LayerClustering> clusterings, std::span<const double> alphas,
                                   const StabilityOptions& options) {
  if (clusterings.size() < 2) throw ParameterError("stable_runs needs at least 2 layers");
  if (alphas.size() != clusterings.size()) throw ParameterError("stable_runs: one alpha per layer required");
  std::vector<StableRun> runs;
  std::size_t first = 0;
  for (std::size_t l = 1; l <= clusterings.size(); ++l) {
    if (l < clusterings.size() && same_clustering(clusterings[l - 1], clusterings[l], options)) continue;
    const std::size_t last = l - 1;
    runs.push_back({static_cast<int>(first) + 1, static_cast<int>(last) + 1, clusterings[first].k,
                    alphas[first] - alphas[last]});
    first = l;
  }
  return runs;
}

std::vector<StableRun> stable_runs(std::span<const LayerClustering> clusterings, const LayerSchedule& schedule,
                                   const StabilityOptions& options) {
  return stable_runs(clusterings, std::span(schedule.alphas), options);
}

AlphaClustering select_alpha_clustering(std::span<const LayerClustering> clusterings, std::span<const double> alphas,
                                        const StabilityOptions& options) {
  const auto runs = stable_runs(clusterings, alphas, options);
  const bool any_multi = std::any_of(runs.begin(), runs.end(), [](const StableRun& r) { return r.length() > 1; });
  const StableRun* best = nullptr;
  for (const auto& run : runs) {
    if (any_multi && run.length() < 2) continue;
    if (best == nullptr || run.alpha_range > best->alpha_range) best = &run;
  }
  const auto first = static_cast<std::size_t>(best->layer_first - 1);
  const auto last = static_cast<std::size_t>(best->layer_last - 1);
  AlphaClustering out;
  out.labels = clusterings[first].labels;
  out.k = clusterings[first].k;
  out.layer_first = best->layer_first;
  out.layer_last = best->layer_last;
  out.alpha_first = alphas[first];
  out.alpha_last = alphas[last];
  out.alpha_range = best->alpha_range;
  return out;
}

AlphaClustering select_alpha_clustering(std::span<const LayerClustering> clusterings, const LayerSchedule& schedule,
                                        const StabilityOptions& options) {
  return select_alpha_clustering(clusterings, std::span(schedule.alphas), options);
}

std::string format_summary(const AlphaClustering& result, std::span<const StableRun> runs) {
  std::string out;
  out += "k=" + std::to_string(result.k) + "\n";
  out += "layer_first=" + std::to_string(result.layer_first) + "\n";
  out += "layer_last=" + std::to_string(result.layer_last) + "\n";
  out += "alpha_first=" + fmt(result.alpha_first) + "\n";
  out += "alpha_last=" + fmt(result.alpha_last) + "\n";
  out += "alpha_range=" + fmt(result.alpha_range) + "\n";
  out += "n_runs=" + std::to_string(runs.size()) + "\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    out += "run." + std::to_string(i) + "=" + std::to_string(r.layer_first) + "-" + std::to_string(r.layer_last) +
           " k=" + std::to_string(r.k) + " alpha_range=" + fmt(r.alpha_range) + "\n";
  }
  return out;
}

}  // namespace treesne
