#pragma once

#include <span>
#include <string>
#include <vector>

#include "treesne/cluster.hpp"
#include "treesne/dataset.hpp"
#include "treesne/tree.hpp"

namespace treesne {

/// Normalized mutual information I(X;Y) / sqrt(H(X) H(Y)).
///
/// When either partition has zero entropy the score is 1 if the partitions
/// are identical up to relabeling and 0 otherwise.
double nmi(std::span<const int> x, std::span<const int> y);
double nmi(const LabelVector& x, const LabelVector& y);

/// Maximal run of consecutive layers whose clusterings are pairwise stable.
/// Layer numbers are 1-based.
struct StableRun {
  int layer_first = 0;
  int layer_last = 0;
  int k = 0;
  double alpha_range = 0.0;

  int length() const { return layer_last - layer_first + 1; }
};

struct StabilityOptions {
  // Adjacent layers are the same clustering iff their cluster counts match
  // and their NMI is at least this.
  double nmi_threshold = 0.99;
};

bool same_clustering(const LayerClustering& a, const LayerClustering& b, const StabilityOptions& options = {});

std::vector<StableRun> stable_runs(std::span<const LayerClustering> clusterings, std::span<const double> alphas,
                                   const StabilityOptions& options = {});
std::vector<StableRun> stable_runs(std::span<const LayerClustering> clusterings, const LayerSchedule& schedule,
                                   const StabilityOptions& options = {});

struct AlphaClustering {
  LabelVector labels;
  int k = 0;
  int layer_first = 0;
  int layer_last = 0;
  double alpha_first = 0.0;
  double alpha_last = 0.0;
  double alpha_range = 0.0;
};

/// Picks the run with the largest alpha range (earliest run on ties; runs of
/// a single layer only when no longer run exists) and returns the clustering
/// of its first layer.
AlphaClustering select_alpha_clustering(std::span<const LayerClustering> clusterings, std::span<const double> alphas,
                                        const StabilityOptions& options = {});
AlphaClustering select_alpha_clustering(std::span<const LayerClustering> clusterings, const LayerSchedule& schedule,
                                        const StabilityOptions& options = {});

/// Plain-text summary: one `key=value` per line.
std::string format_summary(const AlphaClustering& result, std::span<const StableRun> runs);

}  // namespace treesne
