#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "figsim/groundtruth/dataset.hpp"
#include "figsim/scenegraph/graph.hpp"

namespace figsim {

struct BenchmarkConfig {
  int hidden = 128;
  int message_passing_steps = 10;
  double collision_radius = 0.1;
  int sample_transitions = 20;  // transitions used for edge statistics
  int timing_runs = 10;         // per-mode forward passes timed
  uint64_t seed = 0;
};

struct ModeBenchmark {
  GraphStats mean_stats;  // averaged over sampled transitions
  double median_ms = 0.0;
  double iqr_ms = 0.0;
  // filled by the eval pipeline when trained checkpoints are available
  double translation_rmse = std::nan("");
  double rotation_rmse_deg = std::nan("");
};

struct BenchmarkReport {
  ModeBenchmark fignet;
  ModeBenchmark fignet_star;
  //! On every sampled transition the star graph equals the full graph minus
  //! its node-node edges (object/face-face arrays bit-identical).
  bool structural_identity = false;
};

//! Edge/memory statistics and single-threaded forward timings for both graph
//! modes on transitions sampled from the dataset. Runtime does not depend on
//! the (untrained) weights.
BenchmarkReport benchmark_modes(const std::vector<Trajectory>& data, const BenchmarkConfig& cfg);

void write_benchmark_json(const BenchmarkReport& report, const std::string& path);

//! Human-readable comparison, columns ordered Memory, Runtime, Trans. Err.,
//! Rot. Err., Edge Count.
std::string benchmark_table(const BenchmarkReport& report);

}  // namespace figsim
