#include "figsim/rollout_eval/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "figsim/error.hpp"
#include "figsim/learned_sim/model.hpp"

namespace figsim {
namespace {

using nlohmann::json;

struct Transition {
  const Trajectory* traj = nullptr;
  int t = 0;
};

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double iqr_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  return xs[(3 * n) / 4] - xs[n / 4];
}

void accumulate(GraphStats& acc, const GraphStats& s) {
  acc.mesh_nodes += s.mesh_nodes;
  acc.object_nodes += s.object_nodes;
  acc.node_node_edges += s.node_node_edges;
  acc.object_node_edges += s.object_node_edges;
  acc.face_face_edges += s.face_face_edges;
  acc.total_edges += s.total_edges;
  acc.feature_memory_bytes += s.feature_memory_bytes;
}

GraphStats divide(const GraphStats& acc, int n) {
  GraphStats s;
  s.mesh_nodes = acc.mesh_nodes / n;
  s.object_nodes = acc.object_nodes / n;
  s.node_node_edges = acc.node_node_edges / n;
  s.object_node_edges = acc.object_node_edges / n;
  s.face_face_edges = acc.face_face_edges / n;
  s.total_edges = acc.total_edges / n;
  s.feature_memory_bytes = acc.feature_memory_bytes / n;
  return s;
}

bool same_edges(const DirectedEdges& a, const DirectedEdges& b) {
  return a.senders == b.senders && a.receivers == b.receivers && a.features == b.features;
}

json stats_json(const ModeBenchmark& m) {
  json j = {{"mesh_nodes", m.mean_stats.mesh_nodes},
            {"object_nodes", m.mean_stats.object_nodes},
            {"node_node_edges", m.mean_stats.node_node_edges},
            {"object_node_edges", m.mean_stats.object_node_edges},
            {"face_face_edges", m.mean_stats.face_face_edges},
            {"total_edges", m.mean_stats.total_edges},
            {"feature_memory_bytes", m.mean_stats.feature_memory_bytes},
            {"median_ms", m.median_ms},
            {"iqr_ms", m.iqr_ms}};
  if (!std::isnan(m.translation_rmse)) j["translation_rmse"] = m.translation_rmse;
  if (!std::isnan(m.rotation_rmse_deg)) j["rotation_rmse_deg"] = m.rotation_rmse_deg;
  return j;
}

}  // namespace

BenchmarkReport benchmark_modes(const std::vector<Trajectory>& data, const BenchmarkConfig& cfg) {
  std::vector<Transition> transitions;
  for (const Trajectory& traj : data) {
    for (int t = 1; t + 1 < static_cast<int>(traj.frames.size()); ++t) {
      transitions.push_back({&traj, t});
    }
  }
  if (transitions.empty()) throw DatasetEmpty("benchmark_modes: no usable transitions");

  std::mt19937_64 rng(cfg.seed);
  std::shuffle(transitions.begin(), transitions.end(), rng);
  const int samples = std::min<int>(cfg.sample_transitions, static_cast<int>(transitions.size()));
  transitions.resize(samples);

  BenchmarkReport report;
  report.structural_identity = true;
  GraphStats acc_full, acc_star;
  for (const Transition& tr : transitions) {
    const SceneGraph full = build_graph(tr.traj->scene, tr.traj->frames[tr.t],
                                        tr.traj->frames[tr.t - 1], GraphMode::kFignet,
                                        cfg.collision_radius);
    const SceneGraph star = build_graph(tr.traj->scene, tr.traj->frames[tr.t],
                                        tr.traj->frames[tr.t - 1], GraphMode::kFignetStar,
                                        cfg.collision_radius);
    accumulate(acc_full, graph_stats(full));
    accumulate(acc_star, graph_stats(star));

    report.structural_identity &=
        star.node_node.count() == 0 &&
        star.mesh_node_features == full.mesh_node_features &&
        same_edges(star.vert_to_obj, full.vert_to_obj) &&
        same_edges(star.obj_to_vert, full.obj_to_vert) &&
        star.face_face_features == full.face_face_features &&
        star.face_face.size() == full.face_face.size();
  }
  report.fignet.mean_stats = divide(acc_full, samples);
  report.fignet_star.mean_stats = divide(acc_star, samples);

  // timing on a fixed representative transition; median +- IQR over runs
  const Transition rep = transitions.front();
  for (ModeBenchmark* mode : {&report.fignet, &report.fignet_star}) {
    ModelConfig mc;
    mc.mode = mode == &report.fignet ? GraphMode::kFignet : GraphMode::kFignetStar;
    mc.hidden = cfg.hidden;
    mc.message_passing_steps = cfg.message_passing_steps;
    const ModelParams params = init_model(mc, cfg.seed);
    const NormalizerSet norms = identity_normalizers();

    std::vector<double> ms;
    for (int run = 0; run < std::max(1, cfg.timing_runs); ++run) {
      const auto start = std::chrono::steady_clock::now();
      const SceneGraph g = build_graph(rep.traj->scene, rep.traj->frames[rep.t],
                                       rep.traj->frames[rep.t - 1], mc.mode,
                                       cfg.collision_radius);
      model_forward(params, g, norms);
      const auto end = std::chrono::steady_clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(end - start).count());
    }
    mode->median_ms = median_of(ms);
    mode->iqr_ms = iqr_of(ms);
  }
  return report;
}

void write_benchmark_json(const BenchmarkReport& report, const std::string& path) {
  const json j = {{"fignet", stats_json(report.fignet)},
                  {"fignet_star", stats_json(report.fignet_star)},
                  {"structural_identity", report.structural_identity}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write benchmark report: " + path);
  out << j.dump(2) << "\n";
}

std::string benchmark_table(const BenchmarkReport& report) {
  auto row = [](const char* name, const ModeBenchmark& m) {
    char trans[32], rot[32];
    if (std::isnan(m.translation_rmse)) {
      std::snprintf(trans, sizeof(trans), "%10s", "n/a");
    } else {
      std::snprintf(trans, sizeof(trans), "%10.4f", m.translation_rmse);
    }
    if (std::isnan(m.rotation_rmse_deg)) {
      std::snprintf(rot, sizeof(rot), "%10s", "n/a");
    } else {
      std::snprintf(rot, sizeof(rot), "%10.2f", m.rotation_rmse_deg);
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-12s %12.3f %12.3f %s %s %12d\n", name,
                  double(m.mean_stats.feature_memory_bytes) / (1024.0 * 1024.0), m.median_ms,
                  trans, rot, m.mean_stats.total_edges);
    return std::string(buf);
  };
  std::string out;
  char header[256];
  std::snprintf(header, sizeof(header), "%-12s %12s %12s %10s %10s %12s\n", "Mode",
                "Memory (MiB)", "Runtime (ms)", "Trans. Err.", "Rot. Err.", "Edge Count");
  out += header;
  out += row("fignet", report.fignet);
  out += row("fignet_star", report.fignet_star);
  return out;
}

}  // namespace figsim
