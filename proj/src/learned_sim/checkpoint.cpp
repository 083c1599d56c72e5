#include "figsim/learned_sim/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "figsim/error.hpp"

namespace figsim {
namespace {

using nlohmann::json;

constexpr int kVersion = 1;

json moments_to_json(const Moments& m) {
  return {{"mean", m.mean.v}, {"std", m.std_dev.v}};
}

Moments moments_from_json(const json& j) {
  Moments m;
  const auto& mean = j.at("mean");
  const auto& std_dev = j.at("std");
  m.mean = Tensor(1, static_cast<int>(mean.size()));
  m.std_dev = Tensor(1, static_cast<int>(std_dev.size()));
  for (size_t i = 0; i < mean.size(); ++i) m.mean.v[i] = mean[i];
  for (size_t i = 0; i < std_dev.size(); ++i) m.std_dev.v[i] = std_dev[i];
  return m;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const NormalizerSet& norms,
                     const std::string& path) {
  json tensors = json::array();
  for (size_t i = 0; i < params.tensors.size(); ++i) {
    tensors.push_back({{"name", params.names[i]},
                       {"rows", params.tensors[i].rows},
                       {"cols", params.tensors[i].cols}});
  }
  const json header = {
      {"version", kVersion},
      {"mode", graph_mode_name(params.config.mode)},
      {"message_passing_steps", params.config.message_passing_steps},
      {"hidden", params.config.hidden},
      {"tensors", std::move(tensors)},
      {"normalizers",
       {{"node", moments_to_json(norms.node)},
        {"node_node", moments_to_json(norms.node_node)},
        {"vert_to_obj", moments_to_json(norms.vert_to_obj)},
        {"obj_to_vert", moments_to_json(norms.obj_to_vert)},
        {"face_face", moments_to_json(norms.face_face)},
        {"accel", moments_to_json(norms.accel)}}},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << header.dump() << "\n";
  for (const Tensor& t : params.tensors) {
    out.write(reinterpret_cast<const char*>(t.v.data()), t.size() * sizeof(double));
  }
  if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("missing checkpoint header: " + path);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError("bad checkpoint header in " + path + ": " + e.what());
  }
  if (header.value("version", -1) != kVersion) {
    throw FormatVersionMismatch("unsupported checkpoint version in " + path);
  }

  Checkpoint ckpt;
  ckpt.params.config.mode = parse_graph_mode(header.at("mode"));
  ckpt.params.config.message_passing_steps = header.at("message_passing_steps");
  ckpt.params.config.hidden = header.at("hidden");
  for (const json& t : header.at("tensors")) {
    ckpt.params.names.push_back(t.at("name"));
    Tensor tensor(t.at("rows"), t.at("cols"));
    in.read(reinterpret_cast<char*>(tensor.v.data()), tensor.size() * sizeof(double));
    if (!in) throw IoError("truncated checkpoint blob in " + path);
    ckpt.params.tensors.push_back(std::move(tensor));
  }

  // the declaration order must match this build's layout
  const ModelParams expected = init_model(ckpt.params.config, 0);
  if (expected.names != ckpt.params.names) {
    throw FormatVersionMismatch("checkpoint parameter layout mismatch in " + path);
  }

  const json& n = header.at("normalizers");
  ckpt.norms.node = moments_from_json(n.at("node"));
  ckpt.norms.node_node = moments_from_json(n.at("node_node"));
  ckpt.norms.vert_to_obj = moments_from_json(n.at("vert_to_obj"));
  ckpt.norms.obj_to_vert = moments_from_json(n.at("obj_to_vert"));
  ckpt.norms.face_face = moments_from_json(n.at("face_face"));
  ckpt.norms.accel = moments_from_json(n.at("accel"));
  return ckpt;
}

}  // namespace figsim
