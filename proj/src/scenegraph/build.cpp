#include <fstream>

#include <nlohmann/json.hpp>

#include "figsim/error.hpp"
#include "figsim/geometry/proximity.hpp"
#include "figsim/scenegraph/graph.hpp"

namespace figsim {
namespace {

void push_relative(DirectedEdges& edges, int sender, int receiver, const Vec3& offset) {
  edges.senders.push_back(sender);
  edges.receivers.push_back(receiver);
  edges.features.insert(edges.features.end(), {offset.x, offset.y, offset.z, offset.norm()});
}

}  // namespace

GraphMode parse_graph_mode(const std::string& name) {
  if (name == "fignet") return GraphMode::kFignet;
  if (name == "fignet_star") return GraphMode::kFignetStar;
  throw InvalidSpec("unknown graph mode: " + name);
}

std::string graph_mode_name(GraphMode mode) {
  return mode == GraphMode::kFignet ? "fignet" : "fignet_star";
}

SceneGraph build_graph(const Scene& scene, const FrameState& state_t,
                       const FrameState& state_prev, GraphMode mode, double collision_radius) {
  const size_t n_obj = scene.objects.size();
  if (state_t.objects.size() != n_obj || state_prev.objects.size() != n_obj) {
    throw TopologyMismatch("build_graph: object counts disagree");
  }
  for (size_t o = 0; o < n_obj; ++o) {
    const size_t nv = scene.objects[o].ref_mesh.vertices.size();
    if (state_t.objects[o].vertices.size() != nv ||
        state_prev.objects[o].vertices.size() != nv) {
      throw TopologyMismatch("build_graph: vertex counts disagree for object " +
                             std::to_string(scene.objects[o].object_id));
    }
  }

  SceneGraph g;
  g.mode = mode;
  g.node_node.feature_width = kNodeNodeFeatureWidth;
  g.vert_to_obj.feature_width = kObjectNodeFeatureWidth;
  g.obj_to_vert.feature_width = kObjectNodeFeatureWidth;

  std::vector<int> node_base(n_obj, 0);
  for (size_t o = 0; o < n_obj; ++o) {
    node_base[o] = g.num_mesh_nodes();
    const SceneObject& obj = scene.objects[o];
    const auto& xt = state_t.objects[o].vertices;
    const auto& xp = state_prev.objects[o].vertices;
    const double a_i = obj.props.static_flag ? 1.0 : 0.0;
    for (size_t v = 0; v < xt.size(); ++v) {
      g.mesh_node_object.push_back(static_cast<int>(o));
      g.mesh_node_positions.push_back(xt[v]);
      const Vec3 vel = xt[v] - xp[v];
      // f_i stays zero: only stationary environments are kinematic here
      g.mesh_node_features.insert(
          g.mesh_node_features.end(),
          {vel.x, vel.y, vel.z, obj.props.mass, obj.props.friction, obj.props.restitution, a_i,
           0.0, 0.0, 0.0});
    }
  }

  for (size_t o = 0; o < n_obj; ++o) {
    const SceneObject& obj = scene.objects[o];
    const auto& xt = state_t.objects[o].vertices;
    const auto& xp = state_prev.objects[o].vertices;
    Vec3 center, center_prev;
    for (size_t v = 0; v < xt.size(); ++v) {
      center += xt[v];
      center_prev += xp[v];
    }
    if (!xt.empty()) {
      center = (1.0 / double(xt.size())) * center;
      center_prev = (1.0 / double(xt.size())) * center_prev;
    }
    g.object_node_positions.push_back(center);
    const Vec3 vel = center - center_prev;
    const double a_i = obj.props.static_flag ? 1.0 : 0.0;
    g.object_node_features.insert(
        g.object_node_features.end(),
        {vel.x, vel.y, vel.z, obj.props.mass, obj.props.friction, obj.props.restitution, a_i,
         0.0, 0.0, 0.0});

    for (size_t v = 0; v < xt.size(); ++v) {
      const int node = node_base[o] + static_cast<int>(v);
      push_relative(g.vert_to_obj, node, static_cast<int>(o), center - xt[v]);
      push_relative(g.obj_to_vert, static_cast<int>(o), node, xt[v] - center);
    }
  }

  if (mode == GraphMode::kFignet) {
    for (size_t o = 0; o < n_obj; ++o) {
      TriMesh world = scene.objects[o].ref_mesh;
      world.vertices = state_t.objects[o].vertices;
      for (const auto& e : world.undirected_edges()) {
        const int i = node_base[o] + e[0];
        const int j = node_base[o] + e[1];
        const Vec3 xi = g.mesh_node_positions[i];
        const Vec3 xj = g.mesh_node_positions[j];
        push_relative(g.node_node, i, j, xj - xi);
        push_relative(g.node_node, j, i, xi - xj);
      }
    }
  }

  // face-face collision hyperedges between distinct objects
  for (size_t a = 0; a < n_obj; ++a) {
    for (size_t b = a + 1; b < n_obj; ++b) {
      if (scene.objects[a].object_id == scene.objects[b].object_id) continue;
      TriMesh ma = scene.objects[a].ref_mesh;
      ma.vertices = state_t.objects[a].vertices;
      TriMesh mb = scene.objects[b].ref_mesh;
      mb.vertices = state_t.objects[b].vertices;
      const auto pairs = closest_face_pairs(ma, mb, collision_radius);

      auto emit = [&](size_t obj_s, const TriMesh& ms, int face_s, const Vec3& p_s,
                      size_t obj_r, const TriMesh& mr, int face_r, const Vec3& p_r) {
        const auto& ts = ms.faces[face_s];
        const auto& tr = mr.faces[face_r];
        FaceFaceEdge edge;
        for (int k = 0; k < 3; ++k) {
          edge.sender_verts[k] = node_base[obj_s] + ts[k];
          edge.receiver_verts[k] = node_base[obj_r] + tr[k];
        }
        g.face_face.push_back(edge);

        auto& f = g.face_face_features;
        const Vec3 d = p_r - p_s;
        f.insert(f.end(), {d.x, d.y, d.z, d.norm()});
        for (int k = 0; k < 3; ++k) {
          const Vec3 off = ms.vertices[ts[k]] - p_s;
          f.insert(f.end(), {off.x, off.y, off.z});
        }
        for (int k = 0; k < 3; ++k) {
          const Vec3 off = mr.vertices[tr[k]] - p_r;
          f.insert(f.end(), {off.x, off.y, off.z});
        }
        const Vec3 ns = ms.face_normal(face_s);
        const Vec3 nr = mr.face_normal(face_r);
        f.insert(f.end(), {ns.x, ns.y, ns.z, nr.x, nr.y, nr.z});
      };

      for (const FacePair& p : pairs) {
        emit(a, ma, p.face_a, p.closest_a, b, mb, p.face_b, p.closest_b);
        emit(b, mb, p.face_b, p.closest_b, a, ma, p.face_a, p.closest_a);
      }
    }
  }

  return g;
}

GraphStats graph_stats(const SceneGraph& graph) {
  GraphStats s;
  s.mesh_nodes = graph.num_mesh_nodes();
  s.object_nodes = graph.num_object_nodes();
  s.node_node_edges = graph.node_node.count();
  s.object_node_edges = graph.vert_to_obj.count() + graph.obj_to_vert.count();
  s.face_face_edges = graph.face_face_count();
  s.total_edges = s.node_node_edges + s.object_node_edges + s.face_face_edges;
  s.feature_memory_bytes =
      uint64_t(s.mesh_nodes + s.object_nodes) * kNodeFeatureWidth * 4 +
      uint64_t(s.node_node_edges) * kNodeNodeFeatureWidth * 4 +
      uint64_t(s.object_node_edges) * kObjectNodeFeatureWidth * 4 +
      uint64_t(s.face_face_edges) * kFaceFaceFeatureWidth * 4;
  return s;
}

void write_graph_json(const SceneGraph& graph, const std::string& path) {
  using nlohmann::json;
  json j;
  j["mode"] = graph_mode_name(graph.mode);
  j["mesh_node_object"] = graph.mesh_node_object;
  json pos = json::array();
  for (const Vec3& p : graph.mesh_node_positions) pos.push_back({p.x, p.y, p.z});
  j["mesh_node_positions"] = std::move(pos);
  j["mesh_node_features"] = graph.mesh_node_features;
  json opos = json::array();
  for (const Vec3& p : graph.object_node_positions) opos.push_back({p.x, p.y, p.z});
  j["object_node_positions"] = std::move(opos);
  j["object_node_features"] = graph.object_node_features;

  auto dump_edges = [](const DirectedEdges& e) {
    return json{{"senders", e.senders},
                {"receivers", e.receivers},
                {"features", e.features},
                {"feature_width", e.feature_width}};
  };
  j["node_node"] = dump_edges(graph.node_node);
  j["vert_to_obj"] = dump_edges(graph.vert_to_obj);
  j["obj_to_vert"] = dump_edges(graph.obj_to_vert);

  json ff = json::array();
  for (const FaceFaceEdge& e : graph.face_face) {
    ff.push_back({{"sender_verts", e.sender_verts}, {"receiver_verts", e.receiver_verts}});
  }
  j["face_face"] = std::move(ff);
  j["face_face_features"] = graph.face_face_features;

  const GraphStats s = graph_stats(graph);
  j["stats"] = {{"mesh_nodes", s.mesh_nodes},
                {"object_nodes", s.object_nodes},
                {"node_node_edges", s.node_node_edges},
                {"object_node_edges", s.object_node_edges},
                {"face_face_edges", s.face_face_edges},
                {"total_edges", s.total_edges},
                {"feature_memory_bytes", s.feature_memory_bytes}};

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump() << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace figsim
