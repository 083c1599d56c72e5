#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "figsim/scenegraph/scene.hpp"

namespace figsim {

enum class GraphMode { kFignet, kFignetStar };

GraphMode parse_graph_mode(const std::string& name);
std::string graph_mode_name(GraphMode mode);

//! Per-node input features: [x_t - x_{t-1}, mass, friction, restitution, a_i, f_i].
inline constexpr int kNodeFeatureWidth = 10;
//! Relative displacement + norm.
inline constexpr int kNodeNodeFeatureWidth = 4;
inline constexpr int kObjectNodeFeatureWidth = 4;
//! Closest-point offset + norm, per-vertex offsets to the closest point on
//! each side, sender and receiver unit normals.
inline constexpr int kFaceFaceFeatureWidth = 28;

//! Directed edge set with a fixed feature width; features row-major.
struct DirectedEdges {
  std::vector<int> senders;
  std::vector<int> receivers;
  std::vector<double> features;
  int feature_width = 0;

  int count() const { return static_cast<int>(senders.size()); }
};

//! One directed face-face message: three sender mesh nodes, three receivers.
struct FaceFaceEdge {
  std::array<int, 3> sender_verts;
  std::array<int, 3> receiver_verts;
};

struct SceneGraph {
  GraphMode mode = GraphMode::kFignetStar;

  // mesh nodes flattened over objects in scene order
  std::vector<int> mesh_node_object;  // object index per mesh node
  std::vector<Vec3> mesh_node_positions;
  std::vector<double> mesh_node_features;  // kNodeFeatureWidth per node

  std::vector<Vec3> object_node_positions;  // one per object, vertex mean
  std::vector<double> object_node_features;

  DirectedEdges node_node;    // mesh -> mesh, fignet mode only
  DirectedEdges vert_to_obj;  // mesh node -> object node
  DirectedEdges obj_to_vert;  // object node -> mesh node

  std::vector<FaceFaceEdge> face_face;
  std::vector<double> face_face_features;  // kFaceFaceFeatureWidth per edge

  int num_mesh_nodes() const { return static_cast<int>(mesh_node_object.size()); }
  int num_object_nodes() const { return static_cast<int>(object_node_positions.size()); }
  int face_face_count() const { return static_cast<int>(face_face.size()); }
};

//! Typed two-frame scene graph. Face-face edges connect distinct objects
//! whose triangles are within collision_radius; each geometric pair yields
//! two directed messages.
SceneGraph build_graph(const Scene& scene, const FrameState& state_t,
                       const FrameState& state_prev, GraphMode mode, double collision_radius);

struct GraphStats {
  int mesh_nodes = 0;
  int object_nodes = 0;
  int node_node_edges = 0;
  int object_node_edges = 0;  // both directions
  int face_face_edges = 0;    // directed messages
  int total_edges = 0;
  uint64_t feature_memory_bytes = 0;  // float32 storage of all feature rows
};

GraphStats graph_stats(const SceneGraph& graph);

//! Debug/benchmark dump: node arrays, edge index arrays, feature arrays.
void write_graph_json(const SceneGraph& graph, const std::string& path);

}  // namespace figsim
