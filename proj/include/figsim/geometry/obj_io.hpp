#pragma once

#include <string>

#include "figsim/geometry/trimesh.hpp"

namespace figsim {

//! Wavefront OBJ, triangles only, 1-based indices. Writer emits 9 significant digits.
void write_obj(const TriMesh& mesh, const std::string& path);
TriMesh read_obj(const std::string& path);

}  // namespace figsim
