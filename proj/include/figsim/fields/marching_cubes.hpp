#pragma once

#include "figsim/fields/density_field.hpp"
#include "figsim/geometry/aabb.hpp"
#include "figsim/geometry/trimesh.hpp"

namespace figsim {

//! Triangulated isosurface of {x : density(x) = threshold} inside `volume`,
//! sampled on a regular grid of `grid_points` per axis. Edge vertices are
//! placed by linear interpolation and shared between cells so closed field
//! regions come out watertight; regions crossing the volume are capped at
//! its boundary. Throws EmptySurface when no edge crosses.
TriMesh marching_cubes(const DensityField& field, const Aabb& volume, int grid_points,
                       double threshold);

}  // namespace figsim
