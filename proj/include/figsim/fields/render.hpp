#pragma once

#include <optional>

#include "figsim/fields/bend.hpp"
#include "figsim/fields/camera.hpp"
#include "figsim/fields/density_field.hpp"
#include "figsim/fields/image_io.hpp"

namespace figsim {

struct RenderResult {
  ImageRgba image;
  DepthMap depth;  // z-depth (camera forward axis), transmittance-weighted
};

//! Emission-absorption ray marching over the field bounds.
//! Deterministic; rows may be rendered in parallel without changing output.
RenderResult render(const DensityField& field, const CameraModel& camera,
                    const std::optional<BendSpec>& spec, double step_size, int threads = 1);

}  // namespace figsim
