#pragma once

#include <memory>
#include <string>

#include "figsim/fields/density_field.hpp"

namespace figsim {

//! Binary grid file: one-line JSON header (origin, spacing, dims, threshold,
//! has_color) terminated by '\n', then nx*ny*nz little-endian float32
//! densities (x-fastest), then optional RGB float32 triples in the same order.
void write_grid(const GridField& grid, const std::string& path);
std::shared_ptr<GridField> read_grid(const std::string& path);

}  // namespace figsim
