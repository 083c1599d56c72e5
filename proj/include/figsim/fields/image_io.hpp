#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace figsim {

//! Row-major float image, values in [0,1] for color channels.
struct ImageRgba {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;  // 4 floats per pixel

  float* at(int x, int y) { return &pixels[4 * (size_t(y) * width + x)]; }
  const float* at(int x, int y) const { return &pixels[4 * (size_t(y) * width + x)]; }
};

struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> depth;  // meters; 0 where no surface was hit

  float& at(int x, int y) { return depth[size_t(y) * width + x]; }
  float at(int x, int y) const { return depth[size_t(y) * width + x]; }
};

struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> active;  // nonzero = active

  uint8_t& at(int x, int y) { return active[size_t(y) * width + x]; }
  bool at(int x, int y) const { return active[size_t(y) * width + x] != 0; }
};

// PPM (P6, 8-bit) for color. Alpha is composited over black.
void write_ppm(const ImageRgba& image, const std::string& path);
ImageRgba read_ppm(const std::string& path);

// PGM (P5, 16-bit) for depth. The scale comment maps 65535 to max depth.
void write_depth_pgm(const DepthMap& depth, const std::string& path);
DepthMap read_depth_pgm(const std::string& path);

// PGM (P5, 8-bit) binary masks, nonzero = active.
void write_mask_pgm(const MaskImage& mask, const std::string& path);
MaskImage read_mask_pgm(const std::string& path);

}  // namespace figsim
