#include "figsim/fields/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "figsim/error.hpp"

namespace figsim {
namespace {

void read_pnm_header(std::istream& in, const std::string& magic_expected, int& width, int& height,
                     int& maxval, std::string& comment) {
  std::string magic;
  in >> magic;
  if (magic != magic_expected) throw IoError("unexpected PNM magic: " + magic);
  comment.clear();
  auto skip_ws = [&] {
    while (true) {
      const int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
        comment += line;
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
  };
  skip_ws();
  in >> width;
  skip_ws();
  in >> height;
  skip_ws();
  in >> maxval;
  in.get();  // single whitespace before raster
  if (!in || width <= 0 || height <= 0) throw IoError("bad PNM header");
}

}  // namespace

void write_ppm(const ImageRgba& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<uint8_t> row(size_t(image.width) * 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const float* px = image.at(x, y);
      for (int c = 0; c < 3; ++c) {
        // premultiplied over black
        const float v = std::clamp(px[c] * 1.0f, 0.0f, 1.0f);
        row[3 * x + c] = static_cast<uint8_t>(std::lround(v * 255.0f));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw IoError("write failed: " + path);
}

ImageRgba read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  int w, h, maxval;
  std::string comment;
  read_pnm_header(in, "P6", w, h, maxval, comment);
  ImageRgba img;
  img.width = w;
  img.height = h;
  img.pixels.assign(size_t(w) * h * 4, 1.0f);
  std::vector<uint8_t> row(size_t(w) * 3);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), row.size());
    if (!in) throw IoError("truncated PPM: " + path);
    for (int x = 0; x < w; ++x) {
      float* px = img.at(x, y);
      for (int c = 0; c < 3; ++c) px[c] = row[3 * x + c] / float(maxval);
    }
  }
  return img;
}

void write_depth_pgm(const DepthMap& depth, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  float max_depth = 0.0f;
  for (const float d : depth.depth) max_depth = std::max(max_depth, d);
  if (max_depth <= 0.0f) max_depth = 1.0f;
  out << "P5\n# depth_scale " << max_depth << "\n" << depth.width << " " << depth.height
      << "\n65535\n";
  std::vector<uint8_t> row(size_t(depth.width) * 2);
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      const float d = std::clamp(depth.at(x, y) / max_depth, 0.0f, 1.0f);
      const uint16_t q = static_cast<uint16_t>(std::lround(d * 65535.0f));
      row[2 * x] = static_cast<uint8_t>(q >> 8);  // big-endian per PGM spec
      row[2 * x + 1] = static_cast<uint8_t>(q & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw IoError("write failed: " + path);
}

DepthMap read_depth_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  int w, h, maxval;
  std::string comment;
  read_pnm_header(in, "P5", w, h, maxval, comment);
  float scale = 1.0f;
  std::istringstream cs(comment);
  std::string tag;
  while (cs >> tag) {
    if (tag == "depth_scale") cs >> scale;
  }
  if (maxval != 65535) throw IoError("expected 16-bit depth PGM: " + path);
  DepthMap depth;
  depth.width = w;
  depth.height = h;
  depth.depth.resize(size_t(w) * h);
  std::vector<uint8_t> row(size_t(w) * 2);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), row.size());
    if (!in) throw IoError("truncated PGM: " + path);
    for (int x = 0; x < w; ++x) {
      const uint16_t q = static_cast<uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
      depth.at(x, y) = scale * q / 65535.0f;
    }
  }
  return depth;
}

void write_mask_pgm(const MaskImage& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<uint8_t> row(mask.width);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) row[x] = mask.at(x, y) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw IoError("write failed: " + path);
}

MaskImage read_mask_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  int w, h, maxval;
  std::string comment;
  read_pnm_header(in, "P5", w, h, maxval, comment);
  if (maxval > 255) throw IoError("expected 8-bit mask PGM: " + path);
  MaskImage mask;
  mask.width = w;
  mask.height = h;
  mask.active.resize(size_t(w) * h);
  in.read(reinterpret_cast<char*>(mask.active.data()), mask.active.size());
  if (!in) throw IoError("truncated PGM: " + path);
  return mask;
}

}  // namespace figsim
