#pragma once

#include <cstdint>
#include <vector>

namespace vidiag::media {

/// One decoded video frame, planar YUV 4:4:4 full range (BT.601 matrix).
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> y;
  std::vector<uint8_t> u;
  std::vector<uint8_t> v;

  bool valid() const {
    size_t n = static_cast<size_t>(width) * height;
    return width > 0 && height > 0 && y.size() == n && u.size() == n && v.size() == n;
  }
  bool same_size(const Frame& o) const { return width == o.width && height == o.height; }
  bool operator==(const Frame& o) const {
    return width == o.width && height == o.height && y == o.y && u == o.u && v == o.v;
  }
};

struct Yuv {
  uint8_t y, u, v;
};

Yuv rgb_to_yuv(uint8_t r, uint8_t g, uint8_t b);
void yuv_to_rgb(uint8_t y, uint8_t u, uint8_t v, uint8_t& r, uint8_t& g, uint8_t& b);

/// Constant-color frame from an RGB triple.
Frame solid_frame(int width, int height, uint8_t r, uint8_t g, uint8_t b);

/// Reproducible high-frequency texture for motion tests.
Frame textured_frame(int width, int height, uint64_t seed);

/// Adds rounded Gaussian noise (stddev sigma) to the luma plane.
Frame add_luma_noise(const Frame& f, double sigma, uint64_t seed);

/// Translates the frame by (dx, dy) with wrap-around.
Frame shift_wrap(const Frame& f, int dx, int dy);

/// Box-downscales so height does not exceed max_height (aspect preserved).
Frame downscale_to_height(const Frame& f, int max_height);

}  // namespace vidiag::media
