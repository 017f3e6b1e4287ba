#include "vidiag/media/frame.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace vidiag::media {

namespace {

uint8_t clamp_byte(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

Yuv rgb_to_yuv(uint8_t r, uint8_t g, uint8_t b) {
  double rd = r, gd = g, bd = b;
  return {
      clamp_byte(0.299 * rd + 0.587 * gd + 0.114 * bd),
      clamp_byte(128.0 - 0.168736 * rd - 0.331264 * gd + 0.5 * bd),
      clamp_byte(128.0 + 0.5 * rd - 0.418688 * gd - 0.081312 * bd),
  };
}

void yuv_to_rgb(uint8_t y, uint8_t u, uint8_t v, uint8_t& r, uint8_t& g, uint8_t& b) {
  double yd = y, ud = u - 128.0, vd = v - 128.0;
  r = clamp_byte(yd + 1.402 * vd);
  g = clamp_byte(yd - 0.344136 * ud - 0.714136 * vd);
  b = clamp_byte(yd + 1.772 * ud);
}

Frame solid_frame(int width, int height, uint8_t r, uint8_t g, uint8_t b) {
  Yuv c = rgb_to_yuv(r, g, b);
  Frame f;
  f.width = width;
  f.height = height;
  size_t n = static_cast<size_t>(width) * height;
  f.y.assign(n, c.y);
  f.u.assign(n, c.u);
  f.v.assign(n, c.v);
  return f;
}

Frame textured_frame(int width, int height, uint64_t seed) {
  Frame f;
  f.width = width;
  f.height = height;
  size_t n = static_cast<size_t>(width) * height;
  f.y.resize(n);
  f.u.resize(n);
  f.v.resize(n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  for (size_t i = 0; i < n; ++i) {
    f.y[i] = static_cast<uint8_t>(dist(rng));
    f.u[i] = static_cast<uint8_t>(dist(rng));
    f.v[i] = static_cast<uint8_t>(dist(rng));
  }
  return f;
}

Frame add_luma_noise(const Frame& f, double sigma, uint64_t seed) {
  Frame out = f;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& px : out.y) px = clamp_byte(px + noise(rng));
  return out;
}

Frame shift_wrap(const Frame& f, int dx, int dy) {
  Frame out = f;
  int w = f.width, h = f.height;
  auto wrap = [](int v, int m) { return ((v % m) + m) % m; };
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      int sx = wrap(xx - dx, w);
      int sy = wrap(yy - dy, h);
      size_t to = static_cast<size_t>(yy) * w + xx;
      size_t from = static_cast<size_t>(sy) * w + sx;
      out.y[to] = f.y[from];
      out.u[to] = f.u[from];
      out.v[to] = f.v[from];
    }
  }
  return out;
}

Frame downscale_to_height(const Frame& f, int max_height) {
  if (f.height <= max_height) return f;
  double scale = static_cast<double>(max_height) / f.height;
  int nw = std::max(1, static_cast<int>(std::lround(f.width * scale)));
  int nh = max_height;
  Frame out;
  out.width = nw;
  out.height = nh;
  size_t n = static_cast<size_t>(nw) * nh;
  out.y.resize(n);
  out.u.resize(n);
  out.v.resize(n);
  for (int yy = 0; yy < nh; ++yy) {
    int y0 = yy * f.height / nh;
    int y1 = std::max(y0 + 1, (yy + 1) * f.height / nh);
    for (int xx = 0; xx < nw; ++xx) {
      int x0 = xx * f.width / nw;
      int x1 = std::max(x0 + 1, (xx + 1) * f.width / nw);
      long sy = 0, su = 0, sv = 0;
      long count = static_cast<long>(y1 - y0) * (x1 - x0);
      for (int py = y0; py < y1; ++py)
        for (int px = x0; px < x1; ++px) {
          size_t i = static_cast<size_t>(py) * f.width + px;
          sy += f.y[i];
          su += f.u[i];
          sv += f.v[i];
        }
      size_t o = static_cast<size_t>(yy) * nw + xx;
      out.y[o] = static_cast<uint8_t>((sy + count / 2) / count);
      out.u[o] = static_cast<uint8_t>((su + count / 2) / count);
      out.v[o] = static_cast<uint8_t>((sv + count / 2) / count);
    }
  }
  return out;
}

}  // namespace vidiag::media
