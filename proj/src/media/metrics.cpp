#include "vidiag/media/metrics.h"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace vidiag::media {
namespace {

constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
constexpr int kSsimWindow = 8;
constexpr int kBlock = 16;
constexpr int kSearch = 8;

void require_same_size(const Frame& a, const Frame& b) {
  if (!a.valid() || !b.valid() || !a.same_size(b))
    throw std::invalid_argument("frames must be valid and equally sized");
}

double ssim_window(const Frame& a, const Frame& b, int x0, int y0, int w, int h) {
  double sum_a = 0, sum_b = 0;
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) {
      size_t i = static_cast<size_t>(y) * a.width + x;
      sum_a += a.y[i];
      sum_b += b.y[i];
    }
  double n = static_cast<double>(w) * h;
  double mu_a = sum_a / n, mu_b = sum_b / n;
  double var_a = 0, var_b = 0, cov = 0;
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) {
      size_t i = static_cast<size_t>(y) * a.width + x;
      double da = a.y[i] - mu_a, db = b.y[i] - mu_b;
      var_a += da * da;
      var_b += db * db;
      cov += da * db;
    }
  var_a /= n;
  var_b /= n;
  cov /= n;
  return ((2 * mu_a * mu_b + kC1) * (2 * cov + kC2)) /
         ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
}

struct WindowGrid {
  int cols, rows, w, h;
};

WindowGrid ssim_grid(const Frame& a) {
  if (a.width >= kSsimWindow && a.height >= kSsimWindow)
    return {a.width / kSsimWindow, a.height / kSsimWindow, kSsimWindow, kSsimWindow};
  return {1, 1, a.width, a.height};  // tiny frame: one window over everything
}

double reduce_mean(const std::vector<double>& values) {
  double sum = 0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

using ChannelHist = std::array<int64_t, 32>;

void accumulate_hist(const std::vector<uint8_t>& plane, size_t begin, size_t end,
                     ChannelHist& hist) {
  for (size_t i = begin; i < end; ++i) hist[plane[i] >> 3]++;
}

double hist_distance(const ChannelHist& ha, const ChannelHist& hb, double n) {
  double d = 0;
  for (int i = 0; i < 32; ++i) d += std::fabs(ha[i] / n - hb[i] / n);
  return 0.5 * d;
}

struct BlockMatch {
  int dx = 0, dy = 0;
};

BlockMatch match_block(const Frame& a, const Frame& b, int x0, int y0) {
  int64_t best_sad = -1;
  int best_r2 = 0;
  BlockMatch best;
  for (int dy = -kSearch; dy <= kSearch; ++dy) {
    int ty = y0 + dy;
    if (ty < 0 || ty + kBlock > a.height) continue;
    for (int dx = -kSearch; dx <= kSearch; ++dx) {
      int tx = x0 + dx;
      if (tx < 0 || tx + kBlock > a.width) continue;
      int64_t sad = 0;
      for (int y = 0; y < kBlock; ++y) {
        size_t ai = static_cast<size_t>(y0 + y) * a.width + x0;
        size_t bi = static_cast<size_t>(ty + y) * b.width + tx;
        for (int x = 0; x < kBlock; ++x) sad += std::abs(int(a.y[ai + x]) - int(b.y[bi + x]));
      }
      int r2 = dx * dx + dy * dy;
      bool better = best_sad < 0 || sad < best_sad ||
                    (sad == best_sad && (r2 < best_r2 ||
                                         (r2 == best_r2 && (dy < best.dy ||
                                                            (dy == best.dy && dx < best.dx)))));
      if (better) {
        best_sad = sad;
        best_r2 = r2;
        best = {dx, dy};
      }
    }
  }
  return best;
}

}  // namespace

namespace serial {

double compute_ssim(const Frame& a, const Frame& b) {
  require_same_size(a, b);
  WindowGrid g = ssim_grid(a);
  std::vector<double> values(static_cast<size_t>(g.cols) * g.rows);
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c)
      values[static_cast<size_t>(r) * g.cols + c] =
          ssim_window(a, b, c * g.w, r * g.h, g.w, g.h);
  return reduce_mean(values);
}

double compute_hist_shift(const Frame& a, const Frame& b) {
  require_same_size(a, b);
  size_t n = a.y.size();
  const std::vector<uint8_t>* planes_a[3] = {&a.y, &a.u, &a.v};
  const std::vector<uint8_t>* planes_b[3] = {&b.y, &b.u, &b.v};
  double total = 0;
  for (int ch = 0; ch < 3; ++ch) {
    ChannelHist ha{}, hb{};
    accumulate_hist(*planes_a[ch], 0, n, ha);
    accumulate_hist(*planes_b[ch], 0, n, hb);
    total += hist_distance(ha, hb, static_cast<double>(n));
  }
  return total / 3.0;
}

double compute_flow_magnitude(const Frame& a, const Frame& b) {
  require_same_size(a, b);
  int cols = a.width / kBlock, rows = a.height / kBlock;
  if (cols < 1 || rows < 1)
    throw std::invalid_argument("frames smaller than one 16x16 block");
  std::vector<double> magnitudes(static_cast<size_t>(cols) * rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      BlockMatch m = match_block(a, b, c * kBlock, r * kBlock);
      magnitudes[static_cast<size_t>(r) * cols + c] =
          std::sqrt(double(m.dx) * m.dx + double(m.dy) * m.dy);
    }
  return reduce_mean(magnitudes);
}

}  // namespace serial

double compute_ssim(const Frame& a, const Frame& b) {
  require_same_size(a, b);
  WindowGrid g = ssim_grid(a);
  std::vector<double> values(static_cast<size_t>(g.cols) * g.rows);
  int total = g.cols * g.rows;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < total; ++i) {
    int r = i / g.cols, c = i % g.cols;
    values[static_cast<size_t>(i)] = ssim_window(a, b, c * g.w, r * g.h, g.w, g.h);
  }
  return reduce_mean(values);
}

double compute_hist_shift(const Frame& a, const Frame& b) {
  require_same_size(a, b);
  size_t n = a.y.size();
  const std::vector<uint8_t>* planes_a[3] = {&a.y, &a.u, &a.v};
  const std::vector<uint8_t>* planes_b[3] = {&b.y, &b.u, &b.v};

  // Integer counts reduce exactly in any grouping, so chunked accumulation
  // matches the serial single pass bit for bit.
  constexpr size_t kChunk = 1 << 16;
  size_t chunks = (n + kChunk - 1) / kChunk;
  double total = 0;
  for (int ch = 0; ch < 3; ++ch) {
    std::vector<ChannelHist> parts_a(chunks, ChannelHist{});
    std::vector<ChannelHist> parts_b(chunks, ChannelHist{});
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(chunks); ++k) {
      size_t begin = static_cast<size_t>(k) * kChunk;
      size_t end = std::min(n, begin + kChunk);
      accumulate_hist(*planes_a[ch], begin, end, parts_a[k]);
      accumulate_hist(*planes_b[ch], begin, end, parts_b[k]);
    }
    ChannelHist ha{}, hb{};
    for (size_t k = 0; k < chunks; ++k)
      for (int i = 0; i < 32; ++i) {
        ha[i] += parts_a[k][i];
        hb[i] += parts_b[k][i];
      }
    total += hist_distance(ha, hb, static_cast<double>(n));
  }
  return total / 3.0;
}

double compute_flow_magnitude(const Frame& a, const Frame& b) {
  require_same_size(a, b);
  int cols = a.width / kBlock, rows = a.height / kBlock;
  if (cols < 1 || rows < 1)
    throw std::invalid_argument("frames smaller than one 16x16 block");
  std::vector<double> magnitudes(static_cast<size_t>(cols) * rows);
  int total = cols * rows;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < total; ++i) {
    int r = i / cols, c = i % cols;
    BlockMatch m = match_block(a, b, c * kBlock, r * kBlock);
    magnitudes[static_cast<size_t>(i)] = std::sqrt(double(m.dx) * m.dx + double(m.dy) * m.dy);
  }
  return reduce_mean(magnitudes);
}

}  // namespace vidiag::media
