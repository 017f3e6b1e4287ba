#include "vidiag/media/shots.h"

#include <algorithm>
#include <stdexcept>

#include "vidiag/media/metrics.h"

namespace vidiag::media {

namespace {

double local_median(const std::vector<double>& d, int center, int window) {
  int half = window / 2;
  int lo = std::max(0, center - half);
  int hi = std::min(static_cast<int>(d.size()) - 1, center + half);
  std::vector<double> values(d.begin() + lo, d.begin() + hi + 1);
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::vector<Shot> detect_shots(const std::vector<Frame>& frames, double threshold,
                               double fps, int guard_window) {
  if (frames.empty()) throw std::invalid_argument("need at least one frame");

  int n = static_cast<int>(frames.size());
  std::vector<double> dist(n > 1 ? n - 1 : 0);
  for (int i = 0; i + 1 < n; ++i) dist[i] = compute_hist_shift(frames[i], frames[i + 1]);

  std::vector<int> cuts;  // boundary after frame i
  for (int i = 0; i + 1 < n; ++i) {
    if (dist[i] <= threshold) continue;
    if (dist[i] < 2.0 * local_median(dist, i, guard_window)) continue;
    cuts.push_back(i);
  }

  std::vector<Shot> shots;
  int start = 0;
  auto close_shot = [&](int end) {
    Shot s;
    s.index = static_cast<int>(shots.size());
    s.start_frame = start;
    s.end_frame = end;
    if (fps > 0) {
      s.start_sec = start / fps;
      s.end_sec = (end + 1) / fps;
    }
    shots.push_back(s);
    start = end + 1;
  };
  for (int cut : cuts) close_shot(cut);
  close_shot(n - 1);
  return shots;
}

RepFrames extract_representative_frames(const std::vector<Shot>& shots, int frame_count) {
  RepFrames rep;
  for (const auto& s : shots) rep.per_shot.push_back((s.start_frame + s.end_frame) / 2);
  if (frame_count > 0) {
    rep.first = 0;
    rep.last = frame_count - 1;
  }
  return rep;
}

}  // namespace vidiag::media
