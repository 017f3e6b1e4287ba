#pragma once

#include <vector>

#include "vidiag/media/frame.h"
#include "vidiag/media/types.h"

namespace vidiag::media {

/// Content-based shot boundary detection. A boundary lands between frames
/// i and i+1 when the histogram shift exceeds `threshold` and is at least
/// twice the median shift over a 25-frame local window (adaptive guard).
/// The returned shots partition [0, frames-1]; fps (when > 0) fills in the
/// second-based fields.
std::vector<Shot> detect_shots(const std::vector<Frame>& frames, double threshold,
                               double fps = 0.0, int guard_window = 25);

/// Midpoint frame of each shot plus the global first and last frames.
RepFrames extract_representative_frames(const std::vector<Shot>& shots, int frame_count);

}  // namespace vidiag::media
