#pragma once

#include "vidiag/media/frame.h"

namespace vidiag::media {

/// Structural similarity over the luma plane, averaged over non-overlapping
/// 8x8 windows, constants C1=(0.01*255)^2, C2=(0.03*255)^2. Symmetric;
/// 1.0 for identical frames. Throws std::invalid_argument on size mismatch.
double compute_ssim(const Frame& a, const Frame& b);

/// Color histogram shift: per-channel 32-bin normalized histograms,
/// distance 0.5 * sum |h_a - h_b| averaged over the three planes.
/// 0 for identical frames, 1 for disjoint color supports.
double compute_hist_shift(const Frame& a, const Frame& b);

/// Coarse motion proxy: 16x16 block matching with a +-8 px search window
/// (SAD on luma, ties broken toward the smaller displacement); returns the
/// mean displacement magnitude in pixels. Throws std::invalid_argument when
/// the frames hold no complete block.
double compute_flow_magnitude(const Frame& a, const Frame& b);

/// Reference implementations: plain single-threaded loops with the same
/// contracts. The public entry points above must agree with these exactly
/// (bit-identical doubles); the parallel kernels keep per-unit results in
/// index order and reduce serially to guarantee it.
namespace serial {
double compute_ssim(const Frame& a, const Frame& b);
double compute_hist_shift(const Frame& a, const Frame& b);
double compute_flow_magnitude(const Frame& a, const Frame& b);
}  // namespace serial

}  // namespace vidiag::media
