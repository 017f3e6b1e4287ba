#pragma once

#include <vector>

namespace vidiag::media {

/// RMS energy over 50 ms hops. Envelope length = ceil(n / hop) where
/// hop = sample_rate / 20; every value is >= 0.
std::vector<double> energy_envelope(const std::vector<double>& samples, int sample_rate);

/// Simple presence heuristic shared by the content profiler: sustained
/// energy (RMS above `threshold` in at least half the hops).
bool sustained_energy(const std::vector<double>& envelope, double threshold = 0.01);

}  // namespace vidiag::media
