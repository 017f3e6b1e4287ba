#include "vidiag/media/audio.h"

#include <cmath>
#include <stdexcept>

namespace vidiag::media {

std::vector<double> energy_envelope(const std::vector<double>& samples, int sample_rate) {
  if (sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");
  size_t hop = static_cast<size_t>(sample_rate) / 20;  // 50 ms
  if (hop == 0) hop = 1;
  std::vector<double> envelope;
  for (size_t begin = 0; begin < samples.size(); begin += hop) {
    size_t end = std::min(samples.size(), begin + hop);
    double acc = 0;
    for (size_t i = begin; i < end; ++i) acc += samples[i] * samples[i];
    envelope.push_back(std::sqrt(acc / static_cast<double>(end - begin)));
  }
  return envelope;
}

bool sustained_energy(const std::vector<double>& envelope, double threshold) {
  if (envelope.empty()) return false;
  size_t hot = 0;
  for (double v : envelope)
    if (v > threshold) ++hot;
  return hot * 2 >= envelope.size();
}

}  // namespace vidiag::media
