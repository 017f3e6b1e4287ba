#pragma once

#include <filesystem>
#include <vector>

#include "vidiag/media/frame.h"

namespace vidiag::media {

struct VideoFile {
  std::vector<Frame> frames;
  double fps = 0.0;
};

/// Uncompressed YUV4MPEG2 (C444) writer/reader, the native clip format used
/// by the test fixtures and the clip synthesizer.
void write_y4m(const std::filesystem::path& path, const std::vector<Frame>& frames,
               int fps_num, int fps_den = 1);
VideoFile read_y4m(const std::filesystem::path& path);

struct AudioFile {
  std::vector<double> samples;  // mono, [-1, 1]
  int sample_rate = 0;
};

/// 16-bit PCM WAV; stereo inputs are downmixed to mono on read.
void write_wav(const std::filesystem::path& path, const std::vector<double>& samples,
               int sample_rate);
AudioFile read_wav(const std::filesystem::path& path);

/// Minimal RGB PNG encoder (zlib-deflated, filter 0) for frame caches.
void write_png(const std::filesystem::path& path, const Frame& frame);

/// The audio sidecar convention for native clips: `clip.y4m` + `clip.wav`.
std::filesystem::path audio_sidecar_for(const std::filesystem::path& video_path);

}  // namespace vidiag::media
