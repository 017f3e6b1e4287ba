#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vidiag/media/frame.h"
#include "vidiag/media/io.h"

using namespace vidiag;

namespace {

constexpr uint8_t kPalette[6][3] = {{200, 40, 40}, {40, 200, 40},  {40, 40, 200},
                                    {200, 200, 40}, {40, 200, 200}, {200, 40, 200}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthesizes deterministic test clips (y4m video + wav sidecar)"};

  std::string out;
  int segments = 3, frames_per_segment = 30, width = 64, height = 48, fps = 30;
  int sample_rate = 16000;
  double noise = 0.0, freq = 440.0, amplitude = 0.4;
  uint64_t seed = 0;
  std::string audio = "sine";
  bool textured = false;

  app.add_option("--out", out, "output .y4m path")->required();
  app.add_option("--segments", segments, "number of solid-colour segments")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  app.add_option("--frames-per-segment", frames_per_segment, "frames per segment")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--width", width)->capture_default_str();
  app.add_option("--height", height)->capture_default_str();
  app.add_option("--fps", fps)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--noise", noise, "luma noise sigma")->capture_default_str();
  app.add_flag("--textured", textured, "textured segments instead of solid colours");
  app.add_option("--seed", seed, "texture/noise seed");
  app.add_option("--audio", audio, "sine|silence|none")
      ->check(CLI::IsMember({"sine", "silence", "none"}))
      ->capture_default_str();
  app.add_option("--freq", freq, "sine frequency in Hz")->capture_default_str();
  app.add_option("--amplitude", amplitude, "sine amplitude")->capture_default_str();
  app.add_option("--sample-rate", sample_rate)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::vector<media::Frame> frames;
    for (int seg = 0; seg < segments; ++seg) {
      media::Frame base =
          textured ? media::textured_frame(width, height, seed + static_cast<uint64_t>(seg))
                   : media::solid_frame(width, height, kPalette[seg][0], kPalette[seg][1],
                                        kPalette[seg][2]);
      for (int i = 0; i < frames_per_segment; ++i) {
        if (noise > 0.0)
          frames.push_back(media::add_luma_noise(
              base, noise, seed + static_cast<uint64_t>(seg * frames_per_segment + i)));
        else
          frames.push_back(base);
      }
    }
    media::write_y4m(out, frames, fps);

    if (audio != "none") {
      const double duration =
          static_cast<double>(segments * frames_per_segment) / static_cast<double>(fps);
      std::vector<double> samples(
          static_cast<size_t>(duration * static_cast<double>(sample_rate)));
      if (audio == "sine")
        for (size_t i = 0; i < samples.size(); ++i)
          samples[i] = amplitude * std::sin(2.0 * 3.14159265358979323846 * freq *
                                            static_cast<double>(i) /
                                            static_cast<double>(sample_rate));
      media::write_wav(media::audio_sidecar_for(out), samples, sample_rate);
    }

    std::cout << out << ": " << frames.size() << " frames @ " << fps << " fps, audio "
              << audio << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
