#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "vidiag/config.h"
#include "vidiag/media/adapters.h"
#include "vidiag/media/audio.h"
#include "vidiag/media/frame.h"
#include "vidiag/media/io.h"
#include "vidiag/media/metrics.h"
#include "vidiag/media/preprocess.h"
#include "vidiag/media/shots.h"
#include "vidiag/media/subprocess.h"
#include "vidiag/media/types.h"

using namespace vidiag;
using namespace vidiag::media;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("vidiag-media-test-" + tag + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<Frame> color_segments(const std::vector<std::array<uint8_t, 3>>& colors,
                                  int frames_per_segment, int w = 64, int h = 48) {
  std::vector<Frame> frames;
  for (const auto& c : colors)
    for (int i = 0; i < frames_per_segment; ++i)
      frames.push_back(solid_frame(w, h, c[0], c[1], c[2]));
  return frames;
}

std::vector<double> sine_samples(double freq_hz, double duration_sec, int rate,
                                 double amplitude) {
  std::vector<double> s(static_cast<size_t>(duration_sec * rate));
  for (size_t i = 0; i < s.size(); ++i)
    s[i] = amplitude * std::sin(2.0 * M_PI * freq_hz * i / rate);
  return s;
}

// Test-side histogram-shift oracle, written independently of the kernel.
double hist_oracle(const Frame& a, const Frame& b) {
  auto channel = [](const std::vector<uint8_t>& pa, const std::vector<uint8_t>& pb) {
    std::array<double, 32> ha{}, hb{};
    for (uint8_t v : pa) ha[v / 8] += 1.0;
    for (uint8_t v : pb) hb[v / 8] += 1.0;
    double d = 0.0;
    for (int i = 0; i < 32; ++i)
      d += std::abs(ha[i] / pa.size() - hb[i] / pb.size());
    return 0.5 * d;
  };
  return (channel(a.y, b.y) + channel(a.u, b.u) + channel(a.v, b.v)) / 3.0;
}

// Test-side SSIM oracle: direct two-loop evaluation of the windowed formula.
double ssim_oracle(const Frame& a, const Frame& b) {
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double c2 = (0.03 * 255) * (0.03 * 255);
  const int win = 8;
  int tiles_x = a.width / win, tiles_y = a.height / win;
  int x0 = 0, y0 = 0, tw = win, th = win;
  double total = 0.0;
  int count = 0;
  auto eval = [&](int bx, int by, int w, int h) {
    double ma = 0, mb = 0;
    for (int y = by; y < by + h; ++y)
      for (int x = bx; x < bx + w; ++x) {
        ma += a.y[y * a.width + x];
        mb += b.y[y * b.width + x];
      }
    const double n = static_cast<double>(w) * h;
    ma /= n;
    mb /= n;
    double va = 0, vb = 0, cov = 0;
    for (int y = by; y < by + h; ++y)
      for (int x = bx; x < bx + w; ++x) {
        const double da = a.y[y * a.width + x] - ma;
        const double db = b.y[y * b.width + x] - mb;
        va += da * da;
        vb += db * db;
        cov += da * db;
      }
    va /= n;
    vb /= n;
    cov /= n;
    return ((2 * ma * mb + c1) * (2 * cov + c2)) /
           ((ma * ma + mb * mb + c1) * (va + vb + c2));
  };
  if (tiles_x == 0 || tiles_y == 0) return eval(x0, y0, a.width, a.height);
  for (int ty = 0; ty < tiles_y; ++ty)
    for (int tx = 0; tx < tiles_x; ++tx) {
      total += eval(tx * tw, ty * th, tw, th);
      ++count;
    }
  return total / count;
}

AdapterSet fixture_adapters() {
  AdapterSet set = null_adapters();
  Transcript t;
  t.segments.push_back({0.2, 1.4, "hello there", 0});
  t.segments.push_back({1.6, 2.4, "welcome back", 1});
  set.asr = std::make_shared<FixtureAsrAdapter>(t);
  set.separation = std::make_shared<FixtureSourceSeparationAdapter>(0.4);
  return set;
}

// Writes the canonical 3-segment fixture clip (tone audio sidecar) and
// returns the video path.
fs::path write_fixture_clip(const fs::path& dir, bool with_audio = true) {
  std::vector<Frame> frames = color_segments(
      {{{200, 30, 30}}, {{30, 200, 30}}, {{30, 30, 200}}}, 30);
  const fs::path video = dir / "clip.y4m";
  write_y4m(video, frames, 30);
  if (with_audio) {
    write_wav(audio_sidecar_for(video), sine_samples(440.0, 3.0, 16000, 0.4), 16000);
  }
  return video;
}

bool same_media(const std::optional<MediaInfo>& a, const std::optional<MediaInfo>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->duration_sec == b->duration_sec && a->width == b->width &&
         a->height == b->height && a->fps == b->fps &&
         a->audio_present == b->audio_present &&
         a->audio_sample_rate == b->audio_sample_rate;
}

bool same_shots(const std::vector<Shot>& a, const std::vector<Shot>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].index != b[i].index || a[i].start_frame != b[i].start_frame ||
        a[i].end_frame != b[i].end_frame || a[i].start_sec != b[i].start_sec ||
        a[i].end_sec != b[i].end_sec)
      return false;
  return true;
}

bool same_boundaries(const std::vector<BoundaryMetrics>& a,
                     const std::vector<BoundaryMetrics>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].boundary_index != b[i].boundary_index || a[i].ssim != b[i].ssim ||
        a[i].hist_shift != b[i].hist_shift ||
        a[i].flow_magnitude != b[i].flow_magnitude)
      return false;
  return true;
}

bool same_outcome_modulo_latency(const ToolOutcome& a, const ToolOutcome& b) {
  return a.tool_name == b.tool_name && a.status == b.status && a.payload == b.payload &&
         a.note == b.note;
}

std::vector<std::string> trace_names(const std::vector<ToolOutcome>& trace) {
  std::vector<std::string> names;
  for (const auto& t : trace) names.push_back(t.tool_name);
  return names;
}

}  // namespace

TEST_CASE("metric identities hold on every fixture frame") {
  std::vector<Frame> fixtures = {
      solid_frame(64, 48, 255, 0, 0),  solid_frame(64, 48, 0, 0, 0),
      solid_frame(64, 48, 255, 255, 255), textured_frame(64, 48, 1),
      textured_frame(128, 96, 2),      add_luma_noise(textured_frame(64, 48, 3), 5.0, 4),
  };
  for (const Frame& f : fixtures) {
    CAPTURE(f.width);
    CHECK(compute_ssim(f, f) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(compute_hist_shift(f, f) == 0.0);
    if (f.width >= 16 && f.height >= 16) CHECK(compute_flow_magnitude(f, f) == 0.0);
  }
}

TEST_CASE("ssim separates structure change from noise") {
  const Frame black = solid_frame(64, 64, 0, 0, 0);
  const Frame white = solid_frame(64, 64, 255, 255, 255);
  const double got = compute_ssim(black, white);

  // Closed-form value for two constant plates: C1 / (255^2 + C1).
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double expect = c1 / (255.0 * 255.0 + c1);
  CHECK(got == doctest::Approx(expect).epsilon(1e-9));
  CHECK(got < 0.05);

  const Frame base = textured_frame(64, 64, 11);
  const Frame noisy = add_luma_noise(base, 2.0, 12);
  const double noisy_ssim = compute_ssim(base, noisy);
  CHECK(noisy_ssim > 0.9);
  CHECK(noisy_ssim < 1.0);
  CHECK(noisy_ssim == doctest::Approx(ssim_oracle(base, noisy)).epsilon(1e-12));

  CHECK(compute_ssim(base, white) == doctest::Approx(ssim_oracle(base, white)).epsilon(1e-12));
  CHECK_THROWS_AS(compute_ssim(black, solid_frame(32, 32, 0, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("histogram shift matches the brute-force oracle") {
  const Frame red = solid_frame(64, 48, 255, 0, 0);
  const Frame blue = solid_frame(64, 48, 0, 0, 255);
  CHECK(compute_hist_shift(red, blue) == 1.0);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    const Frame a = textured_frame(80, 60, rng());
    const Frame b = textured_frame(80, 60, rng());
    const double got = compute_hist_shift(a, b);
    CHECK(got == doctest::Approx(hist_oracle(a, b)).epsilon(1e-12));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
  CHECK_THROWS_AS(compute_hist_shift(red, solid_frame(8, 8, 0, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("flow magnitude recovers global translations") {
  const Frame tex = textured_frame(128, 128, 21);
  CHECK(compute_flow_magnitude(tex, tex) == 0.0);

  const Frame uniform = solid_frame(64, 64, 90, 90, 90);
  CHECK(compute_flow_magnitude(uniform, solid_frame(64, 64, 90, 90, 90)) == 0.0);

  CHECK(compute_flow_magnitude(tex, shift_wrap(tex, 4, 0)) ==
        doctest::Approx(4.0).epsilon(0.25));
  CHECK(compute_flow_magnitude(tex, shift_wrap(tex, 3, -2)) ==
        doctest::Approx(std::sqrt(13.0)).epsilon(0.3));

  CHECK_THROWS_AS(compute_flow_magnitude(solid_frame(8, 8, 0, 0, 0),
                                         solid_frame(8, 8, 0, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("parallel kernels agree bit-for-bit with the serial references") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const Frame a = textured_frame(96 + 16 * trial, 64, rng());
    const Frame b = add_luma_noise(shift_wrap(a, trial, 1 - trial), 3.0, rng());
    CHECK(compute_ssim(a, b) == serial::compute_ssim(a, b));
    CHECK(compute_hist_shift(a, b) == serial::compute_hist_shift(a, b));
    CHECK(compute_flow_magnitude(a, b) == serial::compute_flow_magnitude(a, b));
  }
}

TEST_CASE("shot detection recovers synthetic segment structure") {
  SUBCASE("three 30-frame segments") {
    auto frames = color_segments({{{200, 30, 30}}, {{30, 200, 30}}, {{30, 30, 200}}}, 30);
    auto shots = detect_shots(frames, 0.30, 30.0);
    REQUIRE(shots.size() == 3);
    CHECK(std::abs(shots[1].start_frame - 30) <= 1);
    CHECK(std::abs(shots[2].start_frame - 60) <= 1);
    CHECK(shots[0].start_frame == 0);
    CHECK(shots[2].end_frame == 89);
    CHECK(shots[0].start_sec == doctest::Approx(0.0));
    CHECK(shots[0].end_sec == doctest::Approx(1.0).epsilon(0.05));
    CHECK(shots[2].end_sec == doctest::Approx(3.0).epsilon(0.05));
  }
  SUBCASE("constant clip is a single shot") {
    auto frames = color_segments({{{120, 120, 120}}}, 50);
    auto shots = detect_shots(frames, 0.30, 25.0);
    REQUIRE(shots.size() == 1);
    CHECK(shots[0].start_frame == 0);
    CHECK(shots[0].end_frame == 49);
  }
  SUBCASE("single frame is a single one-frame shot") {
    auto shots = detect_shots({solid_frame(32, 32, 10, 20, 30)}, 0.30, 10.0);
    REQUIRE(shots.size() == 1);
    CHECK(shots[0].start_frame == 0);
    CHECK(shots[0].end_frame == 0);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(detect_shots({}, 0.30), std::invalid_argument);
  }
  SUBCASE("partition property on random segment layouts") {
    std::mt19937_64 rng(555);
    const std::vector<std::array<uint8_t, 3>> palette = {
        {{220, 40, 40}}, {{40, 220, 40}}, {{40, 40, 220}}, {{220, 220, 40}},
        {{40, 220, 220}}};
    for (int trial = 0; trial < 5; ++trial) {
      const int n_segments = 2 + static_cast<int>(rng() % 4);
      std::vector<std::array<uint8_t, 3>> colors;
      std::vector<Frame> frames;
      std::vector<int> starts;
      int pos = 0;
      for (int s = 0; s < n_segments; ++s) {
        starts.push_back(pos);
        const int len = 20 + static_cast<int>(rng() % 15);
        for (int i = 0; i < len; ++i)
          frames.push_back(solid_frame(48, 32, palette[s % palette.size()][0],
                                       palette[s % palette.size()][1],
                                       palette[s % palette.size()][2]));
        pos += len;
      }
      auto shots = detect_shots(frames, 0.30, 24.0);
      REQUIRE(shots.size() == static_cast<size_t>(n_segments));
      // Cover: contiguous, disjoint, sorted.
      CHECK(shots.front().start_frame == 0);
      CHECK(shots.back().end_frame == static_cast<int>(frames.size()) - 1);
      for (size_t i = 0; i < shots.size(); ++i) {
        CHECK(shots[i].index == static_cast<int>(i));
        CHECK(shots[i].start_frame <= shots[i].end_frame);
        if (i > 0) CHECK(shots[i].start_frame == shots[i - 1].end_frame + 1);
        CHECK(std::abs(shots[i].start_frame - starts[i]) <= 1);
      }
    }
  }
}

TEST_CASE("representative frames are shot midpoints plus global endpoints") {
  Shot a{0, 0, 29, 0.0, 1.0};
  Shot b{1, 30, 59, 1.0, 2.0};
  Shot c{2, 60, 89, 2.0, 3.0};
  auto rep = extract_representative_frames({a, b, c}, 90);
  REQUIRE(rep.per_shot.size() == 3);
  CHECK(rep.per_shot[0] == 14);
  CHECK(rep.per_shot[1] == 44);
  CHECK(rep.per_shot[2] == 74);
  REQUIRE(rep.first.has_value());
  REQUIRE(rep.last.has_value());
  CHECK(*rep.first == 0);
  CHECK(*rep.last == 89);

  auto single = extract_representative_frames({Shot{0, 5, 5, 0.0, 0.0}}, 6);
  REQUIRE(single.per_shot.size() == 1);
  CHECK(single.per_shot[0] == 5);

  auto empty = extract_representative_frames({}, 0);
  CHECK(empty.per_shot.empty());
  CHECK_FALSE(empty.first.has_value());
  CHECK_FALSE(empty.last.has_value());
}

TEST_CASE("audio energy envelope") {
  SUBCASE("steady sine has near-constant envelope") {
    const int rate = 16000;
    auto samples = sine_samples(1000.0, 1.0, rate, 0.5);
    auto env = energy_envelope(samples, rate);
    CHECK(env.size() == static_cast<size_t>(std::ceil(1.0 / 0.05)));
    double mean = 0;
    for (double e : env) mean += e;
    mean /= env.size();
    double var = 0;
    for (double e : env) var += (e - mean) * (e - mean);
    const double cv = std::sqrt(var / env.size()) / mean;
    CHECK(cv < 0.05);
    CHECK(mean == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(0.02));
    CHECK(sustained_energy(env));
  }
  SUBCASE("silence is all zeros") {
    std::vector<double> silent(8000, 0.0);
    auto env = energy_envelope(silent, 16000);
    CHECK(env.size() == 10);
    for (double e : env) CHECK(e == 0.0);
    CHECK_FALSE(sustained_energy(env));
  }
  SUBCASE("envelope length covers a trailing partial hop") {
    std::vector<double> samples(16000 + 100, 0.1);
    auto env = energy_envelope(samples, 16000);
    CHECK(env.size() == 21);
    CHECK(env.back() == doctest::Approx(0.1));
  }
}

TEST_CASE("y4m and wav files round-trip") {
  const fs::path dir = fresh_dir("io");
  SUBCASE("y4m") {
    std::vector<Frame> frames = {textured_frame(32, 24, 1), textured_frame(32, 24, 2),
                                 solid_frame(32, 24, 200, 100, 50)};
    write_y4m(dir / "rt.y4m", frames, 24);
    VideoFile vf = read_y4m(dir / "rt.y4m");
    CHECK(vf.fps == doctest::Approx(24.0));
    REQUIRE(vf.frames.size() == 3);
    for (size_t i = 0; i < frames.size(); ++i) CHECK(vf.frames[i] == frames[i]);
  }
  SUBCASE("wav") {
    auto samples = sine_samples(440.0, 0.25, 8000, 0.8);
    write_wav(dir / "rt.wav", samples, 8000);
    AudioFile af = read_wav(dir / "rt.wav");
    CHECK(af.sample_rate == 8000);
    REQUIRE(af.samples.size() == samples.size());
    for (size_t i = 0; i < samples.size(); i += 97)
      CHECK(af.samples[i] == doctest::Approx(samples[i]).epsilon(1e-3));
  }
  SUBCASE("png signature") {
    write_png(dir / "frame.png", textured_frame(16, 16, 5));
    std::ifstream in(dir / "frame.png", std::ios::binary);
    std::array<unsigned char, 8> sig{};
    in.read(reinterpret_cast<char*>(sig.data()), 8);
    const std::array<unsigned char, 8> expect = {0x89, 'P', 'N', 'G', 0x0D, 0x0A,
                                                 0x1A, 0x0A};
    CHECK(sig == expect);
  }
}

TEST_CASE("native probe reports container facts") {
  const fs::path dir = fresh_dir("probe");
  EngineConfig config;

  std::vector<Frame> frames(100, solid_frame(320, 240, 10, 60, 90));
  write_y4m(dir / "plain.y4m", frames, 10);

  SUBCASE("video without audio") {
    auto [info, oc] = probe_video((dir / "plain.y4m").string(), config);
    REQUIRE(info.has_value());
    CHECK(oc.status == ToolStatus::success);
    CHECK(info->duration_sec == doctest::Approx(10.0).epsilon(0.01));
    CHECK(info->width == 320);
    CHECK(info->height == 240);
    CHECK(info->fps == doctest::Approx(10.0));
    CHECK_FALSE(info->audio_present);
  }
  SUBCASE("audio sidecar flips audio_present") {
    write_wav(dir / "plain.wav", sine_samples(440.0, 10.0, 8000, 0.3), 8000);
    auto [info, oc] = probe_video((dir / "plain.y4m").string(), config);
    REQUIRE(info.has_value());
    CHECK(info->audio_present);
    CHECK(info->audio_sample_rate == 8000);
  }
  SUBCASE("zero-byte file fails cleanly") {
    std::ofstream(dir / "empty.y4m").close();
    auto [info, oc] = probe_video((dir / "empty.y4m").string(), config);
    CHECK_FALSE(info.has_value());
    CHECK(oc.status == ToolStatus::failure);
    CHECK_FALSE(oc.payload.has_value());
    CHECK(oc.note.find("probe error") != std::string::npos);
  }
}

TEST_CASE("decode honors the height cap") {
  const fs::path dir = fresh_dir("decode");
  EngineConfig config;
  config.decode_max_height = 4;
  write_y4m(dir / "tall.y4m", {textured_frame(8, 8, 3), textured_frame(8, 8, 4)}, 12);
  auto [dec, oc] = decode_video((dir / "tall.y4m").string(), config);
  REQUIRE(dec.has_value());
  CHECK(oc.status == ToolStatus::success);
  CHECK(dec->fps == doctest::Approx(12.0));
  REQUIRE(dec->frames.size() == 2);
  CHECK(dec->frames[0].height == 4);
  CHECK(dec->frames[0].width == 4);
  CHECK(dec->frames[0].valid());
}

TEST_CASE("audio feature extraction degrades without audio") {
  const fs::path dir = fresh_dir("audio-feat");
  EngineConfig config;
  write_y4m(dir / "clip.y4m", {solid_frame(32, 32, 1, 2, 3)}, 10);

  auto [block, oc] = extract_audio_features((dir / "clip.y4m").string(), config);
  CHECK(oc.status == ToolStatus::fallback);
  CHECK(oc.note == "no audio stream");
  REQUIRE(oc.payload.has_value());
  CHECK(block.energy_envelope.empty());

  write_wav(dir / "clip.wav", sine_samples(500.0, 2.0, 16000, 0.4), 16000);
  auto [block2, oc2] = extract_audio_features((dir / "clip.y4m").string(), config);
  CHECK(oc2.status == ToolStatus::success);
  CHECK(block2.energy_envelope.size() == 40);
  CHECK(block2.sample_rate == 16000);
}

TEST_CASE("null and fixture adapters keep the outcome invariants") {
  AdapterSet nulls = null_adapters();
  AudioBlock audio;

  auto asr = nulls.asr->transcribe(audio);
  CHECK(asr.outcome.status == ToolStatus::fallback);
  REQUIRE(asr.value.has_value());
  CHECK(asr.value->segments.empty());
  CHECK(asr.outcome.payload.has_value());

  auto sim = nulls.text_video->similarity("x", {});
  CHECK(sim.outcome.status == ToolStatus::fallback);
  CHECK(*sim.value == 0.5);

  auto lip = nulls.lip_sync->correlation({}, {});
  CHECK(*lip.value == 0.0);

  auto bgm = nulls.bgm->analyze(audio);
  REQUIRE(bgm.value.has_value());
  CHECK_FALSE(bgm.value->music_present);

  FixtureTextVideoSimAdapter good(0.9);
  auto fixed = good.similarity("x", {});
  CHECK(fixed.outcome.status == ToolStatus::success);
  CHECK(*fixed.value == 0.9);

  FixtureAsrAdapter broken(Transcript{}, ToolStatus::failure, "asr backend down");
  auto failed = broken.transcribe(audio);
  CHECK(failed.outcome.status == ToolStatus::failure);
  CHECK_FALSE(failed.value.has_value());
  CHECK_FALSE(failed.outcome.payload.has_value());
  CHECK(failed.outcome.note == "asr backend down");
}

TEST_CASE("preprocessing runs the full fixture with every tool succeeding") {
  const fs::path dir = fresh_dir("preproc-ok");
  const fs::path video = write_fixture_clip(dir);
  EngineConfig config;

  PreprocessingOutput out =
      run_preprocessing(video.string(), fixture_adapters(), config);

  REQUIRE(out.media.has_value());
  CHECK(out.media->audio_present);
  REQUIRE(out.shots.size() == 3);
  REQUIRE(out.boundaries.size() == 2);
  CHECK(out.frames.size() == 90);
  REQUIRE(out.transcript.has_value());
  CHECK(out.transcript->segments.size() == 2);
  CHECK(out.transcript->speaker_count() == 2);
  CHECK_FALSE(out.audio.energy_envelope.empty());
  CHECK(out.audio.separated);

  // Hard scene cuts between saturated solid colors. SSIM on constant
  // plates reduces to the luminance term, so it stays fairly high; the
  // histogram shift is the decisive signal.
  for (const auto& bm : out.boundaries) {
    CHECK(bm.hist_shift > 0.9);
    CHECK(bm.ssim < 0.95);
  }

  const std::vector<std::string> expect_order = {
      "probe", "decode", "shots", "rep_frames", "boundary_metrics",
      "boundary_metrics", "audio_features", "asr", "source_separation"};
  CHECK(trace_names(out.trace) == expect_order);
  for (const auto& oc : out.trace) {
    CAPTURE(oc.tool_name);
    CHECK(oc.status == ToolStatus::success);
    CHECK(oc.payload.has_value());
  }
}

TEST_CASE("preprocessing degradation is local to the failed tool") {
  const fs::path dir = fresh_dir("preproc-degrade");
  const fs::path video = write_fixture_clip(dir);
  EngineConfig config;

  PreprocessingOutput base = run_preprocessing(video.string(), fixture_adapters(), config);

  SUBCASE("forced asr failure leaves everything else byte-identical") {
    EngineConfig broken = config;
    broken.fail_tools = {"asr"};
    PreprocessingOutput out =
        run_preprocessing(video.string(), fixture_adapters(), broken);

    CHECK_FALSE(out.transcript.has_value());
    CHECK(same_media(out.media, base.media));
    CHECK(same_shots(out.shots, base.shots));
    CHECK(same_boundaries(out.boundaries, base.boundaries));
    CHECK(out.audio.energy_envelope == base.audio.energy_envelope);
    CHECK(out.audio.sample_rate == base.audio.sample_rate);
    CHECK(out.audio.separated == base.audio.separated);
    CHECK(out.rep_frames.per_shot == base.rep_frames.per_shot);
    CHECK(out.frames.size() == base.frames.size());

    REQUIRE(out.trace.size() == base.trace.size());
    int failures = 0;
    for (size_t i = 0; i < out.trace.size(); ++i) {
      if (out.trace[i].tool_name == "asr") {
        CHECK(out.trace[i].status == ToolStatus::failure);
        CHECK(out.trace[i].note == "forced failure (config)");
        CHECK_FALSE(out.trace[i].payload.has_value());
        ++failures;
      } else {
        CHECK(same_outcome_modulo_latency(out.trace[i], base.trace[i]));
      }
    }
    CHECK(failures == 1);
  }

  SUBCASE("forced boundary metrics keep the count invariant with placeholders") {
    EngineConfig broken = config;
    broken.fail_tools = {"boundary_metrics"};
    PreprocessingOutput out =
        run_preprocessing(video.string(), fixture_adapters(), broken);
    REQUIRE(out.boundaries.size() == 2);
    for (const auto& bm : out.boundaries) {
      CHECK(bm.ssim == 0.0);
      CHECK(bm.hist_shift == 0.0);
      CHECK(bm.flow_magnitude == 0.0);
    }
    int boundary_failures = 0;
    for (const auto& oc : out.trace)
      if (oc.tool_name == "boundary_metrics") {
        CHECK(oc.status == ToolStatus::failure);
        ++boundary_failures;
      }
    CHECK(boundary_failures == 2);
    CHECK(same_shots(out.shots, base.shots));
  }

  SUBCASE("forced probe failure still decodes and segments") {
    EngineConfig broken = config;
    broken.fail_tools = {"probe"};
    PreprocessingOutput out =
        run_preprocessing(video.string(), fixture_adapters(), broken);
    CHECK_FALSE(out.media.has_value());
    CHECK(same_shots(out.shots, base.shots));  // fps falls back to the decode header
    CHECK(out.trace[0].status == ToolStatus::failure);
    CHECK(out.trace[1].status == ToolStatus::success);
  }
}

TEST_CASE("preprocessing survives hostile inputs") {
  const fs::path dir = fresh_dir("preproc-hostile");
  EngineConfig config;

  SUBCASE("zero-byte file yields a valid empty-ish output") {
    const fs::path video = dir / "empty.y4m";
    std::ofstream(video.string()).close();
    PreprocessingOutput out =
        run_preprocessing(video.string(), fixture_adapters(), config);
    CHECK_FALSE(out.media.has_value());
    CHECK(out.shots.empty());
    CHECK(out.boundaries.empty());
    CHECK(out.frames.empty());
    CHECK_FALSE(out.transcript.has_value());
    CHECK(out.audio.energy_envelope.empty());
    // probe, decode, shots, rep_frames, audio_features, asr, separation
    REQUIRE(out.trace.size() == 7);
    CHECK(out.trace[0].tool_name == "probe");
    CHECK(out.trace[0].status == ToolStatus::failure);
    CHECK(out.trace[1].status == ToolStatus::failure);
    CHECK(out.trace[4].tool_name == "audio_features");
    CHECK(out.trace[4].status == ToolStatus::fallback);
    CHECK(out.trace[5].status == ToolStatus::failure);  // asr: no audio
    CHECK(out.trace[6].status == ToolStatus::failure);
  }

  SUBCASE("foreign container degrades through the subprocess path") {
    const fs::path video = dir / "garbage.mp4";
    std::ofstream(video.string()) << "this is not a video";
    PreprocessingOutput out =
        run_preprocessing(video.string(), fixture_adapters(), config);
    CHECK_FALSE(out.media.has_value());
    CHECK(out.shots.empty());
    CHECK(out.trace[0].status == ToolStatus::failure);
    CHECK_FALSE(out.trace[0].note.empty());
    CHECK(out.trace[1].status == ToolStatus::failure);
  }

  SUBCASE("missing file") {
    PreprocessingOutput out = run_preprocessing((dir / "nope.y4m").string(),
                                                fixture_adapters(), config);
    CHECK_FALSE(out.media.has_value());
    CHECK(out.shots.empty());
    for (const auto& oc : out.trace)
      CHECK(oc.status != ToolStatus::success);
  }
}

TEST_CASE("preprocessing is deterministic and caches frames on request") {
  const fs::path dir = fresh_dir("preproc-det");
  const fs::path video = write_fixture_clip(dir);
  EngineConfig config;

  const fs::path run_a = dir / "run_a";
  const fs::path run_b = dir / "run_b";
  PreprocessingOutput a =
      run_preprocessing(video.string(), fixture_adapters(), config, run_a.string());
  PreprocessingOutput b =
      run_preprocessing(video.string(), fixture_adapters(), config, run_b.string());

  CHECK(same_media(a.media, b.media));
  CHECK(same_shots(a.shots, b.shots));
  CHECK(same_boundaries(a.boundaries, b.boundaries));
  CHECK(a.audio.energy_envelope == b.audio.energy_envelope);
  CHECK(a.rep_frames.per_shot == b.rep_frames.per_shot);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i)
    CHECK(same_outcome_modulo_latency(a.trace[i], b.trace[i]));
  REQUIRE(a.frames.size() == b.frames.size());
  CHECK(a.frames[45] == b.frames[45]);

  for (int k = 0; k < 3; ++k) {
    CAPTURE(k);
    CHECK(fs::exists(run_a / "frames" / ("shot_" + std::to_string(k) + ".png")));
  }
  CHECK(fs::exists(run_a / "trace.jsonl"));

  std::ifstream trace_in(run_a / "trace.jsonl");
  std::string text((std::istreambuf_iterator<char>(trace_in)),
                   std::istreambuf_iterator<char>());
  auto parsed = trace_from_jsonl(text);
  REQUIRE(parsed.size() == a.trace.size());
  for (size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].tool_name == a.trace[i].tool_name);
    CHECK(parsed[i].status == a.trace[i].status);
    CHECK(parsed[i].note == a.trace[i].note);
  }
}

TEST_CASE("trace jsonl round-trips and rejects unknown statuses") {
  std::vector<ToolOutcome> trace = {
      ToolOutcome::ok("probe", 1.5, {{"x", 1}}),
      ToolOutcome::degraded("audio_features", 0.25, {{"hops", 0}}, "no audio stream"),
      ToolOutcome::failed("asr", 0.0, "forced failure (config)"),
  };
  auto parsed = trace_from_jsonl(trace_to_jsonl(trace));
  REQUIRE(parsed.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(parsed[i].tool_name == trace[i].tool_name);
    CHECK(parsed[i].status == trace[i].status);
    CHECK(parsed[i].latency_ms == trace[i].latency_ms);
    CHECK(parsed[i].note == trace[i].note);
  }
  CHECK_THROWS(trace_from_jsonl("{\"tool_name\":\"x\",\"status\":\"odd\","
                                "\"latency_ms\":0,\"note\":\"\"}\n"));
}

TEST_CASE("run_command distinguishes missing binaries") {
  auto ok = run_command("true");
  CHECK(ok.exit_code == 0);
  CHECK_FALSE(ok.binary_missing);

  auto missing = run_command("definitely-not-a-real-binary-12345");
  CHECK(missing.binary_missing);

  auto failing = run_command("ls /definitely/not/a/path/12345");
  CHECK(failing.exit_code != 0);
  CHECK_FALSE(failing.binary_missing);
  CHECK_FALSE(failing.output.empty());
}
