#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vidiag/media/frame.h"
#include "vidiag/media/types.h"

namespace vidiag::media {

/// Value + outcome pair returned by every external-tool adapter.
/// Invariant: value.has_value() iff outcome.status != failure.
template <typename T>
struct AdapterResult {
  ToolOutcome outcome;
  std::optional<T> value;

  bool usable() const { return value.has_value(); }
};

struct BgmSummary {
  double tempo_bpm = 0.0;
  std::array<double, 12> chroma{};
  bool music_present = false;
};

class AsrAdapter {
 public:
  virtual ~AsrAdapter() = default;
  virtual AdapterResult<Transcript> transcribe(const AudioBlock& audio) = 0;
};

class TextVideoSimAdapter {
 public:
  virtual ~TextVideoSimAdapter() = default;
  virtual AdapterResult<double> similarity(const std::string& text,
                                           const std::vector<Frame>& frames) = 0;
};

class TextAudioSimAdapter {
 public:
  virtual ~TextAudioSimAdapter() = default;
  virtual AdapterResult<double> similarity(const std::string& text_a,
                                           const std::string& text_b) = 0;
};

class LipSyncProxyAdapter {
 public:
  virtual ~LipSyncProxyAdapter() = default;
  /// Correlation in [-1, 1] between mouth-region motion and audio energy.
  virtual AdapterResult<double> correlation(const std::vector<double>& mouth_motion,
                                            const std::vector<double>& energy) = 0;
};

class BgmFeatureAdapter {
 public:
  virtual ~BgmFeatureAdapter() = default;
  virtual AdapterResult<BgmSummary> analyze(const AudioBlock& audio) = 0;
};

class SourceSeparationAdapter {
 public:
  virtual ~SourceSeparationAdapter() = default;
  /// Estimated vocal-to-total energy ratio in [0, 1].
  virtual AdapterResult<double> separate(const AudioBlock& audio) = 0;
};

// Null adapters: always report fallback with a neutral value so the
// pipeline can keep running without any external ML backend.
class NullAsrAdapter final : public AsrAdapter {
 public:
  AdapterResult<Transcript> transcribe(const AudioBlock& audio) override;
};

class NullTextVideoSimAdapter final : public TextVideoSimAdapter {
 public:
  AdapterResult<double> similarity(const std::string& text,
                                   const std::vector<Frame>& frames) override;
};

class NullTextAudioSimAdapter final : public TextAudioSimAdapter {
 public:
  AdapterResult<double> similarity(const std::string& text_a,
                                   const std::string& text_b) override;
};

class NullLipSyncProxyAdapter final : public LipSyncProxyAdapter {
 public:
  AdapterResult<double> correlation(const std::vector<double>& mouth_motion,
                                    const std::vector<double>& energy) override;
};

class NullBgmFeatureAdapter final : public BgmFeatureAdapter {
 public:
  AdapterResult<BgmSummary> analyze(const AudioBlock& audio) override;
};

class NullSourceSeparationAdapter final : public SourceSeparationAdapter {
 public:
  AdapterResult<double> separate(const AudioBlock& audio) override;
};

// Fixture adapters: return one canned result, for tests.
class FixtureAsrAdapter final : public AsrAdapter {
 public:
  FixtureAsrAdapter(Transcript value, ToolStatus status = ToolStatus::success,
                    std::string note = "");
  AdapterResult<Transcript> transcribe(const AudioBlock& audio) override;

 private:
  Transcript value_;
  ToolStatus status_;
  std::string note_;
};

class FixtureTextVideoSimAdapter final : public TextVideoSimAdapter {
 public:
  FixtureTextVideoSimAdapter(double value, ToolStatus status = ToolStatus::success,
                             std::string note = "");
  AdapterResult<double> similarity(const std::string& text,
                                   const std::vector<Frame>& frames) override;

 private:
  double value_;
  ToolStatus status_;
  std::string note_;
};

class FixtureTextAudioSimAdapter final : public TextAudioSimAdapter {
 public:
  FixtureTextAudioSimAdapter(double value, ToolStatus status = ToolStatus::success,
                             std::string note = "");
  AdapterResult<double> similarity(const std::string& text_a,
                                   const std::string& text_b) override;

 private:
  double value_;
  ToolStatus status_;
  std::string note_;
};

class FixtureLipSyncProxyAdapter final : public LipSyncProxyAdapter {
 public:
  FixtureLipSyncProxyAdapter(double value, ToolStatus status = ToolStatus::success,
                             std::string note = "");
  AdapterResult<double> correlation(const std::vector<double>& mouth_motion,
                                    const std::vector<double>& energy) override;

 private:
  double value_;
  ToolStatus status_;
  std::string note_;
};

class FixtureBgmFeatureAdapter final : public BgmFeatureAdapter {
 public:
  FixtureBgmFeatureAdapter(BgmSummary value, ToolStatus status = ToolStatus::success,
                           std::string note = "");
  AdapterResult<BgmSummary> analyze(const AudioBlock& audio) override;

 private:
  BgmSummary value_;
  ToolStatus status_;
  std::string note_;
};

class FixtureSourceSeparationAdapter final : public SourceSeparationAdapter {
 public:
  FixtureSourceSeparationAdapter(double value, ToolStatus status = ToolStatus::success,
                                 std::string note = "");
  AdapterResult<double> separate(const AudioBlock& audio) override;

 private:
  double value_;
  ToolStatus status_;
  std::string note_;
};

/// Bundle of adapters consumed by preprocessing and the evaluation pipeline.
struct AdapterSet {
  std::shared_ptr<AsrAdapter> asr;
  std::shared_ptr<TextVideoSimAdapter> text_video;
  std::shared_ptr<TextAudioSimAdapter> text_audio;
  std::shared_ptr<LipSyncProxyAdapter> lip_sync;
  std::shared_ptr<BgmFeatureAdapter> bgm;
  std::shared_ptr<SourceSeparationAdapter> separation;
};

/// Full set of null adapters: everything degrades to fallback.
AdapterSet null_adapters();

}  // namespace vidiag::media
