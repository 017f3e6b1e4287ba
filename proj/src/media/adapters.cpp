#include "vidiag/media/adapters.h"

#include <utility>

#include "json.hpp"

namespace vidiag::media {
namespace {

nlohmann::json chroma_json(const std::array<double, 12>& chroma) {
  nlohmann::json arr = nlohmann::json::array();
  for (double c : chroma) arr.push_back(c);
  return arr;
}

nlohmann::json bgm_payload(const BgmSummary& s) {
  return {{"tempo_bpm", s.tempo_bpm},
          {"chroma", chroma_json(s.chroma)},
          {"music_present", s.music_present}};
}

template <typename T>
AdapterResult<T> fixture_result(const std::string& tool, ToolStatus status,
                                const std::string& note, const T& value,
                                nlohmann::json payload) {
  AdapterResult<T> r;
  if (status == ToolStatus::failure) {
    r.outcome = ToolOutcome::failed(tool, 0, note.empty() ? "fixture failure" : note);
    return r;
  }
  if (status == ToolStatus::fallback) {
    r.outcome = ToolOutcome::degraded(tool, 0, std::move(payload),
                                      note.empty() ? "fixture fallback" : note);
  } else {
    r.outcome = ToolOutcome::ok(tool, 0, std::move(payload));
    r.outcome.note = note;
  }
  r.value = value;
  return r;
}

}  // namespace

AdapterResult<Transcript> NullAsrAdapter::transcribe(const AudioBlock&) {
  AdapterResult<Transcript> r;
  r.outcome = ToolOutcome::degraded("asr", 0, {{"segments", 0}},
                                    "null adapter: empty transcript");
  r.value = Transcript{};
  return r;
}

AdapterResult<double> NullTextVideoSimAdapter::similarity(const std::string&,
                                                          const std::vector<Frame>&) {
  AdapterResult<double> r;
  r.outcome = ToolOutcome::degraded("text_video_sim", 0, {{"similarity", 0.5}},
                                    "null adapter: neutral similarity");
  r.value = 0.5;
  return r;
}

AdapterResult<double> NullTextAudioSimAdapter::similarity(const std::string&,
                                                          const std::string&) {
  AdapterResult<double> r;
  r.outcome = ToolOutcome::degraded("text_audio_sim", 0, {{"similarity", 0.5}},
                                    "null adapter: neutral similarity");
  r.value = 0.5;
  return r;
}

AdapterResult<double> NullLipSyncProxyAdapter::correlation(const std::vector<double>&,
                                                           const std::vector<double>&) {
  AdapterResult<double> r;
  r.outcome = ToolOutcome::degraded("lip_sync_proxy", 0, {{"correlation", 0.0}},
                                    "null adapter: zero correlation");
  r.value = 0.0;
  return r;
}

AdapterResult<BgmSummary> NullBgmFeatureAdapter::analyze(const AudioBlock&) {
  AdapterResult<BgmSummary> r;
  BgmSummary neutral;
  r.outcome = ToolOutcome::degraded("bgm_features", 0, bgm_payload(neutral),
                                    "null adapter: no music analysis");
  r.value = neutral;
  return r;
}

AdapterResult<double> NullSourceSeparationAdapter::separate(const AudioBlock&) {
  AdapterResult<double> r;
  r.outcome = ToolOutcome::degraded("source_separation", 0, {{"vocal_ratio", 0.0}},
                                    "null adapter: no separation");
  r.value = 0.0;
  return r;
}

FixtureAsrAdapter::FixtureAsrAdapter(Transcript value, ToolStatus status,
                                     std::string note)
    : value_(std::move(value)), status_(status), note_(std::move(note)) {}

AdapterResult<Transcript> FixtureAsrAdapter::transcribe(const AudioBlock&) {
  return fixture_result<Transcript>(
      "asr", status_, note_, value_,
      {{"segments", static_cast<int>(value_.segments.size())}});
}

FixtureTextVideoSimAdapter::FixtureTextVideoSimAdapter(double value, ToolStatus status,
                                                       std::string note)
    : value_(value), status_(status), note_(std::move(note)) {}

AdapterResult<double> FixtureTextVideoSimAdapter::similarity(
    const std::string&, const std::vector<Frame>&) {
  return fixture_result<double>("text_video_sim", status_, note_, value_,
                                {{"similarity", value_}});
}

FixtureTextAudioSimAdapter::FixtureTextAudioSimAdapter(double value, ToolStatus status,
                                                       std::string note)
    : value_(value), status_(status), note_(std::move(note)) {}

AdapterResult<double> FixtureTextAudioSimAdapter::similarity(const std::string&,
                                                             const std::string&) {
  return fixture_result<double>("text_audio_sim", status_, note_, value_,
                                {{"similarity", value_}});
}

FixtureLipSyncProxyAdapter::FixtureLipSyncProxyAdapter(double value, ToolStatus status,
                                                       std::string note)
    : value_(value), status_(status), note_(std::move(note)) {}

AdapterResult<double> FixtureLipSyncProxyAdapter::correlation(
    const std::vector<double>&, const std::vector<double>&) {
  return fixture_result<double>("lip_sync_proxy", status_, note_, value_,
                                {{"correlation", value_}});
}

FixtureBgmFeatureAdapter::FixtureBgmFeatureAdapter(BgmSummary value, ToolStatus status,
                                                   std::string note)
    : value_(value), status_(status), note_(std::move(note)) {}

AdapterResult<BgmSummary> FixtureBgmFeatureAdapter::analyze(const AudioBlock&) {
  return fixture_result<BgmSummary>("bgm_features", status_, note_, value_,
                                    bgm_payload(value_));
}

FixtureSourceSeparationAdapter::FixtureSourceSeparationAdapter(double value,
                                                               ToolStatus status,
                                                               std::string note)
    : value_(value), status_(status), note_(std::move(note)) {}

AdapterResult<double> FixtureSourceSeparationAdapter::separate(const AudioBlock&) {
  return fixture_result<double>("source_separation", status_, note_, value_,
                                {{"vocal_ratio", value_}});
}

AdapterSet null_adapters() {
  AdapterSet set;
  set.asr = std::make_shared<NullAsrAdapter>();
  set.text_video = std::make_shared<NullTextVideoSimAdapter>();
  set.text_audio = std::make_shared<NullTextAudioSimAdapter>();
  set.lip_sync = std::make_shared<NullLipSyncProxyAdapter>();
  set.bgm = std::make_shared<NullBgmFeatureAdapter>();
  set.separation = std::make_shared<NullSourceSeparationAdapter>();
  return set;
}

}  // namespace vidiag::media
