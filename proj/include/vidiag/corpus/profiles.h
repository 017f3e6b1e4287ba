#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "vidiag/corpus/types.h"

namespace vidiag::corpus {

struct ProfileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The seven shipped profiles: story_first, visual_heavy, audio_emotion,
/// sync_perfectionist, creative_dreamer, casual_vlogger, detail_obsessive.
const std::vector<UserProfile>& builtin_profiles();

/// The equal-weight baseline (0.25 each) used by the analysis suite.
UserProfile neutral_profile();

/// Parses a JSON array of profiles from a file. Every returned profile
/// satisfies the UserProfile invariants; weights not summing to 1 are
/// rejected with the offending sum in the error message.
std::vector<UserProfile> load_profiles(const std::filesystem::path& path);
std::vector<UserProfile> parse_profiles(const std::string& json_text);

/// Closed registry of hard-constraint identifiers.
const std::vector<std::string>& hard_constraint_registry();

/// Validates one profile against the invariants; throws ProfileError.
void check_profile(const UserProfile& p);

}  // namespace vidiag::corpus
