#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace meetplay {

using ParticipantId = std::string;

/// Landmarks below this confidence are treated as absent.
inline constexpr double kMinKeypointConfidence = 0.3;

enum class KeypointId : std::size_t {
  Nose,
  LeftEye,
  RightEye,
  LeftShoulder,
  RightShoulder,
  MouthLeft,
  MouthRight,
  MouthTop,
  MouthBottom,
};

inline constexpr std::size_t kKeypointCount = 9;

inline constexpr std::array<KeypointId, kKeypointCount> kAllKeypoints = {
    KeypointId::Nose,         KeypointId::LeftEye,    KeypointId::RightEye,
    KeypointId::LeftShoulder, KeypointId::RightShoulder, KeypointId::MouthLeft,
    KeypointId::MouthRight,   KeypointId::MouthTop,   KeypointId::MouthBottom,
};

/// Wire name of a keypoint ("nose", "left_eye", ...).
std::string_view keypoint_name(KeypointId id);
std::optional<KeypointId> keypoint_from_name(std::string_view name);

/// A landmark in normalized tile coordinates: x grows left to right, y top to
/// bottom, both in [0,1].
struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool visible() const { return confidence >= kMinKeypointConfidence; }

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

/// Clamps coordinates and confidence into [0,1]. NaN maps to 0.
Keypoint clamped(Keypoint kp);

class KeypointSet {
 public:
  KeypointSet() = default;

  const Keypoint& operator[](KeypointId id) const { return points_[static_cast<std::size_t>(id)]; }

  /// Stores a clamped copy of `kp`.
  void set(KeypointId id, Keypoint kp) { points_[static_cast<std::size_t>(id)] = clamped(kp); }

  const std::array<Keypoint, kKeypointCount>& points() const { return points_; }

  friend bool operator==(const KeypointSet&, const KeypointSet&) = default;

 private:
  std::array<Keypoint, kKeypointCount> points_{};
};

struct PoseFrame {
  ParticipantId participant_id;
  std::uint64_t t_ms = 0;
  KeypointSet keypoints;

  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

}  // namespace meetplay
