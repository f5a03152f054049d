#include "meetplay/pose.hpp"

#include <algorithm>
#include <cmath>

namespace meetplay {

namespace {

constexpr std::array<std::string_view, kKeypointCount> kNames = {
    "nose",           "left_eye",   "right_eye",   "left_shoulder", "right_shoulder",
    "mouth_left",     "mouth_right", "mouth_top",  "mouth_bottom",
};

double unit(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

std::string_view keypoint_name(KeypointId id) { return kNames[static_cast<std::size_t>(id)]; }

std::optional<KeypointId> keypoint_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<KeypointId>(i);
  }
  return std::nullopt;
}

Keypoint clamped(Keypoint kp) { return {unit(kp.x), unit(kp.y), unit(kp.confidence)}; }

}  // namespace meetplay
