#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "meetplay/pose.hpp"

namespace meetplay {

enum class GestureKind : std::size_t {
  SwayLeft,
  SwayRight,
  TwistRep,
  NodRep,
  MouthOpen,
  MouthClose,
};

inline constexpr std::size_t kGestureKindCount = 6;

inline constexpr std::array<GestureKind, kGestureKindCount> kAllGestureKinds = {
    GestureKind::SwayLeft, GestureKind::SwayRight,  GestureKind::TwistRep,
    GestureKind::NodRep,   GestureKind::MouthOpen, GestureKind::MouthClose,
};

std::string_view gesture_name(GestureKind kind);
std::optional<GestureKind> gesture_from_name(std::string_view name);

struct GestureEvent {
  GestureKind kind = GestureKind::SwayLeft;
  ParticipantId participant_id;
  std::uint64_t t_ms = 0;
  /// Excursion past the trigger, relative to the trigger, clamped to [0,1].
  double magnitude = 0.0;

  friend bool operator==(const GestureEvent&, const GestureEvent&) = default;
};

/// Per-kind event tallies, indexed by GestureKind.
using RepCounts = std::array<std::uint32_t, kGestureKindCount>;

/// An event fires when the measured signal exceeds `trigger`; the detector
/// re-arms once the signal falls back below `release`.
struct Hysteresis {
  double trigger = 0.0;
  double release = 0.0;
};

struct GestureParams {
  /// |nose.x - rolling median|.
  Hysteresis sway{0.08, 0.04};
  /// Shoulder-span compression depth, 1 - span / reference span. Entering
  /// below 0.6x the reference and recovering above 0.8x is depth 0.4 / 0.2.
  Hysteresis twist{0.4, 0.2};
  /// |nose.y - rolling median|.
  Hysteresis nod{0.05, 0.025};
  /// Mouth aspect ratio: opens above trigger, closes below release.
  Hysteresis mouth{0.35, 0.25};

  std::uint32_t sway_refractory_ms = 300;
  std::uint32_t twist_refractory_ms = 500;
  std::uint32_t nod_refractory_ms = 400;

  std::uint32_t warmup_ms = 2000;
  std::uint32_t baseline_window_ms = 2000;
  std::uint32_t span_window_ms = 5000;
  double span_percentile = 0.95;

  std::uint32_t energy_window_ms = 500;
  double energy_saturation = 0.05;
};

/// Throws Error("invalid-params") unless every threshold is positive and each
/// release is strictly below its trigger.
void validate(const GestureParams& params);

/// Vertical mouth opening over mouth width. Throws Error("missing-landmarks")
/// if any of the four mouth points is below the confidence gate.
double mouth_aperture(const KeypointSet& keypoints);
double mouth_aperture(const PoseFrame& frame);

/// Signals measured on the most recent frame, for inspection and tests.
/// Absent fields mean the detector was suspended (missing landmarks or no
/// baseline yet).
struct FrameDiagnostics {
  bool warmed_up = false;
  std::optional<double> sway_deviation;
  std::optional<double> nod_deviation;
  std::optional<double> twist_depth;
  std::optional<double> mouth_ratio;
};

/// Gesture detection state for a single participant. Not internally
/// synchronized; distinct instances may be driven from different threads.
class ParticipantTracker {
 public:
  explicit ParticipantTracker(ParticipantId id, GestureParams params = {});

  /// Throws Error("stale-frame") when t_ms does not advance.
  std::vector<GestureEvent> ingest(const PoseFrame& frame);

  /// Normalized movement over the trailing energy window, in [0,1]. Zero
  /// during warmup.
  double motion_energy() const;

  bool warmed_up() const { return warmed_up_; }
  bool mouth_open() const { return mouth_open_; }
  const FrameDiagnostics& diagnostics() const { return diagnostics_; }
  const GestureParams& params() const { return params_; }
  const ParticipantId& participant_id() const { return id_; }
  std::optional<std::uint64_t> last_t_ms() const { return last_t_ms_; }

 private:
  struct Sample {
    std::uint64_t t_ms;
    double value;
  };
  struct Motion {
    std::uint64_t t_ms;
    std::array<double, kKeypointCount> displacement;
  };

  static void push(std::deque<Sample>& window, std::uint64_t t_ms, double value,
                   std::uint32_t span_ms);
  static void evict(std::deque<Sample>& window, std::uint64_t now_ms, std::uint32_t span_ms);

  void detect_sway(const PoseFrame& frame, double deviation, std::vector<GestureEvent>& out);
  void detect_nod(const PoseFrame& frame, double deviation, std::vector<GestureEvent>& out);
  void detect_twist(const PoseFrame& frame, double depth, std::vector<GestureEvent>& out);
  void detect_mouth(const PoseFrame& frame, double ratio, std::vector<GestureEvent>& out);

  ParticipantId id_;
  GestureParams params_;

  std::optional<std::uint64_t> first_t_ms_;
  std::optional<std::uint64_t> last_t_ms_;
  std::optional<KeypointSet> previous_;
  bool warmed_up_ = false;

  std::deque<Sample> nose_x_;
  std::deque<Sample> nose_y_;
  std::deque<Sample> shoulder_span_;
  std::deque<Motion> motion_;

  bool sway_left_armed_ = true;
  bool sway_right_armed_ = true;
  bool nod_active_ = false;
  double nod_peak_ = 0.0;
  bool twist_active_ = false;
  double twist_peak_ = 0.0;
  bool mouth_open_ = false;

  // Earliest timestamp at which the next event of each kind may fire.
  std::array<std::uint64_t, kGestureKindCount> ready_at_{};

  FrameDiagnostics diagnostics_;
};

/// Routes frames to per-participant trackers and keeps rep tallies.
class GestureTracker {
 public:
  explicit GestureTracker(GestureParams params = {});

  void register_participant(const ParticipantId& id);
  bool has_participant(const ParticipantId& id) const;

  /// Throws Error("participant-unknown") or Error("stale-frame").
  std::vector<GestureEvent> ingest_frame(const PoseFrame& frame);
  std::vector<GestureEvent> ingest_frames(std::span<const PoseFrame> frames);

  double motion_energy(const ParticipantId& id) const;
  const RepCounts& rep_counts(const ParticipantId& id) const;
  const ParticipantTracker& participant(const ParticipantId& id) const;
  const GestureParams& params() const { return params_; }

 private:
  GestureParams params_;
  std::map<ParticipantId, ParticipantTracker> trackers_;
  std::map<ParticipantId, RepCounts> counts_;
};

}  // namespace meetplay
