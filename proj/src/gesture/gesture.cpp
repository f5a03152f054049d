#include "meetplay/gesture.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "meetplay/error.hpp"
#include "meetplay/quantile.hpp"

namespace meetplay {

namespace {

constexpr std::array<std::string_view, kGestureKindCount> kNames = {
    "SwayLeft", "SwayRight", "TwistRep", "NodRep", "MouthOpen", "MouthClose",
};

std::size_t index(GestureKind kind) { return static_cast<std::size_t>(kind); }

double excess_ratio(double excursion, double threshold) {
  return std::clamp((excursion - threshold) / threshold, 0.0, 1.0);
}

void check_hysteresis(const Hysteresis& h, std::string_view name) {
  if (!(h.trigger > 0.0) || !(h.release > 0.0)) {
    throw Error("invalid-params", std::string(name) + " thresholds must be positive");
  }
  if (!(h.release < h.trigger)) {
    throw Error("invalid-params", std::string(name) + " release must be below trigger");
  }
}

template <typename Window>
std::vector<double> sorted_values(const Window& window) {
  std::vector<double> values;
  values.reserve(window.size());
  for (const auto& s : window) values.push_back(s.value);
  std::sort(values.begin(), values.end());
  return values;
}

double distance(const Keypoint& a, const Keypoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

std::string_view gesture_name(GestureKind kind) { return kNames[index(kind)]; }

std::optional<GestureKind> gesture_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<GestureKind>(i);
  }
  return std::nullopt;
}

void validate(const GestureParams& p) {
  check_hysteresis(p.sway, "sway");
  check_hysteresis(p.twist, "twist");
  check_hysteresis(p.nod, "nod");
  check_hysteresis(p.mouth, "mouth");
  if (p.sway_refractory_ms == 0 || p.twist_refractory_ms == 0 || p.nod_refractory_ms == 0) {
    throw Error("invalid-params", "refractory periods must be positive");
  }
  if (p.warmup_ms == 0 || p.baseline_window_ms == 0 || p.span_window_ms == 0 ||
      p.energy_window_ms == 0) {
    throw Error("invalid-params", "window lengths must be positive");
  }
  if (!(p.span_percentile > 0.0 && p.span_percentile <= 1.0)) {
    throw Error("invalid-params", "span percentile must be in (0,1]");
  }
  if (!(p.energy_saturation > 0.0)) {
    throw Error("invalid-params", "energy saturation must be positive");
  }
}

double mouth_aperture(const KeypointSet& kp) {
  const auto& left = kp[KeypointId::MouthLeft];
  const auto& right = kp[KeypointId::MouthRight];
  const auto& top = kp[KeypointId::MouthTop];
  const auto& bottom = kp[KeypointId::MouthBottom];
  if (!left.visible() || !right.visible() || !top.visible() || !bottom.visible()) {
    throw Error("missing-landmarks", "mouth landmarks below confidence gate");
  }
  return std::abs(top.y - bottom.y) / std::max(std::abs(right.x - left.x), 1e-6);
}

double mouth_aperture(const PoseFrame& frame) { return mouth_aperture(frame.keypoints); }

// ---------------------------------------------------------------------------
// ParticipantTracker

ParticipantTracker::ParticipantTracker(ParticipantId id, GestureParams params)
    : id_(std::move(id)), params_(params) {
  validate(params_);
}

void ParticipantTracker::evict(std::deque<Sample>& window, std::uint64_t now_ms,
                               std::uint32_t span_ms) {
  while (!window.empty() && window.front().t_ms + span_ms <= now_ms) window.pop_front();
}

void ParticipantTracker::push(std::deque<Sample>& window, std::uint64_t t_ms, double value,
                              std::uint32_t span_ms) {
  window.push_back({t_ms, value});
  evict(window, t_ms, span_ms);
}

std::vector<GestureEvent> ParticipantTracker::ingest(const PoseFrame& frame) {
  const std::uint64_t t = frame.t_ms;
  if (last_t_ms_ && t <= *last_t_ms_) {
    throw Error("stale-frame", "frame t_ms " + std::to_string(t) + " does not advance past " +
                                   std::to_string(*last_t_ms_));
  }
  if (!first_t_ms_) first_t_ms_ = t;
  last_t_ms_ = t;

  const KeypointSet& kp = frame.keypoints;

  Motion motion{t, {}};
  if (previous_) {
    for (auto id : kAllKeypoints) {
      const auto& now = kp[id];
      const auto& before = (*previous_)[id];
      if (now.visible() && before.visible()) {
        motion.displacement[static_cast<std::size_t>(id)] = distance(now, before);
      }
    }
  }
  motion_.push_back(motion);
  while (!motion_.empty() && motion_.front().t_ms + params_.energy_window_ms <= t) {
    motion_.pop_front();
  }
  previous_ = kp;

  // Baselines come from prior frames only; the current frame joins the
  // windows after detection.
  evict(nose_x_, t, params_.baseline_window_ms);
  evict(nose_y_, t, params_.baseline_window_ms);
  evict(shoulder_span_, t, params_.span_window_ms);

  diagnostics_ = FrameDiagnostics{};
  warmed_up_ = t - *first_t_ms_ >= params_.warmup_ms;
  diagnostics_.warmed_up = warmed_up_;

  const auto& nose = kp[KeypointId::Nose];
  const auto& ls = kp[KeypointId::LeftShoulder];
  const auto& rs = kp[KeypointId::RightShoulder];
  const bool shoulders = ls.visible() && rs.visible();
  const double span = shoulders ? distance(ls, rs) : 0.0;

  if (nose.visible() && !nose_x_.empty()) {
    const auto xs = sorted_values(nose_x_);
    const auto ys = sorted_values(nose_y_);
    diagnostics_.sway_deviation = nose.x - quantile_sorted(xs, 0.5);
    diagnostics_.nod_deviation = nose.y - quantile_sorted(ys, 0.5);
  }
  if (shoulders && !shoulder_span_.empty()) {
    const auto spans = sorted_values(shoulder_span_);
    const double reference = quantile_sorted(spans, params_.span_percentile);
    if (reference > 0.0) diagnostics_.twist_depth = 1.0 - span / reference;
  }
  try {
    diagnostics_.mouth_ratio = mouth_aperture(kp);
  } catch (const Error&) {
    // Mouth occluded: state is held.
  }

  std::vector<GestureEvent> events;
  if (warmed_up_) {
    if (diagnostics_.sway_deviation) detect_sway(frame, *diagnostics_.sway_deviation, events);
    if (diagnostics_.twist_depth) detect_twist(frame, *diagnostics_.twist_depth, events);
    if (diagnostics_.nod_deviation) detect_nod(frame, *diagnostics_.nod_deviation, events);
    if (diagnostics_.mouth_ratio) detect_mouth(frame, *diagnostics_.mouth_ratio, events);
  }

  if (nose.visible()) {
    push(nose_x_, t, nose.x, params_.baseline_window_ms);
    push(nose_y_, t, nose.y, params_.baseline_window_ms);
  }
  if (shoulders) push(shoulder_span_, t, span, params_.span_window_ms);

  return events;
}

void ParticipantTracker::detect_sway(const PoseFrame& frame, double dev,
                                     std::vector<GestureEvent>& out) {
  const auto& h = params_.sway;
  const std::uint64_t t = frame.t_ms;
  auto fire = [&](GestureKind kind, bool& armed, double excursion) {
    if (!armed && excursion < h.release) armed = true;
    if (armed && excursion > h.trigger && t >= ready_at_[index(kind)]) {
      out.push_back({kind, id_, t, excess_ratio(excursion, h.trigger)});
      armed = false;
      ready_at_[index(kind)] = t + params_.sway_refractory_ms;
    }
  };
  fire(GestureKind::SwayLeft, sway_left_armed_, -dev);
  fire(GestureKind::SwayRight, sway_right_armed_, dev);
}

void ParticipantTracker::detect_nod(const PoseFrame& frame, double dev,
                                    std::vector<GestureEvent>& out) {
  const auto& h = params_.nod;
  const double excursion = std::abs(dev);
  if (!nod_active_) {
    if (excursion > h.trigger) {
      nod_active_ = true;
      nod_peak_ = excursion;
    }
    return;
  }
  nod_peak_ = std::max(nod_peak_, excursion);
  if (excursion < h.release) {
    nod_active_ = false;
    const auto i = index(GestureKind::NodRep);
    if (frame.t_ms >= ready_at_[i]) {
      out.push_back({GestureKind::NodRep, id_, frame.t_ms, excess_ratio(nod_peak_, h.trigger)});
      ready_at_[i] = frame.t_ms + params_.nod_refractory_ms;
    }
  }
}

void ParticipantTracker::detect_twist(const PoseFrame& frame, double depth,
                                      std::vector<GestureEvent>& out) {
  const auto& h = params_.twist;
  if (!twist_active_) {
    if (depth > h.trigger) {
      twist_active_ = true;
      twist_peak_ = depth;
    }
    return;
  }
  twist_peak_ = std::max(twist_peak_, depth);
  if (depth < h.release) {
    twist_active_ = false;
    const auto i = index(GestureKind::TwistRep);
    if (frame.t_ms >= ready_at_[i]) {
      out.push_back(
          {GestureKind::TwistRep, id_, frame.t_ms, excess_ratio(twist_peak_, h.trigger)});
      ready_at_[i] = frame.t_ms + params_.twist_refractory_ms;
    }
  }
}

void ParticipantTracker::detect_mouth(const PoseFrame& frame, double ratio,
                                      std::vector<GestureEvent>& out) {
  const auto& h = params_.mouth;
  if (!mouth_open_ && ratio > h.trigger) {
    mouth_open_ = true;
    out.push_back({GestureKind::MouthOpen, id_, frame.t_ms, excess_ratio(ratio, h.trigger)});
  } else if (mouth_open_ && ratio < h.release) {
    mouth_open_ = false;
    out.push_back({GestureKind::MouthClose, id_, frame.t_ms,
                   std::clamp((h.release - ratio) / h.release, 0.0, 1.0)});
  }
}

double ParticipantTracker::motion_energy() const {
  if (!warmed_up_ || !previous_ || !last_t_ms_) return 0.0;
  double total = 0.0;
  std::size_t visible = 0;
  for (auto id : kAllKeypoints) {
    if (!(*previous_)[id].visible()) continue;
    ++visible;
    const auto k = static_cast<std::size_t>(id);
    for (const auto& m : motion_) {
      if (m.t_ms + params_.energy_window_ms > *last_t_ms_) total += m.displacement[k];
    }
  }
  if (visible == 0) return 0.0;
  const double mean = total / static_cast<double>(visible);
  return std::clamp(mean / params_.energy_saturation, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// GestureTracker

GestureTracker::GestureTracker(GestureParams params) : params_(params) { validate(params_); }

void GestureTracker::register_participant(const ParticipantId& id) {
  trackers_.try_emplace(id, id, params_);
  counts_.try_emplace(id, RepCounts{});
}

bool GestureTracker::has_participant(const ParticipantId& id) const {
  return trackers_.contains(id);
}

std::vector<GestureEvent> GestureTracker::ingest_frame(const PoseFrame& frame) {
  auto it = trackers_.find(frame.participant_id);
  if (it == trackers_.end()) {
    throw Error("participant-unknown", "no tracker for participant " + frame.participant_id);
  }
  auto events = it->second.ingest(frame);
  auto& counts = counts_[frame.participant_id];
  for (const auto& e : events) ++counts[index(e.kind)];
  return events;
}

std::vector<GestureEvent> GestureTracker::ingest_frames(std::span<const PoseFrame> frames) {
  std::vector<GestureEvent> all;
  for (const auto& f : frames) {
    auto events = ingest_frame(f);
    all.insert(all.end(), events.begin(), events.end());
  }
  return all;
}

const ParticipantTracker& GestureTracker::participant(const ParticipantId& id) const {
  auto it = trackers_.find(id);
  if (it == trackers_.end()) throw Error("participant-unknown", "unknown participant " + id);
  return it->second;
}

double GestureTracker::motion_energy(const ParticipantId& id) const {
  return participant(id).motion_energy();
}

const RepCounts& GestureTracker::rep_counts(const ParticipantId& id) const {
  auto it = counts_.find(id);
  if (it == counts_.end()) throw Error("participant-unknown", "unknown participant " + id);
  return it->second;
}

}  // namespace meetplay
