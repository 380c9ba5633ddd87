// Canonical 17-joint skeleton model, T-pose reference, and the timestamped
// stream containers shared by every other module.
//
// Coordinate conventions used throughout:
//   world:  X = azimuth (lateral), Y = depth, Z = elevation (up), meters
//   T-pose: X = subject's left,    Y = up,    Z = X x Y, dimensionless
// Angles are radians internally; file I/O and reports use degrees.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stskit {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// ---------------------------------------------------------------------------
// Joint set and hierarchy

enum class JointId : int {
  SpineBase = 0,
  SpineMid,
  SpineShoulder,
  Neck,
  Head,
  ShoulderLeft,
  ElbowLeft,
  WristLeft,
  ShoulderRight,
  ElbowRight,
  WristRight,
  HipLeft,
  KneeLeft,
  AnkleLeft,
  HipRight,
  KneeRight,
  AnkleRight,
};

inline constexpr int kJointCount = 17;
inline constexpr int kRotationJointCount = 12;  // non-leaf joints

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "SpineBase",  "SpineMid",   "SpineShoulder", "Neck",      "Head",
    "ShoulderLeft", "ElbowLeft", "WristLeft",    "ShoulderRight",
    "ElbowRight", "WristRight", "HipLeft",       "KneeLeft",  "AnkleLeft",
    "HipRight",   "KneeRight",  "AnkleRight",
};

// parent index per joint; -1 for the root (SpineBase)
inline constexpr std::array<int, kJointCount> kParentIndex = {
    -1,                                   // SpineBase
    int(JointId::SpineBase),              // SpineMid
    int(JointId::SpineMid),               // SpineShoulder
    int(JointId::SpineShoulder),          // Neck
    int(JointId::Neck),                   // Head
    int(JointId::SpineShoulder),          // ShoulderLeft
    int(JointId::ShoulderLeft),           // ElbowLeft
    int(JointId::ElbowLeft),              // WristLeft
    int(JointId::SpineShoulder),          // ShoulderRight
    int(JointId::ShoulderRight),          // ElbowRight
    int(JointId::ElbowRight),             // WristRight
    int(JointId::SpineBase),              // HipLeft
    int(JointId::HipLeft),                // KneeLeft
    int(JointId::KneeLeft),               // AnkleLeft
    int(JointId::SpineBase),              // HipRight
    int(JointId::HipRight),               // KneeRight
    int(JointId::KneeRight),              // AnkleRight
};

inline std::string_view joint_name(JointId j) { return kJointNames[size_t(j)]; }

inline std::optional<JointId> parent_of(JointId j) {
  int p = kParentIndex[size_t(j)];
  if (p < 0) return std::nullopt;
  return JointId(p);
}

inline std::vector<JointId> children_of(JointId j) {
  std::vector<JointId> out;
  for (int i = 0; i < kJointCount; ++i)
    if (kParentIndex[size_t(i)] == int(j)) out.push_back(JointId(i));
  return out;
}

inline bool is_leaf(JointId j) {
  for (int i = 0; i < kJointCount; ++i)
    if (kParentIndex[size_t(i)] == int(j)) return false;
  return true;
}

// Non-leaf joints in enumeration order; these carry the [N, 12, 3] rotations.
inline const std::array<JointId, kRotationJointCount>& rotation_joints() {
  static const std::array<JointId, kRotationJointCount> js = [] {
    std::array<JointId, kRotationJointCount> a{};
    int k = 0;
    for (int i = 0; i < kJointCount; ++i)
      if (!is_leaf(JointId(i))) a[size_t(k++)] = JointId(i);
    return a;
  }();
  return js;
}

// Index of a non-leaf joint within the 12-rotation layout; -1 for leaves.
inline int rotation_index(JointId j) {
  const auto& js = rotation_joints();
  for (int k = 0; k < kRotationJointCount; ++k)
    if (js[size_t(k)] == j) return k;
  return -1;
}

// The child bone whose direction defines a non-leaf joint's rotation.
// SpineBase is special-cased (pelvis frame, see kinematics::root_rotation);
// SpineShoulder's remaining children (the shoulders) ride along rigidly.
inline std::optional<JointId> primary_child(JointId j) {
  switch (j) {
    case JointId::SpineBase: return std::nullopt;
    case JointId::SpineMid: return JointId::SpineShoulder;
    case JointId::SpineShoulder: return JointId::Neck;
    case JointId::Neck: return JointId::Head;
    case JointId::ShoulderLeft: return JointId::ElbowLeft;
    case JointId::ElbowLeft: return JointId::WristLeft;
    case JointId::ShoulderRight: return JointId::ElbowRight;
    case JointId::ElbowRight: return JointId::WristRight;
    case JointId::HipLeft: return JointId::KneeLeft;
    case JointId::KneeLeft: return JointId::AnkleLeft;
    case JointId::HipRight: return JointId::KneeRight;
    case JointId::KneeRight: return JointId::AnkleRight;
    default: return std::nullopt;  // leaves
  }
}

// ---------------------------------------------------------------------------
// Sensors

enum class Sensor { Radar, Kinect, Wearable };

inline std::string_view sensor_name(Sensor s) {
  switch (s) {
    case Sensor::Radar: return "radar";
    case Sensor::Kinect: return "kinect";
    case Sensor::Wearable: return "wearable";
  }
  return "?";
}

enum class GyroPlacement { Waist, ThighLeft, ThighRight, ShankLeft, ShankRight };

inline constexpr std::array<GyroPlacement, 5> kAllPlacements = {
    GyroPlacement::Waist, GyroPlacement::ThighLeft, GyroPlacement::ThighRight,
    GyroPlacement::ShankLeft, GyroPlacement::ShankRight};

inline std::string_view placement_name(GyroPlacement p) {
  switch (p) {
    case GyroPlacement::Waist: return "waist";
    case GyroPlacement::ThighLeft: return "thigh_l";
    case GyroPlacement::ThighRight: return "thigh_r";
    case GyroPlacement::ShankLeft: return "shank_l";
    case GyroPlacement::ShankRight: return "shank_r";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// T-pose model

// Per-joint unit offset direction (from parent, T-pose axes) and bone length.
// Root entries are unused.
struct TPoseModel {
  std::array<Vec3, kJointCount> offset{};
  std::array<double, kJointCount> length{};

  const Vec3& offset_of(JointId j) const { return offset[size_t(j)]; }
  double length_of(JointId j) const { return length[size_t(j)]; }

  // Anthropometric defaults; all values are configuration, nothing downstream
  // hard-codes them.
  static TPoseModel standard() {
    TPoseModel m;
    auto set = [&m](JointId j, const Vec3& u, double L) {
      m.offset[size_t(j)] = u;
      m.length[size_t(j)] = L;
    };
    const Vec3 up(0, 1, 0), down(0, -1, 0), left(1, 0, 0), right(-1, 0, 0);
    set(JointId::SpineBase, Vec3::Zero(), 0.0);
    set(JointId::SpineMid, up, 0.20);
    set(JointId::SpineShoulder, up, 0.20);
    set(JointId::Neck, up, 0.10);
    set(JointId::Head, up, 0.15);
    set(JointId::ShoulderLeft, left, 0.18);
    set(JointId::ElbowLeft, left, 0.30);
    set(JointId::WristLeft, left, 0.27);
    set(JointId::ShoulderRight, right, 0.18);
    set(JointId::ElbowRight, right, 0.30);
    set(JointId::WristRight, right, 0.27);
    set(JointId::HipLeft, left, 0.12);
    set(JointId::KneeLeft, down, 0.45);
    set(JointId::AnkleLeft, down, 0.42);
    set(JointId::HipRight, right, 0.12);
    set(JointId::KneeRight, down, 0.45);
    set(JointId::AnkleRight, down, 0.42);
    return m;
  }

  // T-pose joint positions with SpineBase at the origin.
  std::array<Vec3, kJointCount> rest_positions() const {
    std::array<Vec3, kJointCount> p{};
    p[size_t(JointId::SpineBase)] = Vec3::Zero();
    for (int i = 0; i < kJointCount; ++i) {
      auto par = parent_of(JointId(i));
      if (!par) continue;
      p[size_t(i)] = p[size_t(*par)] + length[size_t(i)] * offset[size_t(i)];
    }
    return p;
  }
};

// ---------------------------------------------------------------------------
// Streams

struct SkeletonFrame {
  double t = 0.0;  // seconds, epoch-based
  std::array<Vec3, kJointCount> p{};

  const Vec3& pos(JointId j) const { return p[size_t(j)]; }
  Vec3& pos(JointId j) { return p[size_t(j)]; }
};

struct SkeletonSeries {
  std::vector<SkeletonFrame> frames;
  double rate_hz = 20.0;  // nominal
  Sensor sensor = Sensor::Kinect;

  size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

struct GyroSample {
  double t = 0.0;
  Vec3 w_dps = Vec3::Zero();  // angular velocity, degrees/second
};

struct GyroStream {
  GyroPlacement placement = GyroPlacement::Waist;
  std::vector<GyroSample> samples;
  double rate_hz = 100.0;  // nominal
};

// ---------------------------------------------------------------------------
// Validation (never aborts; reports every broken invariant)

struct Violation {
  int frame = -1;  // -1 when not tied to a specific frame
  std::string rule;
};

inline std::vector<Violation> validate_series(const SkeletonSeries& s) {
  std::vector<Violation> out;
  if (!(s.rate_hz > 0.0)) out.push_back({-1, "positive-rate"});
  for (size_t i = 0; i < s.frames.size(); ++i) {
    const auto& f = s.frames[i];
    if (!std::isfinite(f.t)) out.push_back({int(i), "finite-timestamp"});
    if (i > 0 && !(f.t > s.frames[i - 1].t))
      out.push_back({int(i), "monotonic-time"});
    bool finite = true;
    for (const auto& v : f.p)
      finite = finite && v.allFinite();
    if (!finite) out.push_back({int(i), "finite-positions"});
  }
  return out;
}

inline std::vector<Violation> validate_stream(const GyroStream& g) {
  std::vector<Violation> out;
  if (!(g.rate_hz > 0.0)) out.push_back({-1, "positive-rate"});
  for (size_t i = 0; i < g.samples.size(); ++i) {
    if (!std::isfinite(g.samples[i].t)) out.push_back({int(i), "finite-timestamp"});
    if (i > 0 && !(g.samples[i].t > g.samples[i - 1].t))
      out.push_back({int(i), "monotonic-time"});
    if (!g.samples[i].w_dps.allFinite()) out.push_back({int(i), "finite-samples"});
  }
  return out;
}

}  // namespace stskit
