// Inverse kinematics (positions -> per-joint Euler rotations) and the forward
// map used to verify it.
//
// Rotation bookkeeping: every non-leaf joint carries one local rotation that
// orients the bone toward its primary child (leaves carry none), giving the
// [N, 12, 3] series. A joint's local rotation maps the child's T-pose offset
// onto the observed bone direction, expressed in the frame accumulated down
// the chain. The root rotation is the pelvis frame built from SpineBase,
// HipLeft and SpineShoulder.
//
// Euler convention: R = Rz(tz) * Rx(tx) * Ry(ty), right-hand rule about each
// T-pose axis. Under this convention a square sitting pose decomposes to
// hip tx = -90 deg and knee tx = +90 deg.

#pragma once

#include "stskit/model.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace stskit::kin {

inline constexpr double kOrthoTol = 1e-9;

inline bool is_rotation(const Mat3& R, double tol = kOrthoTol) {
  return (R.transpose() * R - Mat3::Identity()).norm() <= tol &&
         std::abs(R.determinant() - 1.0) <= tol;
}

inline Mat3 rot_x(double a) {
  Mat3 R;
  R << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return R;
}
inline Mat3 rot_y(double a) {
  Mat3 R;
  R << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return R;
}
inline Mat3 rot_z(double a) {
  Mat3 R;
  R << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return R;
}

inline Mat3 skew(const Vec3& w) {
  Mat3 W;
  W << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return W;
}

// Minimal rotation R with R*u = v (inputs normalized internally).
// General case is Rodrigues' formula R = I + W + W^2 (1-c)/|w|^2 with
// w = u x v, c = u . v; the factor is evaluated as 2/|u+v|^2, which is the
// same quantity without the cancellation near c = 1. The antiparallel
// singularity rotates pi about the axis u x e, where e is the first standard
// basis vector not parallel to u.
inline Mat3 rotation_between(const Vec3& u_in, const Vec3& v_in) {
  const double nu = u_in.norm(), nv = v_in.norm();
  if (nu <= 0.0 || nv <= 0.0)
    throw std::invalid_argument("rotation_between: zero-norm input");
  const Vec3 u = u_in / nu, v = v_in / nv;
  const Vec3 sum = u + v;
  const double s2 = sum.squaredNorm();  // = 2(1+c)
  if (s2 < 1e-16) {
    Vec3 axis = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Unit(k);
      Vec3 cr = u.cross(e);
      if (cr.norm() > 1e-6) {
        axis = cr.normalized();
        break;
      }
    }
    return 2.0 * axis * axis.transpose() - Mat3::Identity();
  }
  const Mat3 W = skew(u.cross(v));
  return Mat3::Identity() + W + W * W * (2.0 / s2);
}

// Z-X-Y decomposition: angles (tz, tx, ty) with R = Rz Rx Ry, each in
// (-pi, pi]. Gimbal lock (|tx| = 90 deg) folds the free angle into tz and
// sets ty = 0.
inline Vec3 euler_zxy(const Mat3& R) {
  const auto half_open = [](double a) { return a == -kPi ? kPi : a; };
  const double sx = std::clamp(R(2, 1), -1.0, 1.0);
  const double tx = std::asin(sx);
  if (std::abs(sx) > 1.0 - 1e-10) {
    return Vec3(half_open(std::atan2(R(1, 0), R(0, 0))), tx, 0.0);
  }
  return Vec3(half_open(std::atan2(-R(0, 1), R(1, 1))), tx,
              half_open(std::atan2(-R(2, 0), R(2, 2))));
}

inline Mat3 euler_zxy_matrix(const Vec3& zxy) {
  return rot_z(zxy.x()) * rot_x(zxy.y()) * rot_y(zxy.z());
}

// Pelvis frame from one skeleton frame: X along SpineBase->HipLeft, Y the
// Gram-Schmidt component of SpineBase->SpineShoulder, Z their cross product.
inline Mat3 root_rotation(const SkeletonFrame& f) {
  const Vec3 lat_raw = f.pos(JointId::HipLeft) - f.pos(JointId::SpineBase);
  const Vec3 up_raw = f.pos(JointId::SpineShoulder) - f.pos(JointId::SpineBase);
  const double nl = lat_raw.norm(), nup = up_raw.norm();
  if (nl < 1e-9 || nup < 1e-9)
    throw std::invalid_argument("root_rotation: degenerate joint positions");
  const Vec3 lat = lat_raw / nl;
  Vec3 up = up_raw - up_raw.dot(lat) * lat;
  if (up.norm() < 1e-9 * nup)
    throw std::invalid_argument("root_rotation: collinear joints");
  up.normalize();
  Mat3 R;
  R.col(0) = lat;
  R.col(1) = up;
  R.col(2) = lat.cross(up);
  return R;
}

// Observed direction of the bone parent(child)->child in the frame given by
// the accumulated rotation R of the chain above the bone.
inline Vec3 child_direction(const SkeletonFrame& f, JointId child, const Mat3& R) {
  auto par = parent_of(child);
  if (!par) throw std::invalid_argument("child_direction: root has no parent");
  return R.transpose() * (f.pos(child) - f.pos(*par));
}

inline std::array<double, kJointCount> average_bone_lengths(const SkeletonSeries& s) {
  if (s.empty())
    throw std::invalid_argument("average_bone_lengths: empty series");
  std::array<double, kJointCount> out{};
  for (const auto& f : s.frames) {
    for (int i = 0; i < kJointCount; ++i) {
      auto par = parent_of(JointId(i));
      if (!par) continue;
      out[size_t(i)] += (f.pos(JointId(i)) - f.pos(*par)).norm();
    }
  }
  for (auto& v : out) v /= double(s.size());
  return out;
}

// Builds a T-pose model whose bone lengths come from the data (directions keep
// the canonical convention).
inline TPoseModel tpose_from_series(const SkeletonSeries& s) {
  TPoseModel m = TPoseModel::standard();
  auto lens = average_bone_lengths(s);
  for (int i = 0; i < kJointCount; ++i)
    if (parent_of(JointId(i))) m.length[size_t(i)] = lens[size_t(i)];
  return m;
}

// ---------------------------------------------------------------------------

struct JointRotationSeries {
  // frames x 12 x (tz, tx, ty) radians, non-leaf joints in enumeration order
  std::vector<std::array<Vec3, kRotationJointCount>> frames;
  std::vector<double> timestamps;
  double rate_hz = 20.0;

  size_t size() const { return frames.size(); }
};

struct IkNote {
  int frame = 0;
  JointId joint = JointId::SpineBase;
  std::string reason;
};

struct IkResult {
  JointRotationSeries rotations;
  std::vector<IkNote> notes;  // degenerate frames: carried forward, flagged
};

inline IkResult solve_ik(const SkeletonSeries& series, const TPoseModel& tpose) {
  IkResult res;
  res.rotations.rate_hz = series.rate_hz;
  res.rotations.frames.reserve(series.size());
  res.rotations.timestamps.reserve(series.size());

  // carry-forward state for degenerate frames
  std::array<Mat3, kJointCount> prev_loc;
  prev_loc.fill(Mat3::Identity());

  for (size_t fi = 0; fi < series.size(); ++fi) {
    const auto& f = series.frames[fi];
    std::array<Mat3, kJointCount> loc = prev_loc;
    std::array<Mat3, kJointCount> glob;
    glob.fill(Mat3::Identity());

    try {
      loc[size_t(JointId::SpineBase)] = root_rotation(f);
    } catch (const std::invalid_argument&) {
      res.notes.push_back({int(fi), JointId::SpineBase, "degenerate-root"});
    }
    glob[size_t(JointId::SpineBase)] = loc[size_t(JointId::SpineBase)];

    for (int i = 1; i < kJointCount; ++i) {
      const JointId j = JointId(i);
      if (is_leaf(j)) continue;
      const JointId child = *primary_child(j);
      const JointId par = *parent_of(j);
      const Vec3 v = child_direction(f, child, glob[size_t(par)]);
      if (v.norm() < 1e-9) {
        res.notes.push_back({int(fi), j, "zero-length-bone"});
      } else {
        loc[size_t(j)] = rotation_between(tpose.offset_of(child), v);
      }
      glob[size_t(j)] = glob[size_t(par)] * loc[size_t(j)];
    }

    std::array<Vec3, kRotationJointCount> angles{};
    for (int k = 0; k < kRotationJointCount; ++k)
      angles[size_t(k)] = euler_zxy(loc[size_t(rotation_joints()[size_t(k)])]);
    res.rotations.frames.push_back(angles);
    res.rotations.timestamps.push_back(f.t);
    prev_loc = loc;
  }
  return res;
}

inline SkeletonSeries forward_kinematics(const JointRotationSeries& rot,
                                         const TPoseModel& tpose,
                                         const std::vector<Vec3>& root_positions,
                                         Sensor sensor = Sensor::Kinect) {
  if (rot.frames.size() != root_positions.size() ||
      rot.frames.size() != rot.timestamps.size())
    throw std::invalid_argument("forward_kinematics: shape mismatch");

  SkeletonSeries out;
  out.rate_hz = rot.rate_hz;
  out.sensor = sensor;
  out.frames.reserve(rot.size());

  for (size_t fi = 0; fi < rot.size(); ++fi) {
    SkeletonFrame f;
    f.t = rot.timestamps[fi];
    std::array<Mat3, kJointCount> glob;
    glob.fill(Mat3::Identity());

    f.pos(JointId::SpineBase) = root_positions[fi];
    glob[size_t(JointId::SpineBase)] =
        euler_zxy_matrix(rot.frames[fi][size_t(rotation_index(JointId::SpineBase))]);

    for (int i = 1; i < kJointCount; ++i) {
      const JointId j = JointId(i);
      const JointId par = *parent_of(j);
      f.pos(j) = f.pos(par) +
                 glob[size_t(par)] * (tpose.length_of(j) * tpose.offset_of(j));
      if (!is_leaf(j)) {
        const int k = rotation_index(j);
        glob[size_t(j)] =
            glob[size_t(par)] * euler_zxy_matrix(rot.frames[fi][size_t(k)]);
      }
    }
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace stskit::kin
