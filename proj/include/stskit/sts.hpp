// Sit-to-stand analysis: per-sensor angle signals, repetition segmentation,
// feature extraction, and cross-sensor repetition matching.
//
// Signal conventions (shared by skeleton- and gyro-derived paths):
//   trunk angle      sagittal tilt of SpineBase->SpineShoulder from vertical,
//                    degrees, forward (toward the sensor, -Y) positive
//   knee angle       interior thigh-shank angle, 180 deg = straight leg,
//                    left/right averaged
//   waist-thigh      interior trunk-thigh angle (180 deg when standing)
//   trunk velocity   time derivative of the trunk angle, deg/s
// Segmentation works on knee flexion (180 - knee) so sitting forms the high
// peaks, and anchors boundaries on |trunk| and waist-thigh high peaks.

#pragma once

#include "stskit/dsp.hpp"
#include "stskit/kinematics.hpp"
#include "stskit/model.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace stskit::sts {

struct SignalParams {
  double lp_cutoff_hz = 5.0;
  // drift control for integrated gyro angles: least-squares detrending by
  // default (a zero-phase high-pass slow enough to spare the STS band leaves
  // multi-degree baseline bows on sub-minute records), with an optional
  // high-pass for long recordings
  bool gyro_drift_highpass = false;
  double hp_cutoff_hz = 0.05;
  int filter_order = 2;
  double whittaker_angle_low_rate = 50.0;    // 20 Hz streams
  double whittaker_angle_high_rate = 500.0;  // 100 Hz streams
  double whittaker_vel_low_rate = 5.0;
  double whittaker_vel_high_rate = 50.0;

  double angle_lambda(double rate_hz) const {
    return rate_hz > 50.0 ? whittaker_angle_high_rate : whittaker_angle_low_rate;
  }
  double vel_lambda(double rate_hz) const {
    return rate_hz > 50.0 ? whittaker_vel_high_rate : whittaker_vel_low_rate;
  }
};

struct AnalysisSignals {
  Sensor sensor = Sensor::Kinect;
  dsp::UniformSignal trunk_deg;
  dsp::UniformSignal knee_deg;
  dsp::UniformSignal waist_thigh_deg;
  dsp::UniformSignal trunk_vel_dps;
  int degenerate_frames = 0;  // frames carried forward during derivation
};

namespace detail {

// interior angle between two 2-D (sagittal) vectors, degrees in [0, 180]
inline std::optional<double> interior_deg(double ay, double az, double by, double bz) {
  const double na = std::hypot(ay, az), nb = std::hypot(by, bz);
  if (na < 1e-9 || nb < 1e-9) return std::nullopt;
  const double cross = ay * bz - az * by;
  const double dot = ay * by + az * bz;
  return rad2deg(std::atan2(std::abs(cross), dot));
}

inline dsp::UniformSignal condition_angle(dsp::UniformSignal sig,
                                          const SignalParams& p, bool highpass) {
  const double fs = 1.0 / sig.dt;
  if (highpass)
    sig = dsp::butterworth_filtfilt(
        sig, {dsp::FilterKind::Highpass, p.hp_cutoff_hz, p.filter_order});
  sig = dsp::butterworth_filtfilt(
      sig, {dsp::FilterKind::Lowpass, p.lp_cutoff_hz, p.filter_order});
  return dsp::whittaker_smooth(sig, p.angle_lambda(fs));
}

}  // namespace detail

// Skeleton path: per-frame geometric angles, resampled to the nominal rate,
// low-pass filtered and Whittaker-smoothed. Degenerate frames reuse the
// previous value (one-sided knee/waist-thigh fall back to the valid side).
inline AnalysisSignals derive_signals_skeleton(const SkeletonSeries& series,
                                               const SignalParams& params = {}) {
  if (series.size() < 8)
    throw std::invalid_argument("derive_signals_skeleton: series too short");

  std::vector<double> ts, trunk, knee, wt;
  ts.reserve(series.size());
  int degenerate = 0;
  double prev_trunk = 0.0, prev_knee = 180.0, prev_wt = 180.0;

  for (const auto& f : series.frames) {
    ts.push_back(f.t);
    const Vec3 tv = f.pos(JointId::SpineShoulder) - f.pos(JointId::SpineBase);

    // trunk: signed sagittal tilt from vertical, forward (-Y) positive
    bool ok_trunk = std::hypot(tv.y(), tv.z()) >= 1e-9;
    double trunk_now = ok_trunk ? rad2deg(std::atan2(-tv.y(), tv.z())) : prev_trunk;

    auto knee_side = [&](JointId hip, JointId kneej, JointId ankle) {
      const Vec3 a = f.pos(hip) - f.pos(kneej);
      const Vec3 b = f.pos(ankle) - f.pos(kneej);
      return detail::interior_deg(a.y(), a.z(), b.y(), b.z());
    };
    auto wt_side = [&](JointId hip, JointId kneej) {
      const Vec3 th = f.pos(kneej) - f.pos(hip);
      return detail::interior_deg(tv.y(), tv.z(), th.y(), th.z());
    };

    auto mean_sides = [&degenerate](std::optional<double> l, std::optional<double> r,
                                    double prev) {
      if (l && r) return 0.5 * (*l + *r);
      ++degenerate;
      if (l) return *l;
      if (r) return *r;
      return prev;
    };

    double knee_now = mean_sides(
        knee_side(JointId::HipLeft, JointId::KneeLeft, JointId::AnkleLeft),
        knee_side(JointId::HipRight, JointId::KneeRight, JointId::AnkleRight),
        prev_knee);
    double wt_now =
        mean_sides(wt_side(JointId::HipLeft, JointId::KneeLeft),
                   wt_side(JointId::HipRight, JointId::KneeRight), prev_wt);
    if (!ok_trunk) ++degenerate;

    trunk.push_back(trunk_now);
    knee.push_back(knee_now);
    wt.push_back(wt_now);
    prev_trunk = trunk_now;
    prev_knee = knee_now;
    prev_wt = wt_now;
  }

  AnalysisSignals out;
  out.sensor = series.sensor;
  out.degenerate_frames = degenerate;
  const dsp::UniformSignal trunk_lp = dsp::butterworth_filtfilt(
      dsp::to_uniform(ts, trunk, series.rate_hz),
      {dsp::FilterKind::Lowpass, params.lp_cutoff_hz, params.filter_order});
  out.trunk_deg = dsp::whittaker_smooth(trunk_lp, params.angle_lambda(series.rate_hz));
  out.knee_deg = detail::condition_angle(dsp::to_uniform(ts, knee, series.rate_hz),
                                         params, false);
  out.waist_thigh_deg = detail::condition_angle(
      dsp::to_uniform(ts, wt, series.rate_hz), params, false);
  // velocity takes its own light smoothing; the heavy angle smoother would
  // clip the flexion/extension peaks at 20 Hz
  out.trunk_vel_dps = dsp::whittaker_smooth(dsp::differentiate(trunk_lp),
                                            params.vel_lambda(series.rate_hz));
  return out;
}

// Wearable path: the sagittal (x) gyro axis is integrated into segment
// inclinations (linear detrend or high-pass removes integration drift), then
// composed:
//   knee        = 180 - (thigh - shank), per side, averaged
//   waist-thigh = 180 - (waist + mean thigh)
//   trunk vel   = waist sagittal rate, filtered directly
// `flipped` marks streams worn backwards; their samples are negated first.
inline AnalysisSignals derive_signals_wearable(
    const std::map<GyroPlacement, GyroStream>& streams,
    const SignalParams& params = {},
    const std::vector<GyroPlacement>& flipped = {}) {
  for (auto p : kAllPlacements)
    if (!streams.count(p))
      throw std::invalid_argument(std::string("derive_signals_wearable: missing ") +
                                  std::string(placement_name(p)));

  auto rate = streams.begin()->second.rate_hz;
  std::map<GyroPlacement, dsp::UniformSignal> angle, omega;
  for (const auto& [p, g] : streams) {
    const double sign =
        std::find(flipped.begin(), flipped.end(), p) != flipped.end() ? -1.0 : 1.0;
    GyroStream gs = g;
    for (auto& s : gs.samples) s.w_dps *= sign;
    dsp::UniformSignal a = dsp::integrate_gyro(gs, dsp::GyroAxis::X);
    if (params.gyro_drift_highpass)
      a = dsp::butterworth_filtfilt(
          a, {dsp::FilterKind::Highpass, params.hp_cutoff_hz, params.filter_order});
    else
      a = dsp::detrend_linear(a);
    a = dsp::butterworth_filtfilt(
        a, {dsp::FilterKind::Lowpass, params.lp_cutoff_hz, params.filter_order});
    angle[p] = dsp::whittaker_smooth(a, params.angle_lambda(rate));

    std::vector<double> ts, w;
    for (const auto& s : gs.samples) {
      ts.push_back(s.t);
      w.push_back(s.w_dps.x());
    }
    omega[p] = dsp::to_uniform(ts, w, rate, "deg/s");
  }

  // common grid across the five placements
  double lo = angle.begin()->second.t0, hi = angle.begin()->second.end_time();
  for (const auto& [p, s] : angle) {
    lo = std::max(lo, s.t0);
    hi = std::min(hi, s.end_time());
  }
  const double dt = 1.0 / rate;
  const size_t n = size_t(std::floor((hi - lo) / dt + 1e-9)) + 1;
  for (auto& [p, s] : angle) s = dsp::resample_linear(s, lo, dt, n);

  const auto& waist = angle[GyroPlacement::Waist];
  const auto& tl = angle[GyroPlacement::ThighLeft];
  const auto& tr = angle[GyroPlacement::ThighRight];
  const auto& sl = angle[GyroPlacement::ShankLeft];
  const auto& sr = angle[GyroPlacement::ShankRight];

  AnalysisSignals out;
  out.sensor = Sensor::Wearable;
  out.trunk_deg = waist;
  out.knee_deg = waist;  // reuse grid metadata
  out.waist_thigh_deg = waist;
  for (size_t i = 0; i < n; ++i) {
    const double knee_l = 180.0 - (tl.v[i] - sl.v[i]);
    const double knee_r = 180.0 - (tr.v[i] - sr.v[i]);
    out.knee_deg.v[i] = 0.5 * (knee_l + knee_r);
    out.waist_thigh_deg.v[i] = 180.0 - (waist.v[i] + 0.5 * (tl.v[i] + tr.v[i]));
  }

  dsp::UniformSignal wvel = dsp::butterworth_filtfilt(
      omega[GyroPlacement::Waist],
      {dsp::FilterKind::Lowpass, params.lp_cutoff_hz, params.filter_order});
  wvel = dsp::whittaker_smooth(wvel, params.vel_lambda(rate));
  out.trunk_vel_dps = dsp::resample_linear(wvel, lo, dt, n);
  return out;
}

// ---------------------------------------------------------------------------
// Peak detection

struct PeakList {
  std::vector<int> highs, lows;
};

namespace detail {

// plateau-aware local maxima; runs touching the signal ends are not peaks
inline std::vector<int> local_maxima(const std::vector<double>& v) {
  std::vector<int> out;
  const int n = int(v.size());
  int i = 1;
  while (i + 1 <= n - 1) {
    if (v[size_t(i)] > v[size_t(i) - 1]) {
      int j = i;
      while (j + 1 < n && v[size_t(j) + 1] == v[size_t(i)]) ++j;
      if (j + 1 < n && v[size_t(j) + 1] < v[size_t(i)]) out.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

// Saddle levels on both sides of a peak: the minimum between the peak and the
// next strictly-higher sample (or the signal end) on each side.
struct Saddles {
  double left, right;
};

inline Saddles saddles_of(const std::vector<double>& v, int peak) {
  const double h = v[size_t(peak)];
  Saddles s{h, h};
  for (int i = peak - 1; i >= 0; --i) {
    if (v[size_t(i)] > h) break;
    s.left = std::min(s.left, v[size_t(i)]);
  }
  for (int i = peak + 1; i < int(v.size()); ++i) {
    if (v[size_t(i)] > h) break;
    s.right = std::min(s.right, v[size_t(i)]);
  }
  return s;
}

// Prominence against the lower of the two enclosing saddle levels. A small
// local-dominance guard (height above the HIGHER saddle) is applied on top:
// without it, any micro-wiggle on a monotone slope inherits the full depth of
// the valley below it.
inline std::vector<int> select_peaks(const std::vector<double>& v,
                                     double min_prominence, int min_sep,
                                     double local_guard) {
  std::vector<int> cand;
  for (int i : local_maxima(v)) {
    const Saddles s = saddles_of(v, i);
    const double h = v[size_t(i)];
    if (h - std::min(s.left, s.right) >= min_prominence &&
        h - std::max(s.left, s.right) >= local_guard)
      cand.push_back(i);
  }
  std::sort(cand.begin(), cand.end(), [&v](int a, int b) {
    if (v[size_t(a)] != v[size_t(b)]) return v[size_t(a)] > v[size_t(b)];
    return a < b;
  });
  std::vector<int> kept;
  for (int c : cand) {
    bool ok = true;
    for (int k : kept)
      if (std::abs(c - k) < min_sep) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace detail

inline PeakList detect_peaks(const dsp::UniformSignal& sig, double min_prominence,
                             double min_separation_s, double local_guard = 1.0) {
  if (sig.v.size() < 3)
    throw std::invalid_argument("detect_peaks: signal too short");
  const int sep = std::max(1, int(std::lround(min_separation_s / sig.dt)));
  PeakList out;
  out.highs = detail::select_peaks(sig.v, min_prominence, sep, local_guard);
  std::vector<double> neg(sig.v.size());
  for (size_t i = 0; i < sig.v.size(); ++i) neg[i] = -sig.v[i];
  out.lows = detail::select_peaks(neg, min_prominence, sep, local_guard);
  return out;
}

// ---------------------------------------------------------------------------
// Segmentation

struct SignalExtrema {
  double min = 0.0, max = 0.0;
};

struct StsRepetition {
  double t_start = 0.0;
  double t_end = 0.0;
  double sit_peak_t = 0.0;      // knee-flexion high peak
  double stand_trough_t = 0.0;  // knee-flexion low peak
  SignalExtrema trunk, knee, waist_thigh, trunk_vel;
};

struct SegmentParams {
  double knee_prominence_deg = 15.0;
  // anchors on the preparatory counter-lean (~3 deg), so below the knee scale
  double waist_prominence_deg = 1.5;
  double min_separation_s = 1.0;
  double left_window_s = 1.5;
  double right_window_s = 1.5;
};

namespace detail {

inline SignalExtrema window_extrema(const dsp::UniformSignal& s, double t0, double t1) {
  SignalExtrema e;
  bool first = true;
  for (size_t i = 0; i < s.v.size(); ++i) {
    const double t = s.time_at(i);
    if (t < t0 || t > t1) continue;
    if (first) {
      e.min = e.max = s.v[i];
      first = false;
    } else {
      e.min = std::min(e.min, s.v[i]);
      e.max = std::max(e.max, s.v[i]);
    }
  }
  return e;
}

}  // namespace detail

// Knee-flexion high peaks mark sitting, low peaks standing. Each high peak
// with a following low peak (before the next high) becomes a candidate; its
// left boundary snaps to the nearest preceding |trunk| high peak and its
// right boundary to the first following waist-thigh high peak, each within
// its search window. Candidates without both anchors, or violating
// t_start < sit <= stand < t_end, are dropped.
inline std::vector<StsRepetition> segment_sts(const AnalysisSignals& sig,
                                              const SegmentParams& params = {}) {
  const auto& knee = sig.knee_deg;
  dsp::UniformSignal flex = knee;
  for (auto& v : flex.v) v = 180.0 - v;
  dsp::UniformSignal trunk_mag = sig.trunk_deg;
  for (auto& v : trunk_mag.v) v = std::abs(v);

  // the local-dominance guard never exceeds the configured prominence
  auto guard = [](double prominence) { return std::min(1.0, 0.8 * prominence); };
  const auto kp = detect_peaks(flex, params.knee_prominence_deg,
                               params.min_separation_s,
                               guard(params.knee_prominence_deg));
  const auto wp =
      detect_peaks(trunk_mag, params.waist_prominence_deg, params.min_separation_s,
                   guard(params.waist_prominence_deg));
  const auto wtp = detect_peaks(sig.waist_thigh_deg, params.waist_prominence_deg,
                                params.min_separation_s,
                                guard(params.waist_prominence_deg));

  std::vector<StsRepetition> reps;
  for (size_t h = 0; h < kp.highs.size(); ++h) {
    const double th = flex.time_at(size_t(kp.highs[h]));
    const double th_next = (h + 1 < kp.highs.size())
                               ? flex.time_at(size_t(kp.highs[h + 1]))
                               : flex.end_time() + 1.0;

    // first standing trough after this sitting peak, before the next one
    double tl = -1.0;
    for (int li : kp.lows) {
      const double t = flex.time_at(size_t(li));
      if (t > th && t < th_next) {
        tl = t;
        break;
      }
    }
    if (tl < 0.0) continue;

    // left boundary: nearest preceding waist-angle high peak in the window
    double t_start = -1.0;
    for (int wi : wp.highs) {
      const double t = trunk_mag.time_at(size_t(wi));
      if (t >= th) break;
      if (t >= th - params.left_window_s) t_start = t;
    }
    if (t_start < 0.0) continue;

    // right boundary: nearest following waist-thigh high peak in the window
    double t_end = -1.0;
    for (int wi : wtp.highs) {
      const double t = sig.waist_thigh_deg.time_at(size_t(wi));
      if (t > tl && t <= tl + params.right_window_s) {
        t_end = t;
        break;
      }
    }
    if (t_end < 0.0) continue;

    if (!(t_start < th && th <= tl && tl < t_end)) continue;
    if (!reps.empty() && t_start < reps.back().t_end) continue;

    StsRepetition rep;
    rep.t_start = t_start;
    rep.t_end = t_end;
    rep.sit_peak_t = th;
    rep.stand_trough_t = tl;
    rep.trunk = detail::window_extrema(sig.trunk_deg, t_start, t_end);
    rep.knee = detail::window_extrema(sig.knee_deg, t_start, t_end);
    rep.waist_thigh = detail::window_extrema(sig.waist_thigh_deg, t_start, t_end);
    rep.trunk_vel = detail::window_extrema(sig.trunk_vel_dps, t_start, t_end);
    reps.push_back(rep);
  }
  return reps;
}

// ---------------------------------------------------------------------------
// Features

struct FeatureRecord {
  Sensor sensor = Sensor::Radar;
  double rep_start_s = 0.0;
  double duration_s = 0.0;
  double trunk_rom_deg = 0.0;
  double trunk_flex_pkvel_dps = 0.0;
  double trunk_ext_pkvel_dps = 0.0;
  double waist_thigh_rom_deg = 0.0;
  double knee_rom_deg = 0.0;
  bool incomplete = false;  // fewer than two opposite-signed velocity peaks
};

struct FeatureParams {
  // above preparatory/settling strokes (~8-15 deg/s) and noise, below any
  // plausible flexion/extension peak; doubles as the magnitude floor a
  // velocity peak must reach to count
  double vel_peak_prominence_dps = 20.0;
  // local dominance required of a velocity peak; suppresses noise wiggles on
  // the flanks of the true strokes
  double vel_local_guard_dps = 15.0;
};

inline FeatureRecord extract_features(const StsRepetition& rep,
                                      const AnalysisSignals& sig,
                                      const FeatureParams& params = {}) {
  if (rep.t_start < sig.trunk_deg.t0 - 1e-9 ||
      rep.t_end > sig.trunk_deg.end_time() + 1e-9)
    throw std::invalid_argument("extract_features: repetition outside signal span");

  FeatureRecord rec;
  rec.sensor = sig.sensor;
  rec.rep_start_s = rep.t_start;
  rec.duration_s = rep.t_end - rep.t_start;
  const auto trunk = detail::window_extrema(sig.trunk_deg, rep.t_start, rep.t_end);
  const auto knee = detail::window_extrema(sig.knee_deg, rep.t_start, rep.t_end);
  const auto wt = detail::window_extrema(sig.waist_thigh_deg, rep.t_start, rep.t_end);
  rec.trunk_rom_deg = trunk.max - trunk.min;
  rec.knee_rom_deg = knee.max - knee.min;
  rec.waist_thigh_rom_deg = wt.max - wt.min;

  // slice the velocity signal over the repetition and list its peaks in time
  const auto& vel = sig.trunk_vel_dps;
  size_t i0 = size_t(std::max(0, vel.index_at(rep.t_start)));
  size_t i1 = size_t(std::min(int(vel.size()) - 1, vel.index_at(rep.t_end)));
  if (i1 <= i0 + 2) {
    rec.incomplete = true;
    return rec;
  }
  dsp::UniformSignal slice;
  slice.t0 = vel.time_at(i0);
  slice.dt = vel.dt;
  slice.unit = vel.unit;
  slice.v.assign(vel.v.begin() + long(i0), vel.v.begin() + long(i1) + 1);

  const auto peaks = detect_peaks(slice, params.vel_peak_prominence_dps, 0.0,
                                  params.vel_local_guard_dps);
  struct TimedPeak {
    double t, value;
  };
  std::vector<TimedPeak> ordered;
  const double floor_dps = params.vel_peak_prominence_dps;
  for (int i : peaks.highs)
    if (slice.v[size_t(i)] >= floor_dps)
      ordered.push_back({slice.time_at(size_t(i)), slice.v[size_t(i)]});
  for (int i : peaks.lows)
    if (slice.v[size_t(i)] <= -floor_dps)
      ordered.push_back({slice.time_at(size_t(i)), slice.v[size_t(i)]});
  std::sort(ordered.begin(), ordered.end(),
            [](const TimedPeak& a, const TimedPeak& b) { return a.t < b.t; });

  if (ordered.empty()) {
    rec.incomplete = true;
    return rec;
  }
  const TimedPeak first = ordered.front();
  rec.trunk_flex_pkvel_dps = std::abs(first.value);
  bool found = false;
  for (size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i].value * first.value < 0.0) {
      rec.trunk_ext_pkvel_dps = std::abs(ordered[i].value);
      found = true;
      break;
    }
  }
  rec.incomplete = !found;
  return rec;
}

// ---------------------------------------------------------------------------
// Cross-sensor matching: radar is the reference; each radar repetition takes
// the nearest-by-start kinect and wearable repetitions within the tolerance,
// each record matches at most once, ties go to the earlier record. Incomplete
// records never match.

struct MatchedTriple {
  int radar = -1, kinect = -1, wearable = -1;
};

inline std::vector<MatchedTriple> match_repetitions(
    const std::vector<FeatureRecord>& radar, const std::vector<FeatureRecord>& kinect,
    const std::vector<FeatureRecord>& wearable, double tol_s = 0.5) {
  auto nearest = [tol_s](const std::vector<FeatureRecord>& recs,
                         std::vector<char>& used, double t) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < recs.size(); ++i) {
      if (used[i] || recs[i].incomplete) continue;
      const double d = std::abs(recs[i].rep_start_s - t);
      if (d <= tol_s && d < best_d) {  // ties keep the earlier record
        best_d = d;
        best = int(i);
      }
    }
    return best;
  };

  std::vector<char> used_k(kinect.size(), 0), used_w(wearable.size(), 0);
  std::vector<MatchedTriple> out;
  for (size_t r = 0; r < radar.size(); ++r) {
    if (radar[r].incomplete) continue;
    const double t = radar[r].rep_start_s;
    const int k = nearest(kinect, used_k, t);
    const int w = nearest(wearable, used_w, t);
    if (k < 0 || w < 0) continue;
    used_k[size_t(k)] = 1;
    used_w[size_t(w)] = 1;
    out.push_back({int(r), k, w});
  }
  return out;
}

}  // namespace stskit::sts
