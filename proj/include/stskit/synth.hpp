// Deterministic synthetic STS recording generator: the verification oracle.
// Produces consistent radar-like and kinect-like skeleton series plus five
// gyro streams from one analytic motion model, together with per-repetition
// ground truth evaluated from the generating profiles (never through the
// analysis pipeline).
//
// Motion model per repetition (raised-cosine pieces, C1 in time):
//   sit dwell | prep | flexion | extension | stand dwell | return
// During prep the trunk counter-leans by trunk_prep_deg (apex = true t_start)
// while knee flexion rises by knee_prep_deg (apex = sitting peak). The trunk
// peaks at rise_frac of the flexion phase and settles through the extension.
// The standing dwell keeps a small residual thigh inclination: a shank rock
// (apex at 0.25 stand dwell) forms the sharp knee-flexion trough, and a thigh
// settle dip (apex at 0.75 stand dwell = true t_end) forms the sharp
// waist-thigh standing peak, with the shank compensating so knee flexion
// stays level. All angles remain in the unfolded (< 180 deg interior) regime
// so skeleton- and gyro-derived signals agree. The return phase sits back
// down with a landing trunk bump.
//
// Wearable axis convention: each gyro's x axis is the sagittal axis oriented
// so that forward segment rotation is positive; integrated x-angles are the
// segment forward inclinations used by sts::derive_signals_wearable.

#pragma once

#include "stskit/kinematics.hpp"
#include "stskit/model.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace stskit::synth {

struct SynthConfig {
  uint64_t seed = 1;
  int reps = 5;

  // per-rep timing, seconds
  double sit_dwell_s = 1.5;
  double prep_s = 1.2;
  double flexion_s = 1.0;
  double extension_s = 1.0;
  double stand_dwell_s = 1.0;
  // return (sit-back) lasts flexion_s + extension_s

  // amplitudes, degrees
  double trunk_flexion_deg = 40.0;   // A
  double knee_excursion_deg = 90.0;  // kappa: thigh inclination while seated
  double trunk_prep_deg = 3.0;       // preparatory counter-lean
  double knee_prep_deg = 3.0;        // pre-liftoff extra knee flexion
  double stand_thigh_deg = 6.0;      // residual thigh inclination when standing
  double shank_rock_deg = 3.0;       // standing shank rock (knee trough)
  double landing_frac = 0.5;         // landing trunk bump, fraction of A
  double rise_frac = 0.8;            // trunk apex position within flexion phase

  double rep_jitter_frac = 0.0;  // deterministic per-rep scatter of A/kappa/durations

  // slack around the repetitions; also keeps filter edge transients away
  // from the first and last cycles
  double lead_in_s = 6.0;
  double tail_s = 6.0;
  double skeleton_rate_hz = 20.0;
  double gyro_rate_hz = 100.0;
  double chair_distance_m = 3.5;

  // noise (all standard deviations)
  double radar_pos_noise_m = 0.0;
  double kinect_pos_noise_m = 0.0;
  double radar_jitter_m = 0.0;      // extra per-frame common offset, radar only
  double kinect_leg_noise_m = 0.0;  // extra on knees/ankles, kinect only
  double gyro_noise_dps = 0.0;

  double wearable_offset_s = 0.0;  // added to the wearable timestamps
  std::vector<GyroPlacement> reversed;
  std::optional<int> aborted_after_rep;  // insert an aborted half-rise after rep k

  void validate() const {
    if (reps < 0 || !(sit_dwell_s > 0) || !(prep_s > 0) || !(flexion_s > 0) ||
        !(extension_s > 0) || !(stand_dwell_s > 0) || trunk_flexion_deg < 0 ||
        knee_excursion_deg < 0 || !(skeleton_rate_hz > 0) || !(gyro_rate_hz > 0))
      throw std::invalid_argument("SynthConfig: invalid timing or amplitude");
  }
};

struct RepTruth {
  double t_start = 0.0;
  double t_end = 0.0;
  double sit_peak_t = 0.0;
  double stand_trough_t = 0.0;
  double duration_s = 0.0;
  double trunk_rom_deg = 0.0;
  double knee_rom_deg = 0.0;
  double waist_thigh_rom_deg = 0.0;
  double flex_pkvel_dps = 0.0;
  double ext_pkvel_dps = 0.0;
};

struct GroundTruth {
  std::vector<RepTruth> reps;
  double wearable_offset_s = 0.0;
  std::vector<GyroPlacement> reversed;
};

struct SynthRecording {
  SkeletonSeries radar;
  SkeletonSeries kinect;
  std::map<GyroPlacement, GyroStream> gyros;
  GroundTruth truth;
  SynthConfig config;  // provenance; lets perturb() regenerate structurally
};

// ---------------------------------------------------------------------------
// Analytic profiles

namespace detail {

// raised-cosine ramp 0 -> 1 on [0,1]
inline double ramp(double u) { return 0.5 * (1.0 - std::cos(kPi * u)); }
inline double ramp_rate(double u) { return 0.5 * kPi * std::sin(kPi * u); }
// raised-cosine bump 0 -> 1 -> 0 on [0,1]
inline double bump(double u) { return 0.5 * (1.0 - std::cos(2.0 * kPi * u)); }
inline double bump_rate(double u) { return kPi * std::sin(2.0 * kPi * u); }

struct Piece {
  double t0 = 0.0, dur = 0.0;
  double from = 0.0, to = 0.0;  // ramp endpoints
  bool is_bump = false;
  double amp = 0.0;  // bump amplitude over `from`

  double value(double t) const {
    const double u = std::clamp((t - t0) / dur, 0.0, 1.0);
    if (is_bump) return from + amp * bump(u);
    return from + (to - from) * ramp(u);
  }
  double rate(double t) const {
    const double u = (t - t0) / dur;
    if (u < 0.0 || u > 1.0) return 0.0;
    if (is_bump) return amp * bump_rate(u) / dur;
    return (to - from) * ramp_rate(u) / dur;
  }
};

// piecewise profile; pieces are contiguous in time and C1 at the joins
struct Profile {
  std::vector<Piece> pieces;
  double level0 = 0.0;  // value before the first piece

  void hold(double& cursor, double dur) { cursor += dur; }  // constant segment
  void add_ramp(double& cursor, double dur, double from, double to) {
    pieces.push_back({cursor, dur, from, to, false, 0.0});
    cursor += dur;
  }
  void add_bump(double& cursor, double dur, double base, double amp) {
    pieces.push_back({cursor, dur, base, base, true, amp});
    cursor += dur;
  }

  double value(double t) const {
    double v = level0;
    for (const auto& p : pieces) {
      if (t < p.t0) break;
      v = p.value(t);
      if (t <= p.t0 + p.dur) break;
    }
    return v;
  }
  double rate(double t) const {
    for (const auto& p : pieces)
      if (t >= p.t0 && t <= p.t0 + p.dur) return p.rate(t);
    return 0.0;
  }
};

}  // namespace detail

// Per-repetition resolved parameters after deterministic jitter.
struct RepParams {
  double cycle_start = 0.0;  // beginning of the sit dwell
  double sit = 1.5, prep = 1.2, flex = 1.0, ext = 1.0, stand = 1.0, ret = 2.0;
  double A = 40.0, kappa = 90.0;
  bool aborted = false;

  double t_prep0() const { return cycle_start + sit; }
  double t1() const { return t_prep0() + prep; }        // flexion onset
  double t2() const { return t1() + flex; }             // seat-off
  double t3() const { return t2() + ext; }              // full rise
  double t4() const { return t3() + stand; }            // return onset
  double t5() const { return t4() + ret; }              // cycle end
};

// The full analytic motion: trunk inclination gamma, thigh inclination beta
// and shank inclination beta_s, all forward-positive, degrees.
struct MotionModel {
  std::vector<RepParams> cycles;  // includes aborted pseudo-cycles
  detail::Profile trunk, thigh, shank;
  double total_s = 0.0;

  double gamma(double t) const { return trunk.value(t); }
  double gamma_rate(double t) const { return trunk.rate(t); }
  double beta(double t) const { return thigh.value(t); }
  double beta_rate(double t) const { return thigh.rate(t); }
  double beta_shank(double t) const { return shank.value(t); }
  double beta_shank_rate(double t) const { return shank.rate(t); }
  double knee_flexion(double t) const { return beta(t) - beta_shank(t); }
  double knee_interior(double t) const { return 180.0 - knee_flexion(t); }
  double waist_thigh(double t) const { return 180.0 - beta(t) - gamma(t); }
};

inline MotionModel build_motion(const SynthConfig& cfg) {
  cfg.validate();
  MotionModel m;

  std::mt19937_64 jrng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto jittered = [&](double v) {
    return v * (1.0 + cfg.rep_jitter_frac * uni(jrng));
  };

  double cursor_trunk = cfg.lead_in_s;
  double cursor_thigh = cfg.lead_in_s;
  double cursor_shank = cfg.lead_in_s;
  m.trunk.level0 = 0.0;
  m.thigh.level0 = cfg.knee_excursion_deg;
  m.shank.level0 = 0.0;

  const double eps_stand = cfg.stand_thigh_deg;
  const double settle_dip = 0.9 * eps_stand;  // thigh dips to 0.1 * eps

  double prev_kappa = cfg.knee_excursion_deg;
  for (int k = 0; k < cfg.reps; ++k) {
    RepParams rp;
    rp.cycle_start = cursor_trunk;
    rp.sit = jittered(cfg.sit_dwell_s);
    rp.prep = cfg.prep_s;
    rp.flex = jittered(cfg.flexion_s);
    rp.ext = jittered(cfg.extension_s);
    rp.stand = jittered(cfg.stand_dwell_s);
    rp.ret = rp.flex + rp.ext;
    rp.A = jittered(cfg.trunk_flexion_deg);
    rp.kappa = jittered(cfg.knee_excursion_deg);

    const double rise = cfg.rise_frac * rp.flex;
    const double apex_hold = 0.15 * rp.flex;
    const double settle = (1.0 - cfg.rise_frac - 0.15) * rp.flex + rp.ext;

    // trunk: prep counter-lean, rise to A (brief apex hold so sampling and
    // smoothing keep the full excursion), settle to 0, landing bump
    auto& tr = m.trunk;
    tr.hold(cursor_trunk, rp.sit);
    tr.add_bump(cursor_trunk, rp.prep, 0.0, -cfg.trunk_prep_deg);
    tr.add_ramp(cursor_trunk, rise, 0.0, rp.A);
    tr.hold(cursor_trunk, apex_hold);
    tr.add_ramp(cursor_trunk, settle, rp.A, 0.0);
    tr.hold(cursor_trunk, rp.stand);
    tr.add_bump(cursor_trunk, rp.ret, 0.0, cfg.landing_frac * rp.A);

    // thigh: prep rise, slight settle through flexion, extension to the
    // standing residual, settle dip late in the dwell, sit-back
    auto& th = m.thigh;
    const double top = rp.kappa + cfg.knee_prep_deg;
    th.add_ramp(cursor_thigh, rp.sit, prev_kappa, rp.kappa);
    th.add_ramp(cursor_thigh, rp.prep, rp.kappa, top);
    th.add_ramp(cursor_thigh, rp.flex, top, rp.kappa);
    th.add_ramp(cursor_thigh, rp.ext, rp.kappa, eps_stand);
    th.hold(cursor_thigh, 0.5 * rp.stand);
    th.add_bump(cursor_thigh, 0.5 * rp.stand, eps_stand, -settle_dip);
    th.add_ramp(cursor_thigh, rp.ret, eps_stand, rp.kappa);
    prev_kappa = rp.kappa;

    // shank: rock early in the dwell (knee trough), then mirror the thigh
    // settle dip so knee flexion stays level
    auto& sh = m.shank;
    sh.hold(cursor_shank, rp.sit + rp.prep + rp.flex + rp.ext);
    sh.add_bump(cursor_shank, 0.5 * rp.stand, 0.0, cfg.shank_rock_deg);
    sh.add_bump(cursor_shank, 0.5 * rp.stand, 0.0, -settle_dip);
    sh.hold(cursor_shank, rp.ret);

    m.cycles.push_back(rp);

    // optional aborted half-rise appended after this repetition
    if (cfg.aborted_after_rep && *cfg.aborted_after_rep == k) {
      RepParams ab;
      ab.cycle_start = cursor_trunk;
      ab.sit = 0.5;
      ab.prep = 0.6;
      ab.flex = 0.7;
      ab.ext = 0.7;
      ab.stand = 0.5;  // settle back into the chair
      ab.ret = 0.0;
      ab.A = 0.5 * rp.A;
      ab.kappa = rp.kappa;
      ab.aborted = true;

      tr.hold(cursor_trunk, ab.sit);
      tr.add_bump(cursor_trunk, ab.prep, 0.0, -cfg.trunk_prep_deg);
      tr.add_ramp(cursor_trunk, ab.flex, 0.0, ab.A);
      tr.add_ramp(cursor_trunk, ab.ext, ab.A, 0.0);
      tr.hold(cursor_trunk, ab.stand);

      const double ab_top = rp.kappa + 0.5 * cfg.knee_prep_deg;
      th.hold(cursor_thigh, ab.sit);
      th.add_ramp(cursor_thigh, ab.prep, rp.kappa, ab_top);
      th.add_ramp(cursor_thigh, ab.flex, ab_top, rp.kappa - 10.0);
      th.add_ramp(cursor_thigh, ab.ext, rp.kappa - 10.0, rp.kappa);
      th.hold(cursor_thigh, ab.stand);
      sh.hold(cursor_shank, ab.sit + ab.prep + ab.flex + ab.ext + ab.stand);
      m.cycles.push_back(ab);
    }
  }
  cursor_trunk += cfg.tail_s;
  m.total_s = cursor_trunk;
  return m;
}

// Ground truth from the analytic profiles (dense 1 kHz evaluation inside the
// true boundaries; durations and boundary instants are closed forms).
inline GroundTruth ground_truth(const SynthConfig& cfg, const MotionModel& m) {
  GroundTruth gt;
  gt.wearable_offset_s = cfg.wearable_offset_s;
  gt.reversed = cfg.reversed;
  for (const auto& rp : m.cycles) {
    if (rp.aborted) continue;
    RepTruth t;
    t.t_start = rp.t_prep0() + 0.5 * rp.prep;          // trunk prep apex
    t.sit_peak_t = rp.t1();                            // knee flexion apex
    t.stand_trough_t = rp.t3() + 0.25 * rp.stand;      // knee dip apex
    t.t_end = rp.t3() + 0.75 * rp.stand;               // trunk overshoot apex
    t.duration_s = t.t_end - t.t_start;

    double tr_min = 1e300, tr_max = -1e300, kn_min = 1e300, kn_max = -1e300;
    double wt_min = 1e300, wt_max = -1e300, vmax = 0.0, vmin = 0.0;
    const double dt = 1e-3;
    for (double x = t.t_start; x <= t.t_end + 1e-12; x += dt) {
      const double g = m.gamma(x);
      const double kn = m.knee_interior(x);
      const double wt = m.waist_thigh(x);
      tr_min = std::min(tr_min, g);
      tr_max = std::max(tr_max, g);
      kn_min = std::min(kn_min, kn);
      kn_max = std::max(kn_max, kn);
      wt_min = std::min(wt_min, wt);
      wt_max = std::max(wt_max, wt);
      const double gr = m.gamma_rate(x);
      vmax = std::max(vmax, gr);
      vmin = std::min(vmin, gr);
    }
    t.trunk_rom_deg = tr_max - tr_min;
    t.knee_rom_deg = kn_max - kn_min;
    t.waist_thigh_rom_deg = wt_max - wt_min;
    t.flex_pkvel_dps = vmax;
    t.ext_pkvel_dps = -vmin;
    gt.reps.push_back(t);
  }
  return gt;
}

// ---------------------------------------------------------------------------
// Recording synthesis

namespace detail {

inline kin::JointRotationSeries pose_series(const SynthConfig& cfg,
                                            const MotionModel& m,
                                            std::vector<Vec3>& root_positions) {
  const TPoseModel tpose = TPoseModel::standard();
  const double Lt = tpose.length_of(JointId::KneeLeft);
  const double Ls = tpose.length_of(JointId::AnkleLeft);

  kin::JointRotationSeries rs;
  rs.rate_hz = cfg.skeleton_rate_hz;
  const double dt = 1.0 / cfg.skeleton_rate_hz;
  const size_t n = size_t(std::floor(m.total_s / dt)) + 1;
  rs.frames.reserve(n);
  rs.timestamps.reserve(n);
  root_positions.clear();
  root_positions.reserve(n);

  for (size_t i = 0; i < n; ++i) {
    const double t = double(i) * dt;
    const double g = deg2rad(m.gamma(t));
    const double bt = deg2rad(m.beta(t));
    const double bs = deg2rad(m.beta_shank(t));

    std::array<Vec3, kRotationJointCount> fr{};
    fr.fill(Vec3::Zero());
    // root: upright facing the sensor is Rx(pi/2); trunk pitch adds g
    fr[size_t(rotation_index(JointId::SpineBase))] = Vec3(0.0, kPi / 2.0 + g, 0.0);
    fr[size_t(rotation_index(JointId::HipLeft))] = Vec3(0.0, -(bt + g), 0.0);
    fr[size_t(rotation_index(JointId::HipRight))] = Vec3(0.0, -(bt + g), 0.0);
    fr[size_t(rotation_index(JointId::KneeLeft))] = Vec3(0.0, bt - bs, 0.0);
    fr[size_t(rotation_index(JointId::KneeRight))] = Vec3(0.0, bt - bs, 0.0);
    rs.frames.push_back(fr);
    rs.timestamps.push_back(t);

    // ankles planted: pelvis position follows the leg inclinations
    root_positions.emplace_back(
        0.0, cfg.chair_distance_m + Ls * std::sin(bs) + Lt * std::sin(bt),
        Ls * std::cos(bs) + Lt * std::cos(bt));
  }
  return rs;
}

inline void add_skeleton_noise(SkeletonSeries& s, double pos_noise, double jitter,
                               double leg_noise, uint64_t seed) {
  if (pos_noise <= 0.0 && jitter <= 0.0 && leg_noise <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  // lower-leg jitter wanders slowly (limb misplacement), so it survives the
  // smoothing chain: AR(1) with a ~0.4 s time constant
  const double dt = s.frames.size() > 1 ? s.frames[1].t - s.frames[0].t : 0.05;
  const double rho = std::exp(-dt / 0.4);
  const double drive = std::sqrt(1.0 - rho * rho);
  std::map<int, Vec3> wander;
  const JointId legs[] = {JointId::KneeLeft, JointId::KneeRight,
                          JointId::AnkleLeft, JointId::AnkleRight};
  for (auto id : legs) wander[int(id)] = Vec3::Zero();

  for (auto& f : s.frames) {
    Vec3 common = Vec3::Zero();
    if (jitter > 0.0) common = jitter * Vec3(g(rng), g(rng), g(rng));
    for (int j = 0; j < kJointCount; ++j) {
      Vec3 n = Vec3::Zero();
      if (pos_noise > 0.0) n = pos_noise * Vec3(g(rng), g(rng), g(rng));
      const JointId id = JointId(j);
      if (leg_noise > 0.0 && wander.count(int(id))) {
        Vec3& w = wander[int(id)];
        w = rho * w + drive * Vec3(g(rng), g(rng), g(rng));
        n += leg_noise * w;
      }
      f.p[size_t(j)] += common + n;
    }
  }
}

}  // namespace detail

inline SynthRecording generate(const SynthConfig& cfg) {
  cfg.validate();
  const MotionModel m = build_motion(cfg);

  SynthRecording rec;
  rec.config = cfg;
  rec.truth = ground_truth(cfg, m);

  std::vector<Vec3> roots;
  const auto pose = detail::pose_series(cfg, m, roots);
  const TPoseModel tpose = TPoseModel::standard();

  rec.kinect = kin::forward_kinematics(pose, tpose, roots, Sensor::Kinect);
  rec.kinect.rate_hz = cfg.skeleton_rate_hz;
  rec.radar = rec.kinect;
  rec.radar.sensor = Sensor::Radar;

  detail::add_skeleton_noise(rec.kinect, cfg.kinect_pos_noise_m, 0.0,
                             cfg.kinect_leg_noise_m, cfg.seed ^ 0xa5a5a5a5ULL);
  detail::add_skeleton_noise(rec.radar, cfg.radar_pos_noise_m, cfg.radar_jitter_m,
                             0.0, cfg.seed ^ 0x5a5a5a5aULL);

  // gyros: analytic segment rates + noise, stamps shifted by the injected
  // wearable offset, optional reversed mounting
  const double gdt = 1.0 / cfg.gyro_rate_hz;
  const size_t gn = size_t(std::floor(m.total_s / gdt)) + 1;
  uint64_t k = 0;
  for (auto p : kAllPlacements) {
    GyroStream gs;
    gs.placement = p;
    gs.rate_hz = cfg.gyro_rate_hz;
    gs.samples.resize(gn);
    std::mt19937_64 rng(cfg.seed ^ (0xc0ffee00ULL + 17 * ++k));
    std::normal_distribution<double> g(0.0, 1.0);
    const bool reversed =
        std::find(cfg.reversed.begin(), cfg.reversed.end(), p) != cfg.reversed.end();
    for (size_t i = 0; i < gn; ++i) {
      const double t = double(i) * gdt;
      double w = 0.0;
      if (p == GyroPlacement::Waist)
        w = m.gamma_rate(t);
      else if (p == GyroPlacement::ThighLeft || p == GyroPlacement::ThighRight)
        w = m.beta_rate(t);
      else
        w = m.beta_shank_rate(t);
      Vec3 v(w, 0.0, 0.0);
      if (cfg.gyro_noise_dps > 0.0)
        v += cfg.gyro_noise_dps * Vec3(g(rng), g(rng), g(rng));
      if (reversed) v = -v;
      gs.samples[i] = {t + cfg.wearable_offset_s, v};
    }
    rec.gyros[p] = std::move(gs);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Artifact injection

enum class ArtifactKind { AbortedRise, Dropout, ReversedSensor };

struct Artifact {
  ArtifactKind kind = ArtifactKind::ReversedSensor;
  GyroPlacement placement = GyroPlacement::ThighLeft;  // ReversedSensor
  int after_rep = 0;                                   // AbortedRise
  Sensor dropout_sensor = Sensor::Kinect;              // Dropout
  double dropout_start_s = 0.0;
  double dropout_duration_s = 2.0;
};

inline SynthRecording perturb(const SynthRecording& rec, const Artifact& art) {
  switch (art.kind) {
    case ArtifactKind::ReversedSensor: {
      SynthRecording out = rec;
      auto it = out.gyros.find(art.placement);
      if (it == out.gyros.end())
        throw std::invalid_argument("perturb: unknown placement");
      for (auto& s : it->second.samples) s.w_dps = -s.w_dps;
      out.truth.reversed.push_back(art.placement);
      return out;
    }
    case ArtifactKind::Dropout: {
      SynthRecording out = rec;
      auto drop = [&art](SkeletonSeries& s) {
        std::erase_if(s.frames, [&art](const SkeletonFrame& f) {
          return f.t >= art.dropout_start_s &&
                 f.t < art.dropout_start_s + art.dropout_duration_s;
        });
      };
      if (art.dropout_sensor == Sensor::Kinect)
        drop(out.kinect);
      else if (art.dropout_sensor == Sensor::Radar)
        drop(out.radar);
      else
        throw std::invalid_argument("perturb: dropout applies to skeleton streams");
      return out;
    }
    case ArtifactKind::AbortedRise: {
      SynthConfig cfg = rec.config;
      cfg.aborted_after_rep = art.after_rep;
      return generate(cfg);
    }
  }
  throw std::invalid_argument("perturb: unknown artifact");
}

// Deterministic per-participant variation for multi-subject datasets.
inline SynthConfig participant_variant(SynthConfig base, int participant_index) {
  std::mt19937_64 rng(base.seed ^ (0xbeefULL + uint64_t(participant_index) * 7919));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  base.seed = base.seed * 1000003ULL + uint64_t(participant_index) + 1;
  base.trunk_flexion_deg *= 1.0 + 0.20 * u(rng);
  // the chair geometry pins the seated thigh inclination; spread stays small
  base.knee_excursion_deg *= 1.0 + 0.03 * u(rng);
  base.flexion_s *= 1.0 + 0.15 * u(rng);
  base.extension_s *= 1.0 + 0.20 * u(rng);
  base.sit_dwell_s *= 1.0 + 0.15 * u(rng);
  base.stand_dwell_s *= 1.0 + 0.10 * u(rng);
  base.rep_jitter_frac = std::max(base.rep_jitter_frac, 0.05);
  return base;
}

}  // namespace stskit::synth
