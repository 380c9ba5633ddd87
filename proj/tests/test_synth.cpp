#include "stskit/synth.hpp"

#include "stskit/dsp.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace stskit;

TEST_CASE("generate: same seed gives bit-identical recordings") {
  synth::SynthConfig cfg;
  cfg.reps = 3;
  cfg.kinect_pos_noise_m = 0.003;
  cfg.radar_pos_noise_m = 0.002;
  cfg.radar_jitter_m = 0.002;
  cfg.gyro_noise_dps = 1.0;
  const auto a = synth::generate(cfg);
  const auto b = synth::generate(cfg);
  REQUIRE(a.kinect.size() == b.kinect.size());
  for (size_t f = 0; f < a.kinect.size(); ++f)
    for (int j = 0; j < kJointCount; ++j) {
      CHECK(a.kinect.frames[f].p[size_t(j)] == b.kinect.frames[f].p[size_t(j)]);
      CHECK(a.radar.frames[f].p[size_t(j)] == b.radar.frames[f].p[size_t(j)]);
    }
  for (auto p : kAllPlacements) {
    const auto& ga = a.gyros.at(p).samples;
    const auto& gb = b.gyros.at(p).samples;
    REQUIRE(ga.size() == gb.size());
    for (size_t i = 0; i < ga.size(); ++i) CHECK(ga[i].w_dps == gb[i].w_dps);
  }
}

TEST_CASE("generate: zero repetitions yield pure dwell and empty truth") {
  synth::SynthConfig cfg;
  cfg.reps = 0;
  const auto rec = synth::generate(cfg);
  CHECK(rec.truth.reps.empty());
  CHECK(rec.kinect.size() > 0);
  // knees stay seated the whole time
  const auto& first = rec.kinect.frames.front();
  const auto& last = rec.kinect.frames.back();
  CHECK((first.pos(JointId::KneeLeft) - last.pos(JointId::KneeLeft)).norm() < 1e-9);
}

TEST_CASE("generated skeletons pass validate_series") {
  synth::SynthConfig cfg;
  cfg.reps = 5;
  cfg.kinect_pos_noise_m = 0.003;
  cfg.kinect_leg_noise_m = 0.01;
  cfg.radar_pos_noise_m = 0.003;
  cfg.radar_jitter_m = 0.003;
  const auto rec = synth::generate(cfg);
  CHECK(validate_series(rec.kinect).empty());
  CHECK(validate_series(rec.radar).empty());
  for (auto p : kAllPlacements) CHECK(validate_stream(rec.gyros.at(p)).empty());
}

TEST_CASE("noiseless gyro integrates back to the generating segment angle") {
  synth::SynthConfig cfg;
  cfg.reps = 3;
  const auto rec = synth::generate(cfg);
  const auto m = synth::build_motion(cfg);
  const auto angle = dsp::integrate_gyro(rec.gyros.at(GyroPlacement::Waist),
                                         dsp::GyroAxis::X);
  double worst = 0.0;
  for (size_t i = 0; i < angle.v.size(); ++i) {
    const double t = angle.t0 + double(i) * angle.dt;  // offset 0 here
    worst = std::max(worst, std::abs(angle.v[i] - m.gamma(t)));
  }
  CHECK(worst < 0.1);
}

TEST_CASE("ground-truth features equal the closed forms of the dials") {
  synth::SynthConfig cfg;
  cfg.reps = 4;
  const auto rec = synth::generate(cfg);
  REQUIRE(rec.truth.reps.size() == 4);
  const double rise = cfg.rise_frac * cfg.flexion_s;
  const double settle = (1.0 - cfg.rise_frac - 0.15) * cfg.flexion_s + cfg.extension_s;
  for (const auto& t : rec.truth.reps) {
    CHECK(t.duration_s ==
          Catch::Approx(0.5 * cfg.prep_s + cfg.flexion_s + cfg.extension_s +
                        0.75 * cfg.stand_dwell_s)
              .margin(2e-3));
    CHECK(t.trunk_rom_deg ==
          Catch::Approx(cfg.trunk_flexion_deg + cfg.trunk_prep_deg).margin(1e-3));
    CHECK(t.knee_rom_deg ==
          Catch::Approx(cfg.knee_excursion_deg + cfg.knee_prep_deg -
                        (cfg.stand_thigh_deg - cfg.shank_rock_deg))
              .margin(1e-3));
    CHECK(t.flex_pkvel_dps ==
          Catch::Approx(cfg.trunk_flexion_deg * kPi / (2.0 * rise)).margin(0.05));
    CHECK(t.ext_pkvel_dps ==
          Catch::Approx(cfg.trunk_flexion_deg * kPi / (2.0 * settle)).margin(0.05));
    CHECK(t.t_start < t.sit_peak_t);
    CHECK(t.sit_peak_t < t.stand_trough_t);
    CHECK(t.stand_trough_t < t.t_end);
  }
}

TEST_CASE("perturb: reversed sensor negates exactly that stream") {
  synth::SynthConfig cfg;
  cfg.reps = 2;
  cfg.gyro_noise_dps = 0.5;
  const auto rec = synth::generate(cfg);
  synth::Artifact art;
  art.kind = synth::ArtifactKind::ReversedSensor;
  art.placement = GyroPlacement::ThighLeft;
  const auto out = synth::perturb(rec, art);
  const auto& a = rec.gyros.at(GyroPlacement::ThighLeft).samples;
  const auto& b = out.gyros.at(GyroPlacement::ThighLeft).samples;
  for (size_t i = 0; i < a.size(); ++i)
    CHECK((a[i].w_dps + b[i].w_dps).norm() == 0.0);
  const auto& w0 = rec.gyros.at(GyroPlacement::Waist).samples;
  const auto& w1 = out.gyros.at(GyroPlacement::Waist).samples;
  for (size_t i = 0; i < w0.size(); ++i) CHECK(w0[i].w_dps == w1[i].w_dps);
  REQUIRE(out.truth.reversed.size() == 1);
}

TEST_CASE("perturb: dropout removes frames but keeps time monotonic") {
  synth::SynthConfig cfg;
  cfg.reps = 2;
  const auto rec = synth::generate(cfg);
  synth::Artifact art;
  art.kind = synth::ArtifactKind::Dropout;
  art.dropout_sensor = Sensor::Kinect;
  art.dropout_start_s = 8.0;
  art.dropout_duration_s = 2.0;
  const auto out = synth::perturb(rec, art);
  CHECK(out.kinect.size() < rec.kinect.size());
  CHECK(validate_series(out.kinect).empty());
  CHECK(out.radar.size() == rec.radar.size());
}

TEST_CASE("perturb: unknown dropout target rejected") {
  synth::SynthConfig cfg;
  cfg.reps = 1;
  const auto rec = synth::generate(cfg);
  synth::Artifact art;
  art.kind = synth::ArtifactKind::Dropout;
  art.dropout_sensor = Sensor::Wearable;
  CHECK_THROWS_AS(synth::perturb(rec, art), std::invalid_argument);
}

TEST_CASE("wearable offset shifts the gyro stamps, not the values") {
  synth::SynthConfig base;
  base.reps = 1;
  auto shifted_cfg = base;
  shifted_cfg.wearable_offset_s = 2.5;
  const auto plain = synth::generate(base);
  const auto shifted = synth::generate(shifted_cfg);
  const auto& a = plain.gyros.at(GyroPlacement::Waist).samples;
  const auto& b = shifted.gyros.at(GyroPlacement::Waist).samples;
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); i += 100) {
    CHECK(b[i].t - a[i].t == Catch::Approx(2.5).margin(1e-12));
    CHECK(a[i].w_dps == b[i].w_dps);
  }
  CHECK(shifted.truth.wearable_offset_s == 2.5);
}

TEST_CASE("participant variants differ but stay deterministic") {
  synth::SynthConfig base;
  base.reps = 3;
  const auto a = synth::participant_variant(base, 0);
  const auto b = synth::participant_variant(base, 1);
  const auto a2 = synth::participant_variant(base, 0);
  CHECK(a.trunk_flexion_deg == a2.trunk_flexion_deg);
  CHECK(a.trunk_flexion_deg != b.trunk_flexion_deg);
  CHECK(a.seed != b.seed);
}

TEST_CASE("invalid configuration rejected") {
  synth::SynthConfig cfg;
  cfg.flexion_s = -1.0;
  CHECK_THROWS_AS(synth::generate(cfg), std::invalid_argument);
}
