// Batch pipeline: per-participant ingestion, signal derivation, wearable
// synchronization (with reversed-sensor recovery), segmentation, feature
// extraction, cross-sensor matching, long-table assembly and agreement
// reports. Deterministic given inputs and configuration.

#pragma once

#include "stskit/io.hpp"
#include "stskit/stats.hpp"
#include "stskit/sts.hpp"
#include "stskit/sync.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace stskit::pipeline {

namespace fs = std::filesystem;

struct PipelineConfig {
  std::string input_dir;
  std::string output_dir;
  sts::SignalParams signal;
  sts::SegmentParams segment;
  sts::FeatureParams feature;
  double match_tol_s = 0.5;
  stats::IccVariant icc_variant = stats::IccVariant::Absolute;
  double z_threshold = 3.0;
  double sync_max_lag_s = 10.0;
  double sync_grid_hz = 20.0;  // the coarser of the native rates
  double sync_flip_threshold = 0.6;
  int workers = 0;  // 0: hardware concurrency
  bool emit_svg = false;
};

inline PipelineConfig load_config_json(const fs::path& path) {
  auto f = io::detail::open_in(path);
  nlohmann::json j = nlohmann::json::parse(f);
  PipelineConfig c;
  c.input_dir = j.value("input_dir", "");
  c.output_dir = j.value("output_dir", "");
  c.signal.lp_cutoff_hz = j.value("lp_cutoff_hz", c.signal.lp_cutoff_hz);
  c.signal.hp_cutoff_hz = j.value("hp_cutoff_hz", c.signal.hp_cutoff_hz);
  c.signal.gyro_drift_highpass =
      j.value("gyro_drift_highpass", c.signal.gyro_drift_highpass);
  c.signal.filter_order = j.value("filter_order", c.signal.filter_order);
  c.signal.whittaker_angle_low_rate =
      j.value("whittaker_angle_low_rate", c.signal.whittaker_angle_low_rate);
  c.signal.whittaker_angle_high_rate =
      j.value("whittaker_angle_high_rate", c.signal.whittaker_angle_high_rate);
  c.signal.whittaker_vel_low_rate =
      j.value("whittaker_vel_low_rate", c.signal.whittaker_vel_low_rate);
  c.signal.whittaker_vel_high_rate =
      j.value("whittaker_vel_high_rate", c.signal.whittaker_vel_high_rate);
  c.segment.knee_prominence_deg =
      j.value("knee_prominence_deg", c.segment.knee_prominence_deg);
  c.segment.waist_prominence_deg =
      j.value("waist_prominence_deg", c.segment.waist_prominence_deg);
  c.segment.min_separation_s = j.value("min_separation_s", c.segment.min_separation_s);
  c.segment.left_window_s = j.value("left_window_s", c.segment.left_window_s);
  c.segment.right_window_s = j.value("right_window_s", c.segment.right_window_s);
  c.feature.vel_peak_prominence_dps =
      j.value("vel_peak_prominence_dps", c.feature.vel_peak_prominence_dps);
  c.match_tol_s = j.value("match_tol_s", c.match_tol_s);
  c.z_threshold = j.value("z_threshold", c.z_threshold);
  c.sync_max_lag_s = j.value("sync_max_lag_s", c.sync_max_lag_s);
  c.sync_grid_hz = j.value("sync_grid_hz", c.sync_grid_hz);
  c.sync_flip_threshold = j.value("sync_flip_threshold", c.sync_flip_threshold);
  c.workers = j.value("workers", c.workers);
  c.emit_svg = j.value("emit_svg", c.emit_svg);
  const std::string variant = j.value("icc_variant", "absolute");
  if (variant == "consistency")
    c.icc_variant = stats::IccVariant::Consistency;
  else if (variant == "absolute")
    c.icc_variant = stats::IccVariant::Absolute;
  else
    throw std::runtime_error("config: unknown icc_variant '" + variant + "'");
  return c;
}

struct SyncInfo {
  double lag_s = 0.0;
  double peak_rho = 0.0;
  bool flipped = false;
  std::optional<GyroPlacement> flipped_placement;
};

struct ParticipantResult {
  std::string id;
  bool ok = false;
  std::string error;
  std::vector<std::string> warnings;
  std::vector<sts::FeatureRecord> radar, kinect, wearable;  // raw, pre-match
  std::vector<io::LongTableRow> matched_rows;
  SyncInfo sync;
};

namespace detail {

inline dsp::UniformSignal on_sync_grid(const dsp::UniformSignal& s, double grid_hz) {
  const double dt = 1.0 / grid_hz;
  const size_t n = size_t(std::floor((s.end_time() - s.t0) / dt + 1e-9)) + 1;
  return dsp::resample_linear(s, s.t0, dt, n);
}

inline void shift_time(sts::AnalysisSignals& sig, double delta) {
  sig.trunk_deg.t0 += delta;
  sig.knee_deg.t0 += delta;
  sig.waist_thigh_deg.t0 += delta;
  sig.trunk_vel_dps.t0 += delta;
}

}  // namespace detail

// One participant directory: radar.csv, kinect.csv, waist.csv, thigh_l.csv,
// thigh_r.csv, shank_l.csv, shank_r.csv.
inline ParticipantResult process_participant(const fs::path& dir,
                                             const PipelineConfig& cfg) {
  ParticipantResult res;
  res.id = dir.filename().string();
  try {
    auto radar = io::read_skeleton_csv(dir / "radar.csv", Sensor::Radar);
    auto kinect = io::read_skeleton_csv(dir / "kinect.csv", Sensor::Kinect);
    for (const auto* s : {&radar, &kinect}) {
      for (const auto& v : validate_series(*s))
        res.warnings.push_back(std::string(sensor_name(s->sensor)) + " frame " +
                               std::to_string(v.frame) + ": " + v.rule);
    }
    std::map<GyroPlacement, GyroStream> gyros;
    for (auto p : kAllPlacements)
      gyros[p] = io::read_gyro_csv(
          dir / (std::string(placement_name(p)) + ".csv"), p);

    auto sig_radar = sts::derive_signals_skeleton(radar, cfg.signal);
    auto sig_kinect = sts::derive_signals_skeleton(kinect, cfg.signal);
    auto sig_wear = sts::derive_signals_wearable(gyros, cfg.signal);

    // wearable clock alignment via knee-angle cross-correlation on the
    // common (coarse) grid, radar as the reference
    const auto ref_knee = detail::on_sync_grid(sig_radar.knee_deg, cfg.sync_grid_hz);
    auto wear_knee = detail::on_sync_grid(sig_wear.knee_deg, cfg.sync_grid_hz);
    auto sr = sync::estimate_lag(ref_knee, wear_knee, cfg.sync_max_lag_s,
                                 cfg.sync_flip_threshold);
    res.sync.flipped = sr.flipped;

    // A reversed sensor shows up as an anticorrelated knee signal, or -- when
    // the left/right averaging cancels the reversed side -- as a weak
    // correlation peak. Either way, search for the single placement whose
    // flip restores a strong positive peak.
    if (sr.flipped || std::abs(sr.peak_rho) < cfg.sync_flip_threshold) {
      double best_rho = std::max(sr.peak_rho, 0.0);
      std::optional<GyroPlacement> best;
      sync::SyncResult best_sr{};
      sts::AnalysisSignals best_sig;
      for (auto p : kAllPlacements) {
        auto candidate = sts::derive_signals_wearable(gyros, cfg.signal, {p});
        auto ck = detail::on_sync_grid(candidate.knee_deg, cfg.sync_grid_hz);
        auto csr = sync::estimate_lag(ref_knee, ck, cfg.sync_max_lag_s,
                                      cfg.sync_flip_threshold);
        if (!csr.flipped && csr.peak_rho > best_rho) {
          best_rho = csr.peak_rho;
          best = p;
          best_sr = csr;
          best_sig = candidate;
        }
      }
      if (best && best_rho > cfg.sync_flip_threshold) {
        res.sync.flipped = true;
        res.sync.flipped_placement = *best;
        res.warnings.push_back("reversed wearable sensor recovered: " +
                               std::string(placement_name(*best)));
        sig_wear = std::move(best_sig);
        sr = best_sr;
      } else if (sr.flipped) {
        res.warnings.push_back("anticorrelated wearable knee signal; no single "
                               "placement flip recovers it");
      }
    }
    res.sync.lag_s = sr.lag_s;
    res.sync.peak_rho = sr.peak_rho;
    detail::shift_time(sig_wear, -sr.lag_s);

    auto features_of = [&](const sts::AnalysisSignals& sig) {
      std::vector<sts::FeatureRecord> recs;
      for (const auto& rep : sts::segment_sts(sig, cfg.segment))
        recs.push_back(sts::extract_features(rep, sig, cfg.feature));
      return recs;
    };
    res.radar = features_of(sig_radar);
    res.kinect = features_of(sig_kinect);
    res.wearable = features_of(sig_wear);

    const auto triples =
        sts::match_repetitions(res.radar, res.kinect, res.wearable, cfg.match_tol_s);
    int rep_index = 0;
    for (const auto& tr : triples) {
      res.matched_rows.push_back({res.id, Sensor::Radar, rep_index,
                                  res.radar[size_t(tr.radar)]});
      res.matched_rows.push_back({res.id, Sensor::Kinect, rep_index,
                                  res.kinect[size_t(tr.kinect)]});
      res.matched_rows.push_back({res.id, Sensor::Wearable, rep_index,
                                  res.wearable[size_t(tr.wearable)]});
      ++rep_index;
    }
    res.ok = true;
  } catch (const std::exception& e) {
    res.ok = false;
    res.error = e.what();
  }
  return res;
}

inline void write_reports(const fs::path& out_dir,
                          const std::vector<ParticipantResult>& participants,
                          const PipelineConfig& cfg) {
  std::vector<io::LongTableRow> all_rows;
  for (const auto& p : participants) {
    if (!p.ok) continue;
    const fs::path pdir = out_dir / p.id;
    io::write_features_csv(pdir / "features_radar.csv", p.id, p.radar);
    io::write_features_csv(pdir / "features_kinect.csv", p.id, p.kinect);
    io::write_features_csv(pdir / "features_wearable.csv", p.id, p.wearable);
    all_rows.insert(all_rows.end(), p.matched_rows.begin(), p.matched_rows.end());
  }
  io::write_long_table_csv(out_dir / "long_table.csv", all_rows);

  io::ordered_json sync_report;
  for (const auto& p : participants) {
    if (!p.ok) continue;
    io::ordered_json js;
    js["lag_s"] = p.sync.lag_s;
    js["peak_rho"] = p.sync.peak_rho;
    js["flipped"] = p.sync.flipped;
    js["flipped_placement"] =
        p.sync.flipped_placement
            ? std::string(placement_name(*p.sync.flipped_placement))
            : std::string();
    sync_report[p.id] = js;
  }
  {
    auto f = io::detail::open_out(out_dir / "sync_report.json");
    f << sync_report.dump(2) << '\n';
  }

  const auto entries = stats::agreement_table(io::to_stat_rows(all_rows), cfg.z_threshold);
  io::write_agreement_csv(out_dir / "agreement.csv", entries);
  for (const auto& e : entries) {
    if (!e.computable) continue;
    const std::string stem = "ba_" + e.feature + "_" + e.pair_label;
    io::write_bland_altman_csv(out_dir / (stem + ".csv"), e.ba);
    if (cfg.emit_svg)
      io::write_bland_altman_svg(out_dir / (stem + ".svg"), e.ba,
                                 e.feature + " " + e.pair_label);
  }
}

// Returns the process exit status: 0 on success, 1 when nothing could be
// processed, per-participant failures are logged and skipped.
inline int run_pipeline(const PipelineConfig& cfg, std::ostream& log = std::cerr) {
  const fs::path in_dir = cfg.input_dir;
  if (!fs::is_directory(in_dir)) {
    log << "error: input directory does not exist: " << in_dir.string() << "\n";
    return 1;
  }
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(in_dir))
    if (e.is_directory() && fs::exists(e.path() / "radar.csv"))
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) {
    log << "error: no participant directories found in " << in_dir.string() << "\n";
    return 1;
  }

  const int nworkers = cfg.workers > 0
                           ? cfg.workers
                           : std::max(1u, std::thread::hardware_concurrency());
  std::vector<ParticipantResult> results(dirs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= dirs.size()) return;
      results[i] = process_participant(dirs[i], cfg);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < nworkers && i < int(dirs.size()); ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int ok_count = 0;
  for (const auto& r : results) {
    if (r.ok) {
      ++ok_count;
      for (const auto& w : r.warnings) log << r.id << ": warning: " << w << "\n";
    } else {
      log << r.id << ": failed: " << r.error << "\n";
    }
  }
  if (ok_count == 0) {
    log << "error: no participant processed successfully\n";
    return 1;
  }
  write_reports(cfg.output_dir, results, cfg);
  return 0;
}

}  // namespace stskit::pipeline
