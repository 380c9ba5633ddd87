// stskit command-line driver.
//
//   stskit synth    generate a synthetic multi-sensor STS dataset
//   stskit process  run the full analysis pipeline over a dataset
//   stskit fmcw     simulate an FMCW radar scene and emit detections
//   stskit stats    recompute agreement statistics from a long table
//
// Exit codes: 0 success, 1 total failure, 2 configuration error.

#include "stskit/io.hpp"
#include "stskit/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fs = std::filesystem;
using namespace stskit;

namespace {

int run_synth(const std::string& output, int participants, int reps, uint64_t seed,
              const std::string& noise, double offset_s,
              const std::string& reversed, std::optional<int> aborted_after) {
  synth::SynthConfig base;
  base.seed = seed;
  base.reps = reps;
  base.wearable_offset_s = offset_s;
  base.rep_jitter_frac = 0.05;
  if (noise == "none") {
  } else if (noise == "low") {
    base.radar_pos_noise_m = 0.001;
    base.kinect_pos_noise_m = 0.001;
    base.gyro_noise_dps = 0.25;
  } else if (noise == "mid") {
    base.radar_pos_noise_m = 0.002;
    base.kinect_pos_noise_m = 0.002;
    base.radar_jitter_m = 0.002;
    base.kinect_leg_noise_m = 0.004;
    base.gyro_noise_dps = 0.5;
  } else if (noise == "high") {
    base.radar_pos_noise_m = 0.004;
    base.kinect_pos_noise_m = 0.004;
    base.radar_jitter_m = 0.004;
    base.kinect_leg_noise_m = 0.010;
    base.gyro_noise_dps = 1.5;
  } else {
    std::cerr << "error: unknown noise preset '" << noise << "'\n";
    return 2;
  }
  if (!reversed.empty()) {
    bool found = false;
    for (auto p : kAllPlacements)
      if (placement_name(p) == reversed) {
        base.reversed.push_back(p);
        found = true;
      }
    if (!found) {
      std::cerr << "error: unknown placement '" << reversed << "'\n";
      return 2;
    }
  }
  base.aborted_after_rep = aborted_after;

  for (int i = 0; i < participants; ++i) {
    auto cfg = synth::participant_variant(base, i);
    char name[16];
    std::snprintf(name, sizeof name, "P%03d", i + 1);
    io::write_recording(fs::path(output) / name, synth::generate(cfg));
  }
  std::cout << "wrote " << participants << " participant(s) to " << output << "\n";
  return 0;
}

int run_fmcw(const std::string& scene_path, const std::string& output,
             uint64_t seed, double snr_db, bool no_clutter_removal) {
  fmcw::RadarConfig cfg;
  cfg.validate();
  const auto scene = io::read_scene_json(scene_path);
  double noise_std = 0.0;
  double max_amp = 0.0;
  for (const auto& s : scene) max_amp = std::max(max_amp, s.amplitude);
  if (snr_db > 0.0 && max_amp > 0.0)
    noise_std = fmcw::noise_std_for_snr(max_amp, snr_db);
  const auto cube = fmcw::synthesize_if_cube(cfg, scene, noise_std, seed);
  fmcw::ProcessOptions opt;
  opt.clutter_removal = !no_clutter_removal;
  const auto dets = fmcw::process_cube(cfg, cube, opt);
  io::write_detections_csv(output, dets);
  std::cout << dets.size() << " detection(s) -> " << output << "\n";
  return 0;
}

// console summary of the selected ICC variant (the CSV always carries both)
void print_icc_summary(const std::vector<stats::AgreementEntry>& entries,
                       stats::IccVariant variant) {
  std::cout << "ICC (" << stats::icc_variant_name(variant) << ")\n";
  for (const auto& e : entries) {
    std::cout << "  " << e.feature << " " << e.pair_label << ": ";
    if (e.computable) {
      const auto& r = variant == stats::IccVariant::Absolute ? e.icc_absolute
                                                             : e.icc_consistency;
      std::cout << io::fmt_g9(r.icc) << " (n=" << e.n << ")";
      if (r.degenerate) std::cout << " [degenerate]";
    } else {
      std::cout << "not computable (n=" << e.n << ")";
    }
    std::cout << "\n";
  }
}

int run_stats(const std::string& input, const std::string& output,
              double z_threshold, bool svg, stats::IccVariant variant) {
  const auto rows = io::read_long_table_csv(input);
  if (rows.empty()) {
    std::cerr << "error: empty long table: " << input << "\n";
    return 1;
  }
  const auto entries = stats::agreement_table(io::to_stat_rows(rows), z_threshold);
  io::write_agreement_csv(fs::path(output) / "agreement.csv", entries);
  for (const auto& e : entries) {
    if (!e.computable) continue;
    const std::string stem = "ba_" + e.feature + "_" + e.pair_label;
    io::write_bland_altman_csv(fs::path(output) / (stem + ".csv"), e.ba);
    if (svg)
      io::write_bland_altman_svg(fs::path(output) / (stem + ".svg"), e.ba,
                                 e.feature + " " + e.pair_label);
  }
  print_icc_summary(entries, variant);
  std::cout << "agreement report -> " << (fs::path(output) / "agreement.csv").string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-sensor sit-to-stand motion analysis toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  std::string synth_out = "dataset";
  int participants = 3, reps = 5;
  uint64_t seed = 1;
  std::string noise = "mid", reversed;
  int aborted_after = -1;
  double offset_s = 0.7;
  synth_cmd->add_option("--output", synth_out, "output dataset directory");
  synth_cmd->add_option("--participants", participants, "number of participants");
  synth_cmd->add_option("--reps", reps, "repetitions per participant");
  synth_cmd->add_option("--seed", seed, "master seed");
  synth_cmd->add_option("--noise", noise, "noise preset: none|low|mid|high");
  synth_cmd->add_option("--offset", offset_s, "injected wearable clock offset (s)");
  synth_cmd->add_option("--reverse", reversed,
                        "mount one wearable backwards (waist|thigh_l|...)");
  synth_cmd->add_option("--aborted-after", aborted_after,
                        "insert an aborted half-rise after this repetition");

  // process
  auto* proc_cmd = app.add_subcommand("process", "run the analysis pipeline");
  std::string proc_in, proc_out = "out", config_path;
  double match_tol = -1.0;
  std::string icc_variant;
  int workers = 0;
  bool svg = false;
  proc_cmd->add_option("--input", proc_in, "dataset directory")->required();
  proc_cmd->add_option("--output", proc_out, "report directory");
  proc_cmd->add_option("--config", config_path, "pipeline configuration JSON");
  proc_cmd->add_option("--match-tol-s", match_tol, "repetition match tolerance (s)");
  proc_cmd->add_option("--icc-variant", icc_variant, "absolute|consistency");
  proc_cmd->add_option("--workers", workers, "worker threads (0 = auto)");
  proc_cmd->add_flag("--svg", svg, "emit Bland-Altman SVG plots");

  // fmcw
  auto* fmcw_cmd = app.add_subcommand("fmcw", "FMCW radar simulator demo");
  std::string scene_path, fmcw_out = "detections.csv";
  uint64_t fmcw_seed = 1;
  double snr_db = 20.0;
  bool no_clutter = false;
  fmcw_cmd->add_option("--scene", scene_path, "scene JSON")->required();
  fmcw_cmd->add_option("--output", fmcw_out, "detections CSV");
  fmcw_cmd->add_option("--seed", fmcw_seed, "noise seed");
  fmcw_cmd->add_option("--snr-db", snr_db, "per-sample SNR (<= 0: noiseless)");
  fmcw_cmd->add_flag("--no-clutter-removal", no_clutter,
                     "keep the zero-Doppler column");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "recompute agreement statistics");
  std::string stats_in, stats_out = "out", stats_variant = "absolute";
  double z_threshold = 3.0;
  bool stats_svg = false;
  stats_cmd->add_option("--input", stats_in, "long table CSV")->required();
  stats_cmd->add_option("--output", stats_out, "report directory");
  stats_cmd->add_option("--z-threshold", z_threshold, "outlier Z-score threshold");
  stats_cmd->add_option("--icc-variant", stats_variant, "absolute|consistency");
  stats_cmd->add_flag("--svg", stats_svg, "emit Bland-Altman SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed())
      return run_synth(synth_out, participants, reps, seed, noise, offset_s, reversed,
                       aborted_after >= 0 ? std::optional<int>(aborted_after)
                                          : std::nullopt);
    if (proc_cmd->parsed()) {
      pipeline::PipelineConfig cfg;
      if (!config_path.empty()) {
        try {
          cfg = pipeline::load_config_json(config_path);
        } catch (const std::exception& e) {
          std::cerr << "config error: " << e.what() << "\n";
          return 2;
        }
      }
      cfg.input_dir = proc_in;
      cfg.output_dir = proc_out;
      if (match_tol > 0.0) cfg.match_tol_s = match_tol;
      if (workers > 0) cfg.workers = workers;
      if (svg) cfg.emit_svg = true;
      if (!icc_variant.empty()) {
        if (icc_variant == "absolute")
          cfg.icc_variant = stats::IccVariant::Absolute;
        else if (icc_variant == "consistency")
          cfg.icc_variant = stats::IccVariant::Consistency;
        else {
          std::cerr << "config error: unknown icc variant '" << icc_variant << "'\n";
          return 2;
        }
      }
      if (cfg.match_tol_s <= 0.0) {
        std::cerr << "config error: match tolerance must be positive\n";
        return 2;
      }
      const int rc = pipeline::run_pipeline(cfg);
      if (rc == 0) {
        const auto rows =
            io::read_long_table_csv(fs::path(cfg.output_dir) / "long_table.csv");
        print_icc_summary(stats::agreement_table(io::to_stat_rows(rows), cfg.z_threshold),
                          cfg.icc_variant);
      }
      return rc;
    }
    if (fmcw_cmd->parsed())
      return run_fmcw(scene_path, fmcw_out, fmcw_seed, snr_db, no_clutter);
    if (stats_cmd->parsed()) {
      stats::IccVariant v;
      if (stats_variant == "absolute")
        v = stats::IccVariant::Absolute;
      else if (stats_variant == "consistency")
        v = stats::IccVariant::Consistency;
      else {
        std::cerr << "config error: unknown icc variant '" << stats_variant << "'\n";
        return 2;
      }
      return run_stats(stats_in, stats_out, z_threshold, stats_svg, v);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
