#include "stskit/pipeline.hpp"

#include "stskit/io.hpp"
#include "stskit/synth.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stskit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("stskit_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_dataset(const fs::path& dir, int participants, uint64_t seed,
                   double noise_pos = 0.002, double gyro_noise = 0.5) {
  synth::SynthConfig base;
  base.seed = seed;
  base.reps = 5;
  base.rep_jitter_frac = 0.05;
  base.radar_pos_noise_m = noise_pos;
  base.kinect_pos_noise_m = noise_pos;
  base.gyro_noise_dps = gyro_noise;
  base.wearable_offset_s = 0.7;
  for (int i = 0; i < participants; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "P%03d", i + 1);
    io::write_recording(dir / name,
                        synth::generate(synth::participant_variant(base, i)));
  }
}

}  // namespace

TEST_CASE("skeleton csv round trip preserves values at 9 significant digits") {
  TempDir tmp("skel_csv");
  synth::SynthConfig cfg;
  cfg.reps = 1;
  cfg.kinect_pos_noise_m = 0.003;
  const auto rec = synth::generate(cfg);
  const auto p = tmp.path / "skel.csv";
  io::write_skeleton_csv(p, rec.kinect);
  const auto back = io::read_skeleton_csv(p, Sensor::Kinect);
  REQUIRE(back.size() == rec.kinect.size());
  for (size_t f = 0; f < back.size(); ++f) {
    CHECK(back.frames[f].t == Catch::Approx(rec.kinect.frames[f].t).epsilon(1e-8));
    for (int j = 0; j < kJointCount; ++j)
      CHECK((back.frames[f].p[size_t(j)] - rec.kinect.frames[f].p[size_t(j)]).norm() <
            1e-7);
  }
  CHECK(back.rate_hz == Catch::Approx(20.0).epsilon(1e-6));

  // a parse -> format round trip is byte-stable
  const auto p2 = tmp.path / "skel2.csv";
  io::write_skeleton_csv(p2, back);
  CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("gyro csv round trip") {
  TempDir tmp("gyro_csv");
  synth::SynthConfig cfg;
  cfg.reps = 1;
  cfg.gyro_noise_dps = 1.0;
  const auto rec = synth::generate(cfg);
  const auto& g = rec.gyros.at(GyroPlacement::ThighLeft);
  const auto p = tmp.path / "thigh_l.csv";
  io::write_gyro_csv(p, g);
  const auto back = io::read_gyro_csv(p, GyroPlacement::ThighLeft);
  REQUIRE(back.samples.size() == g.samples.size());
  // 9 significant digits: absolute error scales with the value magnitude
  for (size_t i = 0; i < g.samples.size(); i += 50)
    CHECK((back.samples[i].w_dps - g.samples[i].w_dps).norm() < 1e-6);
}

TEST_CASE("malformed skeleton rows are reported with the line number") {
  TempDir tmp("bad_csv");
  const auto p = tmp.path / "radar.csv";
  {
    std::ofstream f(p);
    f << "header\n";
    for (int line = 2; line <= 20; ++line) {
      if (line == 17) {
        f << "0.0,1.0,2.0\n";  // 3 columns instead of 52
      } else {
        f << "0.0";
        for (int c = 1; c < 52; ++c) f << "," << c;
        f << "\n";
      }
    }
  }
  try {
    io::read_skeleton_csv(p, Sensor::Radar);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 17: expected 52 columns") !=
          std::string::npos);
  }
}

TEST_CASE("non-numeric cells are reported with line and column") {
  TempDir tmp("bad_cell");
  const auto p = tmp.path / "g.csv";
  {
    std::ofstream f(p);
    f << "timestamp_s,wx_dps,wy_dps,wz_dps\n0.0,1.0,oops,3.0\n";
  }
  try {
    io::read_gyro_csv(p, GyroPlacement::Waist);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column 3") != std::string::npos);
  }
}

TEST_CASE("long table round trip") {
  TempDir tmp("long_table");
  std::vector<io::LongTableRow> rows;
  sts::FeatureRecord rec;
  rec.sensor = Sensor::Radar;
  rec.rep_start_s = 12.345678912;
  rec.duration_s = 3.25;
  rec.trunk_rom_deg = 41.5;
  rec.trunk_flex_pkvel_dps = 77.7;
  rec.trunk_ext_pkvel_dps = 52.1;
  rec.waist_thigh_rom_deg = 130.0;
  rec.knee_rom_deg = 92.0;
  rows.push_back({"P001", Sensor::Radar, 0, rec});
  rec.sensor = Sensor::Wearable;
  rec.incomplete = true;
  rows.push_back({"P001", Sensor::Wearable, 0, rec});
  const auto p = tmp.path / "long_table.csv";
  io::write_long_table_csv(p, rows);
  const auto back = io::read_long_table_csv(p);
  REQUIRE(back.size() == 2);
  CHECK(back[0].participant == "P001");
  CHECK(back[0].rec.sensor == Sensor::Radar);
  CHECK(back[0].rec.duration_s == Catch::Approx(3.25));
  CHECK(back[1].rec.incomplete);
}

TEST_CASE("bland-altman plot data carries three header constants plus rows") {
  TempDir tmp("ba_csv");
  stats::PairedSample s;
  for (int i = 0; i < 10; ++i) {
    s.a.push_back(i);
    s.b.push_back(i + 0.5);
  }
  const auto ba = stats::bland_altman(s);
  const auto p = tmp.path / "ba.csv";
  io::write_bland_altman_csv(p, ba);
  std::ifstream f(p);
  std::string line;
  int header_constants = 0, data_rows = 0;
  bool saw_columns = false;
  while (std::getline(f, line)) {
    if (line.rfind("# ", 0) == 0)
      ++header_constants;
    else if (line == "mean,diff")
      saw_columns = true;
    else if (!line.empty())
      ++data_rows;
  }
  CHECK(header_constants == 3);
  CHECK(saw_columns);
  CHECK(data_rows == 10);
}

TEST_CASE("degenerate sd: limit lines coincide with the mean line") {
  stats::PairedSample s;
  for (int i = 0; i < 5; ++i) {
    s.a.push_back(i);
    s.b.push_back(i - 2.0);
  }
  const auto ba = stats::bland_altman(s);
  CHECK(ba.loa_low == Catch::Approx(ba.mean_diff).margin(1e-12));
  CHECK(ba.loa_high == Catch::Approx(ba.mean_diff).margin(1e-12));
}

TEST_CASE("scene json parsing") {
  TempDir tmp("scene");
  const auto p = tmp.path / "scene.json";
  {
    std::ofstream f(p);
    f << R"([{"range_m": 3.5, "velocity_mps": 0.5, "azimuth_deg": 10.0, "amplitude": 1.0},
            {"range_m": 2.0}])";
  }
  const auto scene = io::read_scene_json(p);
  REQUIRE(scene.size() == 2);
  CHECK(scene[0].range_m == Catch::Approx(3.5));
  CHECK(scene[0].azimuth_rad == Catch::Approx(deg2rad(10.0)));
  CHECK(scene[1].velocity_mps == 0.0);
  CHECK(scene[1].amplitude == 1.0);
}

TEST_CASE("pipeline: three-participant dataset yields a balanced long table") {
  TempDir in("pipe_in"), out("pipe_out");
  write_dataset(in.path, 3, 12345);
  pipeline::PipelineConfig cfg;
  cfg.input_dir = in.path.string();
  cfg.output_dir = out.path.string();
  cfg.workers = 2;
  std::ostringstream log;
  REQUIRE(pipeline::run_pipeline(cfg, log) == 0);

  const auto rows = io::read_long_table_csv(out.path / "long_table.csv");
  REQUIRE_FALSE(rows.empty());
  // equal per-sensor counts per participant
  std::map<std::string, std::map<Sensor, int>> counts;
  for (const auto& r : rows) counts[r.participant][r.rec.sensor]++;
  CHECK(counts.size() == 3);
  for (const auto& [pid, by_sensor] : counts) {
    REQUIRE(by_sensor.size() == 3);
    const int n = by_sensor.begin()->second;
    CHECK(n == 5);
    for (const auto& [s, c] : by_sensor) CHECK(c == n);
  }
  CHECK(fs::exists(out.path / "agreement.csv"));
  CHECK(fs::exists(out.path / "sync_report.json"));
  CHECK(fs::exists(out.path / "P001" / "features_radar.csv"));
}

TEST_CASE("pipeline: rerun on identical inputs is byte-identical") {
  TempDir in("det_in"), out1("det_out1"), out2("det_out2");
  write_dataset(in.path, 2, 777);
  pipeline::PipelineConfig cfg;
  cfg.input_dir = in.path.string();
  cfg.workers = 3;
  std::ostringstream log;
  cfg.output_dir = out1.path.string();
  REQUIRE(pipeline::run_pipeline(cfg, log) == 0);
  cfg.output_dir = out2.path.string();
  REQUIRE(pipeline::run_pipeline(cfg, log) == 0);

  int compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(out1.path)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), out1.path);
    CHECK(slurp(e.path()) == slurp(out2.path / rel));
    ++compared;
  }
  CHECK(compared > 5);
}

TEST_CASE("pipeline: empty input directory fails and names the directory") {
  TempDir in("empty_in"), out("empty_out");
  pipeline::PipelineConfig cfg;
  cfg.input_dir = (in.path / "nothing_here").string();
  cfg.output_dir = out.path.string();
  std::ostringstream log;
  CHECK(pipeline::run_pipeline(cfg, log) == 1);
  CHECK(log.str().find("nothing_here") != std::string::npos);

  fs::create_directories(in.path / "present_but_empty");
  cfg.input_dir = (in.path / "present_but_empty").string();
  std::ostringstream log2;
  CHECK(pipeline::run_pipeline(cfg, log2) == 1);
  CHECK(log2.str().find("present_but_empty") != std::string::npos);
}

TEST_CASE("pipeline: injected wearable offset is recovered in the sync report") {
  TempDir in("sync_in"), out("sync_out");
  write_dataset(in.path, 1, 31415);
  pipeline::PipelineConfig cfg;
  cfg.input_dir = in.path.string();
  cfg.output_dir = out.path.string();
  std::ostringstream log;
  REQUIRE(pipeline::run_pipeline(cfg, log) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out.path / "sync_report.json"));
  REQUIRE(j.contains("P001"));
  CHECK(std::abs(j["P001"]["lag_s"].get<double>() - 0.7) < 0.05);
  CHECK_FALSE(j["P001"]["flipped"].get<bool>());
}

TEST_CASE("pipeline config json loads and validates") {
  TempDir tmp("cfg");
  const auto p = tmp.path / "cfg.json";
  {
    std::ofstream f(p);
    f << R"({"match_tol_s": 0.4, "icc_variant": "consistency", "emit_svg": true})";
  }
  const auto cfg = pipeline::load_config_json(p);
  CHECK(cfg.match_tol_s == Catch::Approx(0.4));
  CHECK(cfg.icc_variant == stats::IccVariant::Consistency);
  CHECK(cfg.emit_svg);

  {
    std::ofstream f(p);
    f << R"({"icc_variant": "bogus"})";
  }
  CHECK_THROWS(pipeline::load_config_json(p));
}
