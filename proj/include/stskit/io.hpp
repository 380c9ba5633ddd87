// File formats: skeleton/gyro/feature CSVs, the long table, agreement
// reports, Bland-Altman plot data (CSV + optional SVG), radar scene JSON and
// detection CSV. All floating-point output uses 9 significant digits, so a
// parse -> format round trip is byte-stable.

#pragma once

#include "stskit/fmcw.hpp"
#include "stskit/model.hpp"
#include "stskit/stats.hpp"
#include "stskit/sts.hpp"
#include "stskit/synth.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stskit::io {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

inline std::string fmt_g9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, int line_no, int col) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": column " +
                             std::to_string(col) + " is not a number: '" + s + "'");
  }
}

inline std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

inline std::ifstream open_in(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Skeleton CSV: header, then timestamp_s + 17 joints x (x,y,z) = 52 columns,
// joint order fixed to the model enumeration.

inline constexpr int kSkeletonColumns = 1 + 3 * kJointCount;

inline void write_skeleton_csv(const fs::path& path, const SkeletonSeries& s) {
  auto f = detail::open_out(path);
  f << "timestamp_s";
  for (auto name : kJointNames)
    f << ',' << name << "_x," << name << "_y," << name << "_z";
  f << '\n';
  for (const auto& fr : s.frames) {
    f << fmt_g9(fr.t);
    for (const auto& p : fr.p)
      f << ',' << fmt_g9(p.x()) << ',' << fmt_g9(p.y()) << ',' << fmt_g9(p.z());
    f << '\n';
  }
}

inline SkeletonSeries read_skeleton_csv(const fs::path& path, Sensor sensor) {
  auto f = detail::open_in(path);
  SkeletonSeries s;
  s.sensor = sensor;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) continue;  // header
    const auto cells = detail::split_csv(line);
    if (int(cells.size()) != kSkeletonColumns)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(kSkeletonColumns) + " columns, got " +
                               std::to_string(cells.size()));
    SkeletonFrame fr;
    fr.t = detail::parse_double(cells[0], line_no, 1);
    for (int j = 0; j < kJointCount; ++j)
      fr.p[size_t(j)] = Vec3(detail::parse_double(cells[size_t(1 + 3 * j)], line_no, 2 + 3 * j),
                             detail::parse_double(cells[size_t(2 + 3 * j)], line_no, 3 + 3 * j),
                             detail::parse_double(cells[size_t(3 + 3 * j)], line_no, 4 + 3 * j));
    s.frames.push_back(fr);
  }
  if (s.frames.size() >= 2)
    s.rate_hz = double(s.frames.size() - 1) / (s.frames.back().t - s.frames.front().t);
  return s;
}

// ---------------------------------------------------------------------------
// Gyro CSV: timestamp_s, wx_dps, wy_dps, wz_dps; placement encoded in the
// file name (waist.csv, thigh_l.csv, ...).

inline void write_gyro_csv(const fs::path& path, const GyroStream& g) {
  auto f = detail::open_out(path);
  f << "timestamp_s,wx_dps,wy_dps,wz_dps\n";
  for (const auto& smp : g.samples)
    f << fmt_g9(smp.t) << ',' << fmt_g9(smp.w_dps.x()) << ',' << fmt_g9(smp.w_dps.y())
      << ',' << fmt_g9(smp.w_dps.z()) << '\n';
}

inline GyroStream read_gyro_csv(const fs::path& path, GyroPlacement placement) {
  auto f = detail::open_in(path);
  GyroStream g;
  g.placement = placement;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 4)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 4 columns, got " +
                               std::to_string(cells.size()));
    GyroSample smp;
    smp.t = detail::parse_double(cells[0], line_no, 1);
    smp.w_dps = Vec3(detail::parse_double(cells[1], line_no, 2),
                     detail::parse_double(cells[2], line_no, 3),
                     detail::parse_double(cells[3], line_no, 4));
    g.samples.push_back(smp);
  }
  if (g.samples.size() >= 2)
    g.rate_hz = double(g.samples.size() - 1) / (g.samples.back().t - g.samples.front().t);
  return g;
}

// ---------------------------------------------------------------------------
// Feature CSV (per sensor, raw, incomplete records kept with a flag)

inline constexpr std::string_view kFeatureCsvHeader =
    "participant_id,sensor,rep_start_s,duration_s,trunk_rom_deg,"
    "trunk_flex_pkvel_dps,trunk_ext_pkvel_dps,waist_thigh_rom_deg,knee_rom_deg,flags";

inline void write_features_csv(const fs::path& path, const std::string& participant,
                               const std::vector<sts::FeatureRecord>& recs) {
  auto f = detail::open_out(path);
  f << kFeatureCsvHeader << '\n';
  for (const auto& r : recs) {
    f << participant << ',' << sensor_name(r.sensor) << ',' << fmt_g9(r.rep_start_s)
      << ',' << fmt_g9(r.duration_s) << ',' << fmt_g9(r.trunk_rom_deg) << ','
      << fmt_g9(r.trunk_flex_pkvel_dps) << ',' << fmt_g9(r.trunk_ext_pkvel_dps) << ','
      << fmt_g9(r.waist_thigh_rom_deg) << ',' << fmt_g9(r.knee_rom_deg) << ','
      << (r.incomplete ? "incomplete" : "ok") << '\n';
  }
}

// ---------------------------------------------------------------------------
// Long table: one row per sensor per matched repetition

struct LongTableRow {
  std::string participant;
  Sensor sensor = Sensor::Radar;
  int rep_index = 0;
  sts::FeatureRecord rec;
};

inline constexpr std::string_view kLongTableHeader =
    "participant,sensor,rep_index,rep_start_s,duration_s,trunk_rom_deg,"
    "trunk_flex_pkvel_dps,trunk_ext_pkvel_dps,waist_thigh_rom_deg,knee_rom_deg,flags";

inline void write_long_table_csv(const fs::path& path,
                                 const std::vector<LongTableRow>& rows) {
  auto f = detail::open_out(path);
  f << kLongTableHeader << '\n';
  for (const auto& r : rows) {
    f << r.participant << ',' << sensor_name(r.rec.sensor) << ',' << r.rep_index << ','
      << fmt_g9(r.rec.rep_start_s) << ',' << fmt_g9(r.rec.duration_s) << ','
      << fmt_g9(r.rec.trunk_rom_deg) << ',' << fmt_g9(r.rec.trunk_flex_pkvel_dps) << ','
      << fmt_g9(r.rec.trunk_ext_pkvel_dps) << ',' << fmt_g9(r.rec.waist_thigh_rom_deg)
      << ',' << fmt_g9(r.rec.knee_rom_deg) << ','
      << (r.rec.incomplete ? "incomplete" : "ok") << '\n';
  }
}

inline std::vector<LongTableRow> read_long_table_csv(const fs::path& path) {
  auto f = detail::open_in(path);
  std::vector<LongTableRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 11)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 11 columns, got " +
                               std::to_string(cells.size()));
    LongTableRow r;
    r.participant = cells[0];
    if (cells[1] == "radar") r.rec.sensor = Sensor::Radar;
    else if (cells[1] == "kinect") r.rec.sensor = Sensor::Kinect;
    else if (cells[1] == "wearable") r.rec.sensor = Sensor::Wearable;
    else throw std::runtime_error("line " + std::to_string(line_no) +
                                  ": unknown sensor '" + cells[1] + "'");
    r.sensor = r.rec.sensor;
    r.rep_index = int(detail::parse_double(cells[2], line_no, 3));
    r.rec.rep_start_s = detail::parse_double(cells[3], line_no, 4);
    r.rec.duration_s = detail::parse_double(cells[4], line_no, 5);
    r.rec.trunk_rom_deg = detail::parse_double(cells[5], line_no, 6);
    r.rec.trunk_flex_pkvel_dps = detail::parse_double(cells[6], line_no, 7);
    r.rec.trunk_ext_pkvel_dps = detail::parse_double(cells[7], line_no, 8);
    r.rec.waist_thigh_rom_deg = detail::parse_double(cells[8], line_no, 9);
    r.rec.knee_rom_deg = detail::parse_double(cells[9], line_no, 10);
    r.rec.incomplete = cells[10] == "incomplete";
    rows.push_back(std::move(r));
  }
  return rows;
}

inline const std::array<std::string_view, 6>& feature_names() {
  static const std::array<std::string_view, 6> names = {
      "duration_s",         "trunk_rom_deg",        "trunk_flex_pkvel_dps",
      "trunk_ext_pkvel_dps", "waist_thigh_rom_deg", "knee_rom_deg"};
  return names;
}

inline double feature_value(const sts::FeatureRecord& r, std::string_view name) {
  if (name == "duration_s") return r.duration_s;
  if (name == "trunk_rom_deg") return r.trunk_rom_deg;
  if (name == "trunk_flex_pkvel_dps") return r.trunk_flex_pkvel_dps;
  if (name == "trunk_ext_pkvel_dps") return r.trunk_ext_pkvel_dps;
  if (name == "waist_thigh_rom_deg") return r.waist_thigh_rom_deg;
  if (name == "knee_rom_deg") return r.knee_rom_deg;
  throw std::invalid_argument("unknown feature " + std::string(name));
}

inline std::vector<stats::LongRow> to_stat_rows(const std::vector<LongTableRow>& rows) {
  std::vector<stats::LongRow> out;
  out.reserve(rows.size() * 6);
  for (const auto& r : rows)
    for (auto name : feature_names())
      out.push_back({r.participant, r.rec.sensor, r.rep_index, std::string(name),
                     feature_value(r.rec, name)});
  return out;
}

// ---------------------------------------------------------------------------
// Agreement report CSV

inline void write_agreement_csv(const fs::path& path,
                                const std::vector<stats::AgreementEntry>& entries) {
  auto f = detail::open_out(path);
  f << "feature,pair,n,icc_a1,icc_c1,mean_diff,loa_low,loa_high\n";
  for (const auto& e : entries) {
    f << e.feature << ',' << e.pair_label << ',' << e.n << ',';
    if (e.computable)
      f << fmt_g9(e.icc_absolute.icc) << ',' << fmt_g9(e.icc_consistency.icc) << ','
        << fmt_g9(e.ba.mean_diff) << ',' << fmt_g9(e.ba.loa_low) << ','
        << fmt_g9(e.ba.loa_high);
    else
      f << "nc,nc,nc,nc,nc";
    f << '\n';
  }
}

// ---------------------------------------------------------------------------
// Bland-Altman plot data: three header constants, then (mean, diff) rows.

inline void write_bland_altman_csv(const fs::path& path,
                                   const stats::BlandAltmanResult& ba) {
  auto f = detail::open_out(path);
  f << "# mean_diff=" << fmt_g9(ba.mean_diff) << '\n';
  f << "# loa_low=" << fmt_g9(ba.loa_low) << '\n';
  f << "# loa_high=" << fmt_g9(ba.loa_high) << '\n';
  f << "mean,diff\n";
  for (const auto& [m, d] : ba.points) f << fmt_g9(m) << ',' << fmt_g9(d) << '\n';
}

// Scatter with the mean difference (solid) and limits of agreement (dashed).
inline void write_bland_altman_svg(const fs::path& path,
                                   const stats::BlandAltmanResult& ba,
                                   const std::string& title) {
  const int W = 640, H = 420, ML = 60, MR = 20, MT = 40, MB = 45;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [m, d] : ba.points) {
    xmin = std::min(xmin, m);
    xmax = std::max(xmax, m);
    ymin = std::min(ymin, d);
    ymax = std::max(ymax, d);
  }
  ymin = std::min(ymin, ba.loa_low);
  ymax = std::max(ymax, ba.loa_high);
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double xpad = 0.05 * (xmax - xmin), ypad = 0.1 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  auto X = [&](double v) { return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto Y = [&](double v) { return H - MB - (v - ymin) / (ymax - ymin) * (H - MT - MB); };

  auto f = detail::open_out(path);
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
    << "'>\n";
  f << "<rect x='0' y='0' width='" << W << "' height='" << H << "' fill='white'/>\n";
  f << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
    << "</text>\n";
  f << "<rect x='" << ML << "' y='" << MT << "' width='" << W - ML - MR << "' height='"
    << H - MT - MB << "' fill='none' stroke='black'/>\n";
  auto hline = [&](double v, const char* color, bool dashed) {
    f << "<line x1='" << ML << "' y1='" << fmt_g9(Y(v)) << "' x2='" << W - MR
      << "' y2='" << fmt_g9(Y(v)) << "' stroke='" << color << "'"
      << (dashed ? " stroke-dasharray='6,4'" : "") << "/>\n";
  };
  hline(ba.mean_diff, "red", false);
  hline(ba.loa_low, "black", true);
  hline(ba.loa_high, "black", true);
  for (const auto& [m, d] : ba.points)
    f << "<circle cx='" << fmt_g9(X(m)) << "' cy='" << fmt_g9(Y(d))
      << "' r='3' fill='steelblue' fill-opacity='0.7'/>\n";
  f << "<text x='" << W / 2 << "' y='" << H - 12
    << "' text-anchor='middle' font-size='12'>mean of pair</text>\n";
  f << "<text x='15' y='" << H / 2
    << "' text-anchor='middle' font-size='12' transform='rotate(-90 15 " << H / 2
    << ")'>difference</text>\n";
  f << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Radar scene JSON and detection CSV

inline std::vector<fmcw::Scatterer> read_scene_json(const fs::path& path) {
  auto f = detail::open_in(path);
  ordered_json j = ordered_json::parse(f);
  if (!j.is_array()) throw std::runtime_error("scene JSON must be an array");
  std::vector<fmcw::Scatterer> scene;
  for (const auto& e : j) {
    fmcw::Scatterer s;
    s.range_m = e.at("range_m").get<double>();
    s.velocity_mps = e.value("velocity_mps", 0.0);
    s.azimuth_rad = deg2rad(e.value("azimuth_deg", 0.0));
    s.amplitude = e.value("amplitude", 1.0);
    scene.push_back(s);
  }
  return scene;
}

inline void write_detections_csv(const fs::path& path,
                                 const std::vector<fmcw::RadarDetection>& dets) {
  auto f = detail::open_out(path);
  f << "range_m,velocity_mps,azimuth_deg,power_db\n";
  for (const auto& d : dets)
    f << fmt_g9(d.range_m) << ',' << fmt_g9(d.velocity_mps) << ','
      << fmt_g9(rad2deg(d.azimuth_rad)) << ',' << fmt_g9(d.power_db) << '\n';
}

// ---------------------------------------------------------------------------
// Synth dataset layout: <dir>/<participant>/{radar,kinect,waist,...}.csv

inline void write_recording(const fs::path& dir, const synth::SynthRecording& rec) {
  write_skeleton_csv(dir / "radar.csv", rec.radar);
  write_skeleton_csv(dir / "kinect.csv", rec.kinect);
  for (const auto& [p, g] : rec.gyros)
    write_gyro_csv(dir / (std::string(placement_name(p)) + ".csv"), g);

  ordered_json truth;
  truth["wearable_offset_s"] = rec.truth.wearable_offset_s;
  truth["reversed"] = ordered_json::array();
  for (auto p : rec.truth.reversed)
    truth["reversed"].push_back(std::string(placement_name(p)));
  truth["reps"] = ordered_json::array();
  for (const auto& r : rec.truth.reps) {
    ordered_json jr;
    jr["t_start"] = r.t_start;
    jr["t_end"] = r.t_end;
    jr["sit_peak_t"] = r.sit_peak_t;
    jr["stand_trough_t"] = r.stand_trough_t;
    jr["duration_s"] = r.duration_s;
    jr["trunk_rom_deg"] = r.trunk_rom_deg;
    jr["knee_rom_deg"] = r.knee_rom_deg;
    jr["waist_thigh_rom_deg"] = r.waist_thigh_rom_deg;
    jr["flex_pkvel_dps"] = r.flex_pkvel_dps;
    jr["ext_pkvel_dps"] = r.ext_pkvel_dps;
    truth["reps"].push_back(jr);
  }
  auto f = detail::open_out(dir / "truth.json");
  f << truth.dump(2) << '\n';
}

}  // namespace stskit::io
