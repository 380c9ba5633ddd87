// Agreement statistics: Z-score outlier removal, two-way mixed-effects ICC
// from the closed-form ANOVA decomposition, and Bland-Altman analysis.

#pragma once

#include "stskit/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace stskit::stats {

// ---------------------------------------------------------------------------

struct OutlierResult {
  std::vector<double> kept;
  std::vector<size_t> removed;  // indices into the input
};

// Single pass; sample (n-1) standard deviation. Inputs with fewer than two
// points or zero spread pass through untouched.
inline OutlierResult remove_outliers_zscore(const std::vector<double>& values,
                                            double threshold = 3.0) {
  OutlierResult res;
  const size_t n = values.size();
  if (n < 2) {
    res.kept = values;
    return res;
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / double(n - 1));
  if (sd <= 0.0) {
    res.kept = values;
    return res;
  }
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(values[i] - mean) / sd > threshold)
      res.removed.push_back(i);
    else
      res.kept.push_back(values[i]);
  }
  return res;
}

// ---------------------------------------------------------------------------

enum class IccVariant { Consistency, Absolute };

inline std::string_view icc_variant_name(IccVariant v) {
  return v == IccVariant::Consistency ? "consistency" : "absolute";
}

struct PairedSample {
  std::string feature;
  std::string pair_label;  // "K-R" | "K-W" | "R-W"
  std::vector<double> a, b;
};

struct IccResult {
  double icc = 0.0;
  IccVariant variant = IccVariant::Absolute;
  int n = 0;
  double msr = 0.0, mse = 0.0, msc = 0.0;
  bool degenerate = false;  // zero total variance; icc defined as 1
};

// Two-way ANOVA with n rows (repetitions) x k = 2 columns (sensors):
//   ICC(C,1) = (MSR - MSE) / (MSR + (k-1) MSE)
//   ICC(A,1) = (MSR - MSE) / (MSR + (k-1) MSE + (k/n)(MSC - MSE))
inline IccResult icc_two_way(const PairedSample& s, IccVariant variant) {
  const size_t n = s.a.size();
  if (s.b.size() != n) throw std::invalid_argument("icc_two_way: length mismatch");
  if (n < 3) throw std::invalid_argument("icc_two_way: need n >= 3");
  constexpr double k = 2.0;

  double grand = 0.0, ca = 0.0, cb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ca += s.a[i];
    cb += s.b[i];
  }
  ca /= double(n);
  cb /= double(n);
  grand = (ca + cb) / 2.0;

  double ssr = 0.0, ssc = 0.0, sse = 0.0, sst = 0.0;
  ssc = double(n) * ((ca - grand) * (ca - grand) + (cb - grand) * (cb - grand));
  for (size_t i = 0; i < n; ++i) {
    const double ri = (s.a[i] + s.b[i]) / 2.0;
    ssr += k * (ri - grand) * (ri - grand);
    const double ea = s.a[i] - ri - ca + grand;
    const double eb = s.b[i] - ri - cb + grand;
    sse += ea * ea + eb * eb;
    sst += (s.a[i] - grand) * (s.a[i] - grand) + (s.b[i] - grand) * (s.b[i] - grand);
  }

  IccResult r;
  r.variant = variant;
  r.n = int(n);
  r.msr = ssr / double(n - 1);
  r.msc = ssc / (k - 1.0);
  r.mse = sse / (double(n - 1) * (k - 1.0));

  if (sst <= 0.0) {
    r.icc = 1.0;
    r.degenerate = true;  // identical constant measurements agree perfectly
    return r;
  }
  if (variant == IccVariant::Consistency) {
    r.icc = (r.msr - r.mse) / (r.msr + (k - 1.0) * r.mse);
  } else {
    r.icc = (r.msr - r.mse) /
            (r.msr + (k - 1.0) * r.mse + (k / double(n)) * (r.msc - r.mse));
  }
  return r;
}

// ---------------------------------------------------------------------------

struct BlandAltmanResult {
  double mean_diff = 0.0;
  double sd_diff = 0.0;
  double loa_low = 0.0;
  double loa_high = 0.0;
  std::vector<std::pair<double, double>> points;  // (mean, diff)
};

inline BlandAltmanResult bland_altman(const PairedSample& s) {
  const size_t n = s.a.size();
  if (s.b.size() != n) throw std::invalid_argument("bland_altman: length mismatch");
  if (n < 2) throw std::invalid_argument("bland_altman: need n >= 2");
  BlandAltmanResult r;
  r.points.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const double d = s.a[i] - s.b[i];
    r.points.emplace_back((s.a[i] + s.b[i]) / 2.0, d);
    r.mean_diff += d;
  }
  r.mean_diff /= double(n);
  double ss = 0.0;
  for (const auto& [m, d] : r.points) ss += (d - r.mean_diff) * (d - r.mean_diff);
  r.sd_diff = std::sqrt(ss / double(n - 1));
  r.loa_low = r.mean_diff - 1.96 * r.sd_diff;
  r.loa_high = r.mean_diff + 1.96 * r.sd_diff;
  return r;
}

// ---------------------------------------------------------------------------
// Agreement table over a tidy (long-format) feature table.

struct LongRow {
  std::string participant;
  Sensor sensor = Sensor::Radar;
  int rep = 0;  // matched repetition index within the participant
  std::string feature;
  double value = 0.0;
};

struct AgreementEntry {
  std::string feature;
  std::string pair_label;
  bool computable = false;  // n >= 3 after outlier removal
  int n = 0;
  IccResult icc_absolute;
  IccResult icc_consistency;
  BlandAltmanResult ba;
};

inline const std::array<std::pair<Sensor, Sensor>, 3>& sensor_pairs() {
  static const std::array<std::pair<Sensor, Sensor>, 3> p = {
      std::pair{Sensor::Kinect, Sensor::Radar},
      std::pair{Sensor::Kinect, Sensor::Wearable},
      std::pair{Sensor::Radar, Sensor::Wearable}};
  return p;
}

inline std::string pair_label(Sensor x, Sensor y) {
  auto tag = [](Sensor s) {
    switch (s) {
      case Sensor::Kinect: return "K";
      case Sensor::Radar: return "R";
      case Sensor::Wearable: return "W";
    }
    return "?";
  };
  return std::string(tag(x)) + "-" + tag(y);
}

// Outlier removal runs per feature per sensor before pairing; a repetition
// lost on one sensor only drops the pairs that involve that sensor.
inline std::vector<AgreementEntry> agreement_table(const std::vector<LongRow>& rows,
                                                   double z_threshold = 3.0) {
  // feature -> sensor -> (participant, rep) -> value
  using Key = std::pair<std::string, int>;
  std::map<std::string, std::map<Sensor, std::map<Key, double>>> table;
  std::vector<std::string> feature_order;
  for (const auto& r : rows) {
    auto& per_sensor = table[r.feature];
    if (per_sensor.empty() &&
        std::find(feature_order.begin(), feature_order.end(), r.feature) ==
            feature_order.end())
      feature_order.push_back(r.feature);
    per_sensor[r.sensor][{r.participant, r.rep}] = r.value;
  }

  std::vector<AgreementEntry> out;
  for (const auto& feature : feature_order) {
    auto& per_sensor = table[feature];
    // z-score filtering per sensor
    std::map<Sensor, std::map<Key, double>> filtered;
    for (auto& [sensor, vals] : per_sensor) {
      std::vector<Key> keys;
      std::vector<double> v;
      for (const auto& [key, val] : vals) {
        keys.push_back(key);
        v.push_back(val);
      }
      auto res = remove_outliers_zscore(v, z_threshold);
      std::set<size_t> removed(res.removed.begin(), res.removed.end());
      for (size_t i = 0; i < keys.size(); ++i)
        if (!removed.count(i)) filtered[sensor][keys[i]] = v[i];
    }

    for (const auto& [sa, sb] : sensor_pairs()) {
      AgreementEntry e;
      e.feature = feature;
      e.pair_label = pair_label(sa, sb);
      PairedSample ps;
      ps.feature = feature;
      ps.pair_label = e.pair_label;
      if (filtered.count(sa) && filtered.count(sb)) {
        for (const auto& [key, va] : filtered[sa]) {
          auto it = filtered[sb].find(key);
          if (it == filtered[sb].end()) continue;
          ps.a.push_back(va);
          ps.b.push_back(it->second);
        }
      }
      e.n = int(ps.a.size());
      if (e.n >= 3) {
        e.computable = true;
        e.icc_absolute = icc_two_way(ps, IccVariant::Absolute);
        e.icc_consistency = icc_two_way(ps, IccVariant::Consistency);
        e.ba = bland_altman(ps);
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace stskit::stats
