// Wearable timestamp reconstruction and cross-sensor time alignment through
// normalized cross-correlation of knee-angle signals.

#pragma once

#include "stskit/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stskit::sync {

struct TimeBase {
  double t0 = 0.0;
  double dt = 0.05;
  size_t n = 0;

  double end() const { return t0 + double(n - 1) * dt; }
};

struct SyncResult {
  double lag_s = 0.0;       // positive: `other` lags `ref`
  double peak_rho = 0.0;    // raw correlation at the chosen peak (signed)
  bool flipped = false;     // peak was negative with |rho| > threshold
  double common_lo = 0.0;
  double common_hi = 0.0;
};

// The last frame is assumed written at the file's modification time.
inline TimeBase reconstruct_wearable_times(double file_mtime_s, size_t frame_count,
                                           double fs_hz) {
  if (!(fs_hz > 0.0))
    throw std::invalid_argument("reconstruct_wearable_times: fs must be positive");
  if (frame_count < 2)
    throw std::invalid_argument("reconstruct_wearable_times: need >= 2 frames");
  TimeBase tb;
  tb.dt = 1.0 / fs_hz;
  tb.n = frame_count;
  tb.t0 = file_mtime_s - double(frame_count - 1) / fs_hz;
  return tb;
}

inline std::pair<double, double> common_range(const std::vector<TimeBase>& bases) {
  if (bases.size() < 2)
    throw std::invalid_argument("common_range: need >= 2 time bases");
  double lo = bases[0].t0, hi = bases[0].end();
  for (const auto& b : bases) {
    lo = std::max(lo, b.t0);
    hi = std::min(hi, b.end());
  }
  if (!(lo < hi)) throw std::invalid_argument("common_range: disjoint ranges");
  return {lo, hi};
}

inline TimeBase apply_lag(TimeBase base, double lag_s) {
  base.t0 += lag_s;
  return base;
}

namespace detail {

// Pearson correlation of x[i] vs y[i+k] over the valid overlap.
inline double corr_at_shift(const std::vector<double>& x,
                            const std::vector<double>& y, int k) {
  const int n = int(std::min(x.size(), y.size()));
  int lo = std::max(0, -k);
  int hi = std::min(n, n - k);
  const int m = hi - lo;
  if (m < 8) return 0.0;
  double mx = 0, my = 0;
  for (int i = lo; i < hi; ++i) {
    mx += x[size_t(i)];
    my += y[size_t(i + k)];
  }
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = lo; i < hi; ++i) {
    const double a = x[size_t(i)] - mx;
    const double b = y[size_t(i + k)] - my;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

// Normalized cross-correlation over lags in [-max_lag, +max_lag] with
// parabolic sub-sample refinement of the peak. Both signals must share dt and
// overlap by at least 5 s. A negative peak with |rho| > flip_threshold marks
// a reversed sensor; the lag is still taken at the |rho| maximum.
inline SyncResult estimate_lag(const dsp::UniformSignal& ref,
                               const dsp::UniformSignal& other, double max_lag_s,
                               double flip_threshold = 0.6) {
  if (std::abs(ref.dt - other.dt) > 1e-9 * ref.dt)
    throw std::invalid_argument("estimate_lag: signals must share dt");
  const double dt = ref.dt;
  const double lo = std::max(ref.t0, other.t0);
  const double hi = std::min(ref.end_time(), other.end_time());
  if (hi - lo < 5.0)
    throw std::invalid_argument("estimate_lag: insufficient overlap (< 5 s)");

  const size_t n = size_t(std::floor((hi - lo) / dt + 1e-9)) + 1;
  const auto a = resample_linear(ref, lo, dt, n);
  const auto b = resample_linear(other, lo, dt, n);

  const int K = std::max(1, int(std::lround(max_lag_s / dt)));
  std::vector<double> rho(size_t(2 * K + 1));
  for (int k = -K; k <= K; ++k)
    rho[size_t(k + K)] = detail::corr_at_shift(a.v, b.v, k);

  int best = 0;
  for (int i = 1; i < int(rho.size()); ++i)
    if (std::abs(rho[size_t(i)]) > std::abs(rho[size_t(best)])) best = i;

  SyncResult res;
  res.common_lo = lo;
  res.common_hi = hi;
  res.peak_rho = rho[size_t(best)];
  res.flipped = rho[size_t(best)] < 0.0 && std::abs(rho[size_t(best)]) > flip_threshold;

  // parabolic refinement on |rho| around the peak
  double delta = 0.0;
  if (best > 0 && best + 1 < int(rho.size())) {
    const double s = res.peak_rho < 0.0 ? -1.0 : 1.0;
    const double ym = s * rho[size_t(best - 1)];
    const double y0 = s * rho[size_t(best)];
    const double yp = s * rho[size_t(best + 1)];
    const double den = ym - 2.0 * y0 + yp;
    if (std::abs(den) > 1e-12) delta = std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5);
  }
  res.lag_s = (double(best - K) + delta) * dt;
  return res;
}

}  // namespace stskit::sync
