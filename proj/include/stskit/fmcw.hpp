// Desk-scale FMCW radar simulator and processing chain: chirp/IF synthesis for
// point scatterers, range FFT, Doppler FFT, ULA angle estimation via FFT
// beamforming, and cell-averaging CFAR detection.
//
// Sign conventions follow the IF model
//   s_if(t) = alpha * exp(-j 2 pi (fc tau - k tau t + 1/2 k tau^2)),
// with per-chirp delay tau advanced by the target motion and a per-element
// phase of +p * 2 pi d sin(theta) / lambda. Under these conventions the beat
// tone sits at +k*tau, a receding target (v > 0) lands in a negative shifted
// Doppler bin, and a target at positive azimuth lands in a positive shifted
// angle bin.

#pragma once

#include "stskit/model.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

namespace stskit::fmcw {

// Nominal propagation speed used throughout the resolution formulas.
inline constexpr double kC = 3.0e8;

struct RadarConfig {
  double carrier_hz = 60e9;           // f_c
  double chirp_slope_hz_per_s = 4e13; // k
  double chirp_duration_s = 1e-4;     // T_c
  int samples_per_chirp = 256;        // N_r
  int chirps_per_frame = 64;          // N_d
  double adc_rate_hz = 2.56e6;
  int rx_elements = 8;
  double rx_spacing_m = 2.5e-3;       // d, <= lambda/2

  double bandwidth_hz() const { return chirp_slope_hz_per_s * chirp_duration_s; }
  double wavelength_m() const { return kC / carrier_hz; }
  double aperture_m() const { return (rx_elements - 1) * rx_spacing_m; }
  double max_range_m() const { return adc_rate_hz * kC / (2.0 * chirp_slope_hz_per_s); }

  void validate() const {
    if (!(carrier_hz > 0) || !(chirp_slope_hz_per_s > 0) || !(chirp_duration_s > 0) ||
        samples_per_chirp < 2 || chirps_per_frame < 2 || !(adc_rate_hz > 0) ||
        rx_elements < 1 || !(rx_spacing_m > 0))
      throw std::invalid_argument("RadarConfig: all quantities must be positive");
    if (rx_spacing_m > wavelength_m() / 2.0 + 1e-15)
      throw std::invalid_argument("RadarConfig: element spacing exceeds lambda/2");
    if (double(samples_per_chirp) > adc_rate_hz * chirp_duration_s * (1.0 + 1e-9))
      throw std::invalid_argument("RadarConfig: chirp too short for sample count");
  }
};

struct Scatterer {
  double range_m = 1.0;
  double velocity_mps = 0.0;
  double azimuth_rad = 0.0;
  double amplitude = 1.0;
};

struct RadarDetection {
  double range_m = 0.0;
  double velocity_mps = 0.0;
  double azimuth_rad = 0.0;
  double power_db = 0.0;
};

// ---------------------------------------------------------------------------
// Closed-form quantities (Eq. 4-9)

inline double beat_frequency(const RadarConfig& cfg, double range_m) {
  if (!(range_m > 0.0)) throw std::invalid_argument("beat_frequency: range must be > 0");
  return cfg.chirp_slope_hz_per_s * 2.0 * range_m / kC;
}

inline double range_resolution(const RadarConfig& cfg) {
  return kC / (2.0 * cfg.bandwidth_hz());
}

inline double velocity_resolution(const RadarConfig& cfg) {
  return cfg.wavelength_m() / (2.0 * cfg.chirps_per_frame * cfg.chirp_duration_s);
}

inline double angular_resolution(const RadarConfig& cfg, double theta_rad) {
  if (!(std::abs(theta_rad) < kPi / 2.0))
    throw std::invalid_argument("angular_resolution: |theta| must be < pi/2");
  return cfg.wavelength_m() / (2.0 * cfg.aperture_m() * std::cos(theta_rad));
}

inline double doppler_shift(const RadarConfig& cfg, double velocity_mps) {
  return 2.0 * velocity_mps / cfg.wavelength_m();
}

inline double ula_phase_delta(const RadarConfig& cfg, double theta_rad) {
  if (!(std::abs(theta_rad) < kPi / 2.0))
    throw std::invalid_argument("ula_phase_delta: |theta| must be < pi/2");
  return 2.0 * kPi * cfg.rx_spacing_m * std::sin(theta_rad) / cfg.wavelength_m();
}

// ---------------------------------------------------------------------------
// IF cube

struct IfCube {
  int n_rx = 0, n_chirps = 0, n_samples = 0;
  std::vector<std::complex<double>> data;  // [rx][chirp][sample]

  std::complex<double>& at(int r, int m, int n) {
    return data[size_t((r * n_chirps + m) * n_samples + n)];
  }
  const std::complex<double>& at(int r, int m, int n) const {
    return data[size_t((r * n_chirps + m) * n_samples + n)];
  }
};

// Deterministic given the seed. noise_std is the std of the total complex
// noise (E|n|^2 = noise_std^2).
inline IfCube synthesize_if_cube(const RadarConfig& cfg,
                                 const std::vector<Scatterer>& scene,
                                 double noise_std, uint64_t seed = 0) {
  cfg.validate();
  IfCube cube;
  cube.n_rx = cfg.rx_elements;
  cube.n_chirps = cfg.chirps_per_frame;
  cube.n_samples = cfg.samples_per_chirp;
  cube.data.assign(size_t(cube.n_rx) * cube.n_chirps * cube.n_samples, {0.0, 0.0});

  const double k = cfg.chirp_slope_hz_per_s;
  const double fc = cfg.carrier_hz;
  for (const auto& sc : scene) {
    if (!(sc.range_m > 0.0) || !(std::abs(sc.azimuth_rad) < kPi / 2.0))
      throw std::invalid_argument("synthesize_if_cube: invalid scatterer");
    const double dphi = ula_phase_delta(cfg, sc.azimuth_rad);
    for (int m = 0; m < cube.n_chirps; ++m) {
      const double tau = 2.0 * (sc.range_m + sc.velocity_mps * m * cfg.chirp_duration_s) / kC;
      const double phi0 = -2.0 * kPi * (fc * tau + 0.5 * k * tau * tau);
      const double dphase = 2.0 * kPi * k * tau / cfg.adc_rate_hz;  // per sample
      const std::complex<double> step(std::cos(dphase), std::sin(dphase));
      for (int r = 0; r < cube.n_rx; ++r) {
        const double p0 = phi0 + r * dphi;
        std::complex<double> acc = sc.amplitude * std::complex<double>(std::cos(p0), std::sin(p0));
        for (int n = 0; n < cube.n_samples; ++n) {
          cube.at(r, m, n) += acc;
          acc *= step;
        }
      }
    }
  }

  if (noise_std > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise_std / std::sqrt(2.0));
    for (auto& z : cube.data) z += std::complex<double>(gauss(rng), gauss(rng));
  }
  return cube;
}

// ---------------------------------------------------------------------------
// Processing

struct ProcessOptions {
  bool hann_window = true;
  bool clutter_removal = true;  // slow-time mean removal + zero-Doppler notch
  int clutter_notch_bins = 1;   // notch half-width around zero Doppler
  double cfar_pfa = 1e-4;
  int cfar_train = 8;  // per side
  int cfar_guard = 2;  // per side
  int angle_fft = 128;
  // detections this far below the strongest one are discarded (suppresses
  // window-leakage residue on noise-free inputs)
  double dynamic_range_db = 60.0;
};

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  static thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace detail

// Unnormalized forward DFT (sum convention; Parseval factor N).
inline std::vector<std::complex<double>> fft_forward(
    const std::vector<std::complex<double>>& in) {
  std::vector<std::complex<double>> out(in.size());
  detail::fft_engine().fwd(out, in);
  return out;
}

// Periodic Hann: a constant input leaks into integer FFT bins 0 and +/-1
// only, so the clutter notch removes the mean-subtraction residue exactly.
inline std::vector<double> hann_window(int n) {
  std::vector<double> w(size_t(n), 0.0);
  for (int i = 0; i < n; ++i)
    w[size_t(i)] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
  return w;
}

// Range-Doppler maps per RX element (Doppler fftshifted) plus the RX-averaged
// power map indexed [doppler][range].
struct RangeDopplerMaps {
  int n_dopp = 0, n_range = 0, n_rx = 0;
  std::vector<std::vector<std::complex<double>>> rx_maps;  // rx -> [dopp*range]
  std::vector<double> power;                               // [dopp*range]

  const std::complex<double>& at(int rx, int d, int r) const {
    return rx_maps[size_t(rx)][size_t(d * n_range + r)];
  }
  double power_at(int d, int r) const { return power[size_t(d * n_range + r)]; }
};

inline RangeDopplerMaps range_doppler_maps(const RadarConfig& cfg, const IfCube& cube,
                                           const ProcessOptions& opt = {}) {
  if (cube.n_rx != cfg.rx_elements || cube.n_chirps != cfg.chirps_per_frame ||
      cube.n_samples != cfg.samples_per_chirp)
    throw std::invalid_argument("range_doppler_maps: cube dimensions do not match config");

  const int nr = cube.n_samples, nd = cube.n_chirps, nrx = cube.n_rx;
  const auto wr = opt.hann_window ? hann_window(nr) : std::vector<double>(size_t(nr), 1.0);
  const auto wd = opt.hann_window ? hann_window(nd) : std::vector<double>(size_t(nd), 1.0);

  RangeDopplerMaps maps;
  maps.n_dopp = nd;
  maps.n_range = nr;
  maps.n_rx = nrx;
  maps.rx_maps.assign(size_t(nrx), {});

  std::vector<std::complex<double>> buf;
  for (int r = 0; r < nrx; ++r) {
    // range FFT per chirp -> [chirp][range]
    std::vector<std::complex<double>> rfft(size_t(nd) * nr);
    for (int m = 0; m < nd; ++m) {
      buf.assign(size_t(nr), {});
      for (int n = 0; n < nr; ++n) buf[size_t(n)] = cube.at(r, m, n) * wr[size_t(n)];
      auto row = fft_forward(buf);
      std::copy(row.begin(), row.end(), rfft.begin() + size_t(m) * nr);
    }
    // Doppler FFT per range bin, fftshifted -> [dopp][range]. Static clutter
    // removal subtracts the slow-time mean first (a bin-only notch would
    // leave the static return's window sidelobes in adjacent Doppler bins),
    // then notches the zero-Doppler neighborhood where the subtraction
    // residue of moving targets concentrates.
    auto& out = maps.rx_maps[size_t(r)];
    out.assign(size_t(nd) * nr, {});
    for (int n = 0; n < nr; ++n) {
      buf.assign(size_t(nd), {});
      for (int m = 0; m < nd; ++m) buf[size_t(m)] = rfft[size_t(m) * nr + n];
      if (opt.clutter_removal) {
        std::complex<double> mean = 0.0;
        for (const auto& z : buf) mean += z;
        mean /= double(nd);
        for (auto& z : buf) z -= mean;
      }
      for (int m = 0; m < nd; ++m) buf[size_t(m)] *= wd[size_t(m)];
      auto col = fft_forward(buf);
      for (int d = 0; d < nd; ++d) {
        const int shifted = (d + nd / 2) % nd;  // index nd/2 <-> zero Doppler
        out[size_t(shifted) * nr + n] = col[size_t(d)];
      }
    }
    if (opt.clutter_removal)
      for (int d = nd / 2 - opt.clutter_notch_bins;
           d <= nd / 2 + opt.clutter_notch_bins; ++d)
        for (int n = 0; n < nr; ++n) out[size_t(d) * nr + n] = 0.0;
  }

  maps.power.assign(size_t(nd) * nr, 0.0);
  for (int r = 0; r < nrx; ++r)
    for (size_t i = 0; i < maps.power.size(); ++i)
      maps.power[i] += std::norm(maps.rx_maps[size_t(r)][i]) / nrx;
  return maps;
}

// 1-D cell-averaging CFAR along the range axis of the power map. Cells whose
// training windows run off the map are never flagged. The threshold
// multiplier alpha = pfa^(-1/N) - 1 (exact for exponential cell statistics).
inline std::vector<uint8_t> cfar_mask(const RangeDopplerMaps& maps,
                                      const ProcessOptions& opt = {}) {
  const int nd = maps.n_dopp, nr = maps.n_range;
  const int guard = opt.cfar_guard, train = opt.cfar_train;
  const int ncells = 2 * train;
  const double alpha = std::pow(opt.cfar_pfa, -1.0 / ncells) - 1.0;
  std::vector<uint8_t> mask(size_t(nd) * nr, 0);
  for (int d = 0; d < nd; ++d) {
    for (int r = train + guard; r < nr - train - guard; ++r) {
      double sum = 0.0;
      for (int k = guard + 1; k <= guard + train; ++k)
        sum += maps.power_at(d, r - k) + maps.power_at(d, r + k);
      if (maps.power_at(d, r) > alpha * sum) mask[size_t(d) * nr + r] = 1;
    }
  }
  return mask;
}

namespace detail {

// parabolic vertex offset from three log-domain samples
inline double parabolic_delta(double ym, double y0, double yp) {
  const double den = ym - 2.0 * y0 + yp;
  if (std::abs(den) < 1e-300) return 0.0;
  return std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5);
}

inline double log_power(double p) { return std::log(std::max(p, 1e-300)); }

}  // namespace detail

// Full chain: range FFT, Doppler FFT, optional static-bin suppression, CA-CFAR
// on the RX-averaged power map, local-maximum grouping, then per-detection
// parabolic interpolation and FFT beamforming across the array.
inline std::vector<RadarDetection> process_cube(const RadarConfig& cfg, const IfCube& cube,
                                                const ProcessOptions& opt = {}) {
  const auto maps = range_doppler_maps(cfg, cube, opt);
  const auto mask = cfar_mask(maps, opt);
  const int nd = maps.n_dopp, nr = maps.n_range;

  auto is_peak = [&](int d, int r) {
    const double p = maps.power_at(d, r);
    const long idx = long(d) * nr + r;
    for (int dd = -1; dd <= 1; ++dd) {
      for (int dr = -1; dr <= 1; ++dr) {
        if (dd == 0 && dr == 0) continue;
        const int d2 = d + dd, r2 = r + dr;
        if (d2 < 0 || d2 >= nd || r2 < 0 || r2 >= nr) continue;
        const double q = maps.power_at(d2, r2);
        if (q > p) return false;
        if (q == p && long(d2) * nr + r2 < idx) return false;
      }
    }
    return true;
  };

  const double dv = velocity_resolution(cfg);
  const double range_bin_m = cfg.adc_rate_hz / cfg.samples_per_chirp * kC /
                             (2.0 * cfg.chirp_slope_hz_per_s);

  std::vector<RadarDetection> dets;
  for (int d = 0; d < nd; ++d) {
    for (int r = 0; r < nr; ++r) {
      if (!mask[size_t(d) * nr + r] || !is_peak(d, r)) continue;

      double rb = double(r);
      if (r > 0 && r + 1 < nr)
        rb += detail::parabolic_delta(detail::log_power(maps.power_at(d, r - 1)),
                                      detail::log_power(maps.power_at(d, r)),
                                      detail::log_power(maps.power_at(d, r + 1)));
      double db = double(d);
      if (d > 0 && d + 1 < nd)
        db += detail::parabolic_delta(detail::log_power(maps.power_at(d - 1, r)),
                                      detail::log_power(maps.power_at(d, r)),
                                      detail::log_power(maps.power_at(d + 1, r)));

      RadarDetection det;
      det.range_m = rb * range_bin_m;
      det.velocity_mps = -(db - nd / 2) * dv;
      det.power_db = 10.0 * std::log10(std::max(maps.power_at(d, r), 1e-300));

      if (maps.n_rx > 1) {
        std::vector<std::complex<double>> steer(size_t(opt.angle_fft), {0.0, 0.0});
        for (int p = 0; p < maps.n_rx; ++p) steer[size_t(p)] = maps.at(p, d, r);
        auto spec = fft_forward(steer);
        const int na = opt.angle_fft;
        int best = 0;
        double bp = -1.0;
        std::vector<double> pw(size_t(na), 0.0);
        for (int i = 0; i < na; ++i) {
          const int shifted = (i + na / 2) % na;
          pw[size_t(shifted)] = std::norm(spec[size_t(i)]);
        }
        for (int i = 0; i < na; ++i)
          if (pw[size_t(i)] > bp) bp = pw[size_t(i)], best = i;
        double ab = double(best);
        if (best > 0 && best + 1 < na)
          ab += detail::parabolic_delta(detail::log_power(pw[size_t(best - 1)]),
                                        detail::log_power(pw[size_t(best)]),
                                        detail::log_power(pw[size_t(best + 1)]));
        const double sin_theta =
            std::clamp((ab - na / 2) * cfg.wavelength_m() / (na * cfg.rx_spacing_m), -1.0, 1.0);
        det.azimuth_rad = std::asin(sin_theta);
      }
      dets.push_back(det);
    }
  }
  if (!dets.empty()) {
    double peak = -1e300;
    for (const auto& d : dets) peak = std::max(peak, d.power_db);
    std::erase_if(dets, [&](const RadarDetection& d) {
      return d.power_db < peak - opt.dynamic_range_db;
    });
  }
  return dets;
}

// std of complex noise giving the requested per-sample SNR for a unit target.
inline double noise_std_for_snr(double amplitude, double snr_db) {
  return amplitude * std::pow(10.0, -snr_db / 20.0);
}

}  // namespace stskit::fmcw
