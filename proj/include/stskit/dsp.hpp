// Signal conditioning: zero-phase Butterworth filtering, Whittaker-Eilers
// smoothing, numerical differentiation, trapezoidal gyro integration and
// linear resampling. All operations are pure.

#pragma once

#include "stskit/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace stskit::dsp {

// Uniformly sampled real signal. `unit` is carried as metadata only.
struct UniformSignal {
  double t0 = 0.0;
  double dt = 0.05;
  std::vector<double> v;
  std::string unit = "deg";

  size_t size() const { return v.size(); }
  double time_at(size_t i) const { return t0 + double(i) * dt; }
  double end_time() const { return v.empty() ? t0 : time_at(v.size() - 1); }

  // linear interpolation; throws outside the sampled span
  double value_at(double t) const {
    if (v.empty()) throw std::invalid_argument("value_at: empty signal");
    const double eps = 1e-9 * dt;
    if (t < t0 - eps || t > end_time() + eps)
      throw std::invalid_argument("value_at: extrapolation request");
    double x = std::clamp((t - t0) / dt, 0.0, double(v.size() - 1));
    size_t i = std::min(size_t(x), v.size() - 2 + (v.size() == 1 ? 1 : 0));
    if (v.size() == 1) return v[0];
    i = std::min(i, v.size() - 2);
    const double f = x - double(i);
    return v[i] * (1.0 - f) + v[i + 1] * f;
  }

  int index_at(double t) const {
    return int(std::lround((t - t0) / dt));
  }
};

enum class FilterKind { Lowpass, Highpass };

struct FilterSpec {
  FilterKind kind = FilterKind::Lowpass;
  double cutoff_hz = 5.0;
  int order = 2;
};

struct FilterCoeffs {
  std::vector<double> b, a;  // a[0] == 1
};

namespace detail {

inline std::vector<std::complex<double>> poly_from_roots(
    const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> p = {1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> q(p.size() + 1, 0.0);
    for (size_t i = 0; i < p.size(); ++i) {
      q[i] += p[i];
      q[i + 1] -= p[i] * r;
    }
    p = std::move(q);
  }
  return p;
}

inline double polyval_real(const std::vector<double>& c, double z) {
  double acc = 0.0;
  for (double ci : c) acc = acc * z + ci;
  return acc;
}

}  // namespace detail

// Digital Butterworth via analog prototype + bilinear transform with
// frequency pre-warping. Gain is pinned at DC (lowpass) or Nyquist (highpass).
inline FilterCoeffs butterworth_design(const FilterSpec& spec, double fs_hz) {
  if (spec.order < 1) throw std::invalid_argument("butterworth: order >= 1");
  if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= fs_hz / 2.0)
    throw std::invalid_argument("butterworth: cutoff must lie in (0, Nyquist)");
  const int n = spec.order;
  const double warped = 2.0 * fs_hz * std::tan(kPi * spec.cutoff_hz / fs_hz);

  std::vector<std::complex<double>> poles, zeros;
  for (int k = 0; k < n; ++k) {
    const double theta = kPi * (2.0 * k + n + 1.0) / (2.0 * n);
    std::complex<double> p(std::cos(theta), std::sin(theta));
    if (spec.kind == FilterKind::Lowpass)
      poles.push_back(warped * p);
    else
      poles.push_back(warped / p);
  }
  if (spec.kind == FilterKind::Highpass)
    zeros.assign(size_t(n), std::complex<double>(0.0, 0.0));

  // bilinear s -> z
  const double fs2 = 2.0 * fs_hz;
  std::vector<std::complex<double>> zp, zz;
  for (const auto& p : poles) zp.push_back((fs2 + p) / (fs2 - p));
  for (const auto& z : zeros) zz.push_back((fs2 + z) / (fs2 - z));
  // zeros mapped from analog infinity land at z = -1
  while (zz.size() < zp.size()) zz.push_back(std::complex<double>(-1.0, 0.0));

  auto bc = detail::poly_from_roots(zz);
  auto ac = detail::poly_from_roots(zp);
  FilterCoeffs c;
  c.b.resize(bc.size());
  c.a.resize(ac.size());
  for (size_t i = 0; i < bc.size(); ++i) c.b[i] = bc[i].real();
  for (size_t i = 0; i < ac.size(); ++i) c.a[i] = ac[i].real();

  const double zref = (spec.kind == FilterKind::Lowpass) ? 1.0 : -1.0;
  const double g = detail::polyval_real(c.a, zref) / detail::polyval_real(c.b, zref);
  for (auto& bi : c.b) bi *= g;
  return c;
}

// Direct-form II transposed with initial state.
inline std::vector<double> lfilter(const FilterCoeffs& c,
                                   const std::vector<double>& x,
                                   std::vector<double> z) {
  const size_t nst = c.a.size() - 1;
  z.resize(nst, 0.0);
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double yi = c.b[0] * x[i] + (nst ? z[0] : 0.0);
    for (size_t j = 0; j + 1 < nst; ++j)
      z[j] = c.b[j + 1] * x[i] + z[j + 1] - c.a[j + 1] * yi;
    if (nst) z[nst - 1] = c.b[nst] * x[i] - c.a[nst] * yi;
    y[i] = yi;
  }
  return y;
}

// Steady-state filter state for a unit step; scaled by the first sample this
// removes the start-up transient (same construction as scipy's lfilter_zi).
inline std::vector<double> lfilter_zi(const FilterCoeffs& c) {
  const int n = int(c.a.size()) - 1;
  Eigen::MatrixXd IminusA = Eigen::MatrixXd::Identity(n, n);
  // companion(a) transposed
  for (int i = 0; i < n; ++i) IminusA(i, 0) += c.a[size_t(i) + 1];
  for (int i = 0; i + 1 < n; ++i) IminusA(i, i + 1) -= 1.0;
  Eigen::VectorXd B(n);
  for (int i = 0; i < n; ++i) B(i) = c.b[size_t(i) + 1] - c.a[size_t(i) + 1] * c.b[0];
  Eigen::VectorXd zi = IminusA.colPivHouseholderQr().solve(B);
  std::vector<double> out(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) out[size_t(i)] = zi(i);
  return out;
}

// Forward-backward (zero-phase) filtering with odd-reflection padding.
inline UniformSignal butterworth_filtfilt(const UniformSignal& sig,
                                          const FilterSpec& spec) {
  const double fs = 1.0 / sig.dt;
  const FilterCoeffs c = butterworth_design(spec, fs);
  const size_t padlen = 3 * (c.a.size() - 1);
  if (sig.v.size() <= padlen)
    throw std::invalid_argument("butterworth_filtfilt: signal too short");

  const auto& x = sig.v;
  const size_t n = x.size();
  std::vector<double> ext;
  ext.reserve(n + 2 * padlen);
  for (size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = lfilter_zi(c);
  auto scale_state = [&zi](double x0) {
    std::vector<double> z = zi;
    for (auto& s : z) s *= x0;
    return z;
  };
  std::vector<double> y = lfilter(c, ext, scale_state(ext.front()));
  std::reverse(y.begin(), y.end());
  y = lfilter(c, y, scale_state(y.front()));
  std::reverse(y.begin(), y.end());

  UniformSignal out = sig;
  out.v.assign(y.begin() + long(padlen), y.begin() + long(padlen + n));
  return out;
}

// Whittaker-Eilers smoother: minimizes sum (y-z)^2 + lambda * sum (D^d z)^2,
// solved through the banded system (I + lambda D'D) z = y.
inline UniformSignal whittaker_smooth(const UniformSignal& sig, double lambda,
                                      int d = 2) {
  if (lambda < 0.0) throw std::invalid_argument("whittaker_smooth: negative lambda");
  if (d < 1) throw std::invalid_argument("whittaker_smooth: order >= 1");
  const int n = int(sig.v.size());
  if (n <= d) throw std::invalid_argument("whittaker_smooth: signal too short");
  if (lambda == 0.0) return sig;

  // d-th difference coefficients: (-1)^k * C(d, k)
  std::vector<double> coef(size_t(d) + 1);
  coef[0] = 1.0;
  for (int k = 1; k <= d; ++k)
    coef[size_t(k)] = -coef[size_t(k) - 1] * double(d - k + 1) / double(k);

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(size_t(n) * size_t(d + 1));
  Eigen::SparseMatrix<double> D(n - d, n);
  for (int r = 0; r < n - d; ++r)
    for (int k = 0; k <= d; ++k) trips.emplace_back(r, r + k, coef[size_t(k)]);
  D.setFromTriplets(trips.begin(), trips.end());

  Eigen::SparseMatrix<double> A(n, n);
  A.setIdentity();
  A += lambda * Eigen::SparseMatrix<double>(D.transpose() * D);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("whittaker_smooth: factorization failed");
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(sig.v.data(), n);
  Eigen::VectorXd z = solver.solve(y);

  UniformSignal out = sig;
  Eigen::Map<Eigen::VectorXd>(out.v.data(), n) = z;
  return out;
}

// Removes the least-squares line. Exact constant-plus-ramp drift removal on
// bounded records with no edge transient.
inline UniformSignal detrend_linear(const UniformSignal& sig) {
  const size_t n = sig.v.size();
  if (n < 2) throw std::invalid_argument("detrend_linear: signal too short");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += double(i);
    sy += sig.v[i];
    sxx += double(i) * double(i);
    sxy += double(i) * sig.v[i];
  }
  const double den = double(n) * sxx - sx * sx;
  const double slope = den != 0.0 ? (double(n) * sxy - sx * sy) / den : 0.0;
  const double icept = (sy - slope * sx) / double(n);
  UniformSignal out = sig;
  for (size_t i = 0; i < n; ++i) out.v[i] -= icept + slope * double(i);
  return out;
}

// Central differences in the interior, one-sided at the ends.
inline UniformSignal differentiate(const UniformSignal& sig) {
  const size_t n = sig.v.size();
  if (n < 3) throw std::invalid_argument("differentiate: signal too short");
  UniformSignal out = sig;
  out.unit = sig.unit + "/s";
  out.v[0] = (sig.v[1] - sig.v[0]) / sig.dt;
  for (size_t i = 1; i + 1 < n; ++i)
    out.v[i] = (sig.v[i + 1] - sig.v[i - 1]) / (2.0 * sig.dt);
  out.v[n - 1] = (sig.v[n - 1] - sig.v[n - 2]) / sig.dt;
  return out;
}

// Cumulative trapezoid, starting at zero.
inline UniformSignal integrate(const UniformSignal& sig) {
  const size_t n = sig.v.size();
  if (n < 2) throw std::invalid_argument("integrate: signal too short");
  UniformSignal out = sig;
  out.unit = sig.unit == "deg/s" ? "deg" : sig.unit + "*s";
  out.v[0] = 0.0;
  for (size_t i = 1; i < n; ++i)
    out.v[i] = out.v[i - 1] + 0.5 * (sig.v[i] + sig.v[i - 1]) * sig.dt;
  return out;
}

enum class GyroAxis { X = 0, Y = 1, Z = 2 };

// Trapezoidal cumulative integral of one angular-velocity axis. The initial
// angle is zero; drift control is the caller's high-pass filter. Stamps are
// taken as recorded (trapezoid over true intervals), then the result is laid
// onto the nominal-rate grid anchored at the first stamp.
inline UniformSignal integrate_gyro(const GyroStream& g, GyroAxis axis) {
  if (g.samples.size() < 2)
    throw std::invalid_argument("integrate_gyro: need at least 2 samples");
  const size_t n = g.samples.size();
  std::vector<double> angle(n, 0.0);
  for (size_t i = 1; i < n; ++i) {
    const double dt = g.samples[i].t - g.samples[i - 1].t;
    angle[i] = angle[i - 1] +
               0.5 * (g.samples[i].w_dps[int(axis)] + g.samples[i - 1].w_dps[int(axis)]) * dt;
  }

  UniformSignal out;
  out.t0 = g.samples.front().t;
  out.dt = 1.0 / g.rate_hz;
  out.unit = "deg";
  const double span = g.samples.back().t - g.samples.front().t;
  const size_t m = size_t(std::floor(span / out.dt + 1e-9)) + 1;
  out.v.resize(m);
  size_t k = 0;
  for (size_t i = 0; i < m; ++i) {
    const double t = out.t0 + double(i) * out.dt;
    while (k + 1 < n && g.samples[k + 1].t <= t) ++k;
    if (k + 1 >= n) {
      out.v[i] = angle[n - 1];
      continue;
    }
    const double seg = g.samples[k + 1].t - g.samples[k].t;
    const double f = seg > 0.0 ? (t - g.samples[k].t) / seg : 0.0;
    out.v[i] = angle[k] * (1.0 - f) + angle[k + 1] * f;
  }
  return out;
}

// Linear interpolation onto a new uniform grid; the grid must lie inside the
// original span.
inline UniformSignal resample_linear(const UniformSignal& sig, double t0,
                                     double dt, size_t n) {
  if (n == 0 || !(dt > 0.0))
    throw std::invalid_argument("resample_linear: bad grid");
  const double eps = 1e-9 * sig.dt;
  const double t_end = t0 + double(n - 1) * dt;
  if (t0 < sig.t0 - eps || t_end > sig.end_time() + eps)
    throw std::invalid_argument("resample_linear: extrapolation request");
  UniformSignal out;
  out.t0 = t0;
  out.dt = dt;
  out.unit = sig.unit;
  out.v.resize(n);
  for (size_t i = 0; i < n; ++i) out.v[i] = sig.value_at(t0 + double(i) * dt);
  return out;
}

// Interpolates samples taken at arbitrary (strictly increasing) instants onto
// a uniform grid spanning them; used to regularize skeleton-frame signals.
inline UniformSignal to_uniform(const std::vector<double>& ts,
                                const std::vector<double>& vs, double rate_hz,
                                const std::string& unit = "deg") {
  if (ts.size() != vs.size() || ts.size() < 2)
    throw std::invalid_argument("to_uniform: need >= 2 samples");
  UniformSignal out;
  out.t0 = ts.front();
  out.dt = 1.0 / rate_hz;
  out.unit = unit;
  const size_t m = size_t(std::floor((ts.back() - ts.front()) / out.dt + 1e-9)) + 1;
  out.v.resize(m);
  size_t k = 0;
  for (size_t i = 0; i < m; ++i) {
    const double t = out.t0 + double(i) * out.dt;
    while (k + 1 < ts.size() && ts[k + 1] <= t) ++k;
    if (k + 1 >= ts.size()) {
      out.v[i] = vs.back();
      continue;
    }
    const double seg = ts[k + 1] - ts[k];
    const double f = seg > 0.0 ? (t - ts[k]) / seg : 0.0;
    out.v[i] = vs[k] * (1.0 - f) + vs[k + 1] * f;
  }
  return out;
}

}  // namespace stskit::dsp
