#pragma once

// Window catalog: rectangle, Hamming and Dolph-Chebyshev tapers, all scaled
// so that sum(coeffs) == N (identical response to a tone centred on the bin).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "winsel/band.hpp"
#include "winsel/error.hpp"

namespace winsel {

enum class WindowKind { rectangle, hamming, chebyshev };

/// Family plus design parameter. `atten_db` is only meaningful for Chebyshev.
struct WindowShape {
  WindowKind kind = WindowKind::rectangle;
  double atten_db = 0.0;

  static WindowShape rectangle() { return {WindowKind::rectangle, 0.0}; }
  static WindowShape hamming() { return {WindowKind::hamming, 0.0}; }
  static WindowShape chebyshev(double atten_db) {
    return {WindowKind::chebyshev, atten_db};
  }

  bool operator==(const WindowShape&) const = default;
};

inline std::string window_label(const WindowShape& shape) {
  switch (shape.kind) {
    case WindowKind::rectangle: return "rectangle";
    case WindowKind::hamming: return "hamming";
    case WindowKind::chebyshev: {
      // Integral attenuations print without a fraction: chebyshev120.
      const double a = shape.atten_db;
      std::string s = std::to_string(a);
      if (a == std::floor(a)) s = std::to_string(static_cast<long long>(a));
      return "chebyshev" + s;
    }
  }
  return "unknown";
}

template <typename Scalar>
struct Window {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::string name;
  WindowShape shape;
  Vector coeffs;
  Scalar psl_db{};       // positive: suppression below the mainlobe peak
  Scalar snr_loss_db{};  // relative to the rectangle
  Band<Scalar> stopband_bins;

  int length() const { return static_cast<int>(coeffs.size()); }
};

using WindowSpec = Window<double>;

inline constexpr int kDefaultOversample = 64;

namespace detail {

template <typename Scalar>
typename Window<Scalar>::Vector chebyshev_taper(int n, Scalar atten_db) {
  using std::acos;
  using std::acosh;
  using std::cos;
  using std::cosh;
  using std::pow;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const int order = n - 1;
  const Scalar beta =
      cosh(acosh(pow(Scalar(10), atten_db / Scalar(20))) / Scalar(order));

  // Chebyshev polynomial sampled on the DFT grid, then an inverse transform.
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> p(n);
  for (int k = 0; k < n; ++k) {
    const Scalar x = beta * cos(pi * Scalar(k) / Scalar(n));
    Scalar v;
    if (x > Scalar(1)) {
      v = cosh(Scalar(order) * acosh(x));
    } else if (x < Scalar(-1)) {
      v = Scalar(2 * (n % 2) - 1) * cosh(Scalar(order) * acosh(-x));
    } else {
      v = cos(Scalar(order) * acos(x));
    }
    p[k] = v;
    if (n % 2 == 0) p[k] *= std::polar(Scalar(1), pi * Scalar(k) / Scalar(n));
  }

  typename Window<Scalar>::Vector spectrum(n);
  for (int m = 0; m < n; ++m) {
    std::complex<Scalar> acc{};
    for (int k = 0; k < n; ++k) {
      acc += p[k] * std::polar(Scalar(1), -Scalar(2) * pi * Scalar(k) *
                                              Scalar(m) / Scalar(n));
    }
    spectrum[m] = acc.real();
  }

  typename Window<Scalar>::Vector w(n);
  if (n % 2 == 1) {
    const int half = (n + 1) / 2;
    for (int m = 0; m < n; ++m) w[m] = spectrum[std::abs(m - (half - 1))];
  } else {
    const int half = n / 2 + 1;
    for (int m = 0; m < n; ++m) {
      w[m] = m < half - 1 ? spectrum[half - 1 - m] : spectrum[m - half + 2];
    }
  }
  return w / w.maxCoeff();
}

template <typename Scalar>
typename Window<Scalar>::Vector raw_taper(const WindowShape& shape, int n) {
  using Vector = typename Window<Scalar>::Vector;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  switch (shape.kind) {
    case WindowKind::rectangle:
      return Vector::Ones(n);
    case WindowKind::hamming: {
      Vector w(n);
      for (int i = 0; i < n; ++i) {
        w[i] = Scalar(0.54) -
               Scalar(0.46) * std::cos(Scalar(2) * pi * Scalar(i) / Scalar(n - 1));
      }
      return w;
    }
    case WindowKind::chebyshev:
      return chebyshev_taper<Scalar>(n, Scalar(shape.atten_db));
  }
  throw Error(ErrorCode::invalid_argument, "unsupported window kind");
}

/// Symmetrise and scale to sum(coeffs) == N.
template <typename Scalar>
typename Window<Scalar>::Vector dc_normalize(
    const typename Window<Scalar>::Vector& w) {
  const int n = static_cast<int>(w.size());
  typename Window<Scalar>::Vector s = (w + w.reverse()) / Scalar(2);
  return s * (Scalar(n) / s.sum());
}

/// Golden-section maximisation of a unimodal function on [a, b].
template <typename Scalar, typename F>
Scalar golden_max(F&& f, Scalar a, Scalar b, int iters = 80) {
  const Scalar g = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = b - g * (b - a);
  Scalar d = a + g * (b - a);
  Scalar fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = f(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace detail

/// |W(f)| / |W(0)| for real coefficients at frequency `bins` (DFT-bin units).
template <typename Derived>
typename Derived::Scalar normalized_response(const Eigen::MatrixBase<Derived>& coeffs,
                                             typename Derived::Scalar bins) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(coeffs.size());
  const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> * bins / Scalar(n);
  std::complex<Scalar> acc{};
  for (int i = 0; i < n; ++i) acc += coeffs[i] * std::polar(Scalar(1), -step * Scalar(i));
  return std::abs(acc) / std::abs(coeffs.sum());
}

/// oversample*N samples of the normalized magnitude at f = i/oversample bins,
/// i = 0 .. oversample*N - 1 (linear scale, 1.0 == 0 dB at DC).
template <typename Scalar>
typename Window<Scalar>::Vector magnitude_spectrum(const Window<Scalar>& w,
                                                   int oversample = kDefaultOversample) {
  detail::require(oversample >= 8, ErrorCode::invalid_argument,
                  "magnitude_spectrum: oversample must be >= 8");
  const int count = oversample * w.length();
  typename Window<Scalar>::Vector mag(count);
  for (int i = 0; i < count; ++i) {
    mag[i] = normalized_response(w.coeffs, Scalar(i) / Scalar(oversample));
  }
  return mag;
}

template <typename Scalar>
Scalar to_db(Scalar linear_magnitude) {
  return Scalar(20) * std::log10(linear_magnitude);
}

/// Peak sidelobe level in dB below the mainlobe (positive number).
template <typename Derived>
typename Derived::Scalar peak_sidelobe_db(const Eigen::MatrixBase<Derived>& coeffs,
                                          int oversample = kDefaultOversample) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(coeffs.size());
  const int half = oversample * n / 2;
  auto mag = [&](Scalar f) { return normalized_response(coeffs, f); };
  const Scalar df = Scalar(1) / Scalar(oversample);

  int first_min = -1;
  Scalar prev = mag(Scalar(0));
  for (int i = 1; i <= half; ++i) {
    const Scalar cur = mag(Scalar(i) * df);
    if (cur > prev) {
      first_min = i - 1;
      break;
    }
    prev = cur;
  }
  detail::require(first_min > 0, ErrorCode::degenerate_design,
                  "window spectrum has no sidelobes on [0, N/2]");

  int best = first_min;
  Scalar best_val = mag(Scalar(first_min) * df);
  for (int i = first_min + 1; i <= half; ++i) {
    const Scalar v = mag(Scalar(i) * df);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const Scalar lo = std::max(Scalar(first_min), Scalar(best - 1)) * df;
  const Scalar hi = std::min(Scalar(half), Scalar(best + 1)) * df;
  const Scalar peak = std::max(best_val, detail::golden_max(mag, lo, hi));
  return -to_db(peak);
}

/// Output-SNR penalty relative to the rectangle: 10 log10(N ||w||^2 / (sum w)^2).
template <typename Derived>
typename Derived::Scalar snr_loss_db(const Eigen::MatrixBase<Derived>& coeffs) {
  using Scalar = typename Derived::Scalar;
  const Scalar n = Scalar(coeffs.size());
  const Scalar sum = coeffs.sum();
  return Scalar(10) * std::log10(n * coeffs.squaredNorm() / (sum * sum));
}

template <typename Scalar>
Scalar snr_loss(const Window<Scalar>& w) {
  return snr_loss_db(w.coeffs);
}

/// Suppression band of `w` relative to a lower-PSL `reference` window.
///
/// theta1 is the first frequency at which |W| falls below |W_ref| after the
/// wider mainlobe of `w` has risen above it (the point where `w` starts to
/// outperform the reference). Located by a grid scan at 1/oversample bins and
/// refined by bisection; theta2 = N - theta1 by conjugate symmetry.
template <typename Scalar>
Band<Scalar> stopband_edges(const Window<Scalar>& w, const Window<Scalar>& reference,
                            int oversample = kDefaultOversample) {
  detail::require(w.length() == reference.length(), ErrorCode::dimension_mismatch,
                  "stopband_edges: window lengths differ");
  detail::require(oversample >= 8, ErrorCode::invalid_argument,
                  "stopband_edges: oversample must be >= 8");
  const int n = w.length();
  const int half = oversample * n / 2;
  const Scalar df = Scalar(1) / Scalar(oversample);
  auto gap = [&](Scalar f) {
    return normalized_response(w.coeffs, f) - normalized_response(reference.coeffs, f);
  };

  bool seen_above = false;
  for (int i = 1; i <= half; ++i) {
    const Scalar g = gap(Scalar(i) * df);
    if (!seen_above) {
      seen_above = g > Scalar(0);
      continue;
    }
    if (g < Scalar(0)) {
      Scalar lo = Scalar(i - 1) * df;
      Scalar hi = Scalar(i) * df;
      for (int it = 0; it < 100 && hi - lo > Scalar(1e-13); ++it) {
        const Scalar mid = (lo + hi) / Scalar(2);
        (gap(mid) > Scalar(0) ? lo : hi) = mid;
      }
      const Scalar theta1 = (lo + hi) / Scalar(2);
      return {theta1, Scalar(n) - theta1};
    }
  }
  throw Error(ErrorCode::degenerate_design,
              "stopband_edges: spectrum never drops below the reference window");
}

template <typename Scalar = double>
Window<Scalar> make_window(const WindowShape& shape, int n,
                           int oversample = kDefaultOversample);

namespace detail {

template <typename Scalar>
Window<Scalar> bare_window(const WindowShape& shape, int n, int oversample) {
  require(n >= 4, ErrorCode::invalid_argument, "make_window: N must be >= 4");
  if (shape.kind == WindowKind::chebyshev) {
    require(shape.atten_db > 0.0 && std::isfinite(shape.atten_db),
            ErrorCode::invalid_argument,
            "make_window: chebyshev attenuation must be positive");
  }
  Window<Scalar> w;
  w.name = window_label(shape);
  w.shape = shape;
  w.coeffs = dc_normalize<Scalar>(raw_taper<Scalar>(shape, n));
  const bool finite_positive =
      w.coeffs.allFinite() && (w.coeffs.array() > Scalar(0)).all();
  require(finite_positive, ErrorCode::degenerate_design,
          "make_window: " + w.name + " taper is not finite and positive at N=" +
              std::to_string(n));
  w.psl_db = peak_sidelobe_db(w.coeffs, oversample);
  w.snr_loss_db = snr_loss_db(w.coeffs);
  if (shape.kind == WindowKind::rectangle) w.snr_loss_db = Scalar(0);
  if (shape.kind == WindowKind::chebyshev) {
    require(std::abs(w.psl_db - Scalar(shape.atten_db)) <= Scalar(0.5),
            ErrorCode::degenerate_design,
            "make_window: N=" + std::to_string(n) + " too small for " +
                std::to_string(shape.atten_db) + " dB Chebyshev design");
  }
  return w;
}

}  // namespace detail

/// Build a DC-normalized catalog window with all cached metrics.
///
/// Stop-band convention for the three-window catalog: Hamming is measured
/// against the rectangle, Chebyshev against the Hamming window of the same
/// length, and the rectangle inherits the Hamming band.
template <typename Scalar>
Window<Scalar> make_window(const WindowShape& shape, int n, int oversample) {
  Window<Scalar> w = detail::bare_window<Scalar>(shape, n, oversample);
  switch (shape.kind) {
    case WindowKind::rectangle: {
      const auto ham = detail::bare_window<Scalar>(WindowShape::hamming(), n, oversample);
      w.stopband_bins = stopband_edges(ham, w, oversample);
      break;
    }
    case WindowKind::hamming: {
      const auto rect = detail::bare_window<Scalar>(WindowShape::rectangle(), n, oversample);
      w.stopband_bins = stopband_edges(w, rect, oversample);
      break;
    }
    case WindowKind::chebyshev: {
      const auto ham = detail::bare_window<Scalar>(WindowShape::hamming(), n, oversample);
      w.stopband_bins = stopband_edges(w, ham, oversample);
      break;
    }
  }
  return w;
}

/// Catalog window's suppression band (cached on construction).
template <typename Scalar>
Band<Scalar> stopband_edges(const Window<Scalar>& w) {
  return w.stopband_bins;
}

/// The rectangle / Hamming / Chebyshev(atten) catalog in increasing-PSL order.
template <typename Scalar = double>
std::vector<Window<Scalar>> default_catalog(int n = 16, double cheb_atten_db = 120.0) {
  return {make_window<Scalar>(WindowShape::rectangle(), n),
          make_window<Scalar>(WindowShape::hamming(), n),
          make_window<Scalar>(WindowShape::chebyshev(cheb_atten_db), n)};
}

}  // namespace winsel
