#pragma once

#include <numbers>

namespace winsel {

/// Frequency interval [lo, hi] in DFT-bin units (bin k <-> 2*pi*k/N rad/sample).
template <typename Scalar>
struct Band {
  Scalar lo{};
  Scalar hi{};

  Scalar width() const { return hi - lo; }
  Scalar center() const { return (lo + hi) / Scalar(2); }
};

template <typename Scalar>
Scalar bins_to_radians(Scalar bins, int n) {
  return Scalar(2) * std::numbers::pi_v<Scalar> * bins / Scalar(n);
}

}  // namespace winsel
