#pragma once

// Per-bin window selection policies. Window indices are 0-based and follow the
// catalog order (increasing peak sidelobe suppression): 0 = rectangle.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "winsel/bandcov.hpp"
#include "winsel/windows.hpp"

namespace winsel {

using BandCov = BandCovariance<double>;
using CVectorRef = Eigen::Ref<const Eigen::VectorXcd>;

struct HypothesisOptions {
  /// Per-window hypothesis JNR in dB; defaults to half of each window's PSL.
  std::optional<std::vector<double>> hyp_jnr_db;
  double rank_threshold = kDefaultRankThreshold;
};

/// One hypothesis per window. `common_band` is the narrowest (last window's)
/// suppression band and drives the exact test; `per_window_band[k]` is window
/// k's own stop-band covariance for k >= 1 (empty for k == 0).
struct HypothesisSet {
  std::vector<WindowSpec> windows;
  std::vector<double> hyp_jnr_db;
  BandCov common_band;
  std::vector<std::optional<BandCov>> per_window_band;

  int size() const { return static_cast<int>(windows.size()); }
  int length() const { return windows.front().length(); }
};

HypothesisSet make_hypothesis_set(std::vector<WindowSpec> windows,
                                  const HypothesisOptions& options = {});

/// bounds_linear[0] == 0, bounds_linear[k] separates window k-1 from window k.
struct DecisionBoundaries {
  std::vector<double> bounds_linear;
  double disabling_factor = 2.0;
};

/// JNR (linear) at which two windowed detectors have equal SJNR. Independent
/// of the signal power and of the false-alarm rate.
double boundary_jnr(const WindowSpec& w1, const WindowSpec& w2, const BandCov& band,
                    const CVectorRef& steering);
double boundary_jnr(const WindowSpec& w1, const WindowSpec& w2, const BandCov& band);

DecisionBoundaries decision_boundaries(const HypothesisSet& hyp,
                                       double disabling_factor = 2.0);

/// e^{j 2 pi bin n / N}, n = 0..N-1.
Eigen::VectorXcd steering_vector(int n, double bin);

/// Shift bin `bin` of r down to DC: r[n] * e^{-j 2 pi bin n / N}.
Eigen::VectorXcd modulate_to_dc(const CVectorRef& r, int bin);

/// Simplified log-likelihood ratio of hypothesis k against hypothesis 0, for
/// an observation already modulated to DC.
double exact_llr(const CVectorRef& r, const HypothesisSet& hyp, int k);

/// Log-likelihood ratios for all hypotheses (entry 0 is exactly zero).
std::vector<double> exact_llrs(const CVectorRef& r, const HypothesisSet& hyp);

/// MAP selection with uniform priors; ties go to the lower index.
int select_exact(const CVectorRef& r, const HypothesisSet& hyp, int bin = 0);

struct SimpleSelection {
  std::vector<double> band_power;  // d_k for k >= 1; entry 0 unused (0)
  int k_max = 0;
  int k_select = 0;
};

/// Quantized band-power test with window disabling.
SimpleSelection select_simple_detail(const CVectorRef& r, const HypothesisSet& hyp,
                                     const DecisionBoundaries& bounds, int bin = 0);

int select_simple(const CVectorRef& r, const HypothesisSet& hyp,
                  const DecisionBoundaries& bounds, int bin = 0);

struct ApodizationPick {
  double magnitude = 0.0;
  int index = 0;
};

/// Minimum windowed-DFT magnitude at `bin` across windows (ties to lower index).
ApodizationPick multi_apodization(const CVectorRef& r, const std::vector<WindowSpec>& windows,
                                  int bin = 0);

}  // namespace winsel
