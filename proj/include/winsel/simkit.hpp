#pragma once

// Snapshot generator: Rayleigh-faded target and jammer tones in circular
// complex white Gaussian noise, reproducible from (seed, trial).

#include <cmath>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "winsel/band.hpp"
#include "winsel/error.hpp"

namespace winsel {

inline constexpr double kOff = -std::numeric_limits<double>::infinity();

struct Scenario {
  int n = 16;
  double snr_db = 0.0;  // mean target power over noise; kOff disables
  double jnr_db = kOff;  // mean jammer power over noise; kOff disables
  double signal_bin = 0.0;
  /// Jammer frequency = signal_bin + offset, offset ~ Uniform[lo, hi] per trial.
  Band<double> jammer_offset_bins{4.0, 6.0};
  bool include_signal = true;
  std::uint64_t seed = 0;
};

/// Throws Error(invalid_argument) when the scenario breaks its invariants.
void validate(const Scenario& sc);

struct SnapshotTruth {
  double gamma_s = 0.0;
  double gamma_j = 0.0;
  double phi_s = 0.0;
  double phi_j = 0.0;
  double jammer_bin = 0.0;
};

struct Snapshot {
  Eigen::VectorXcd r;
  SnapshotTruth truth;
};

/// SplitMix64 finalizer; used to derive independent per-trial stream keys.
std::uint64_t splitmix64(std::uint64_t x);

/// Stream key for (master, a, b); distinct inputs give unrelated keys.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Per-trial generator: mt19937_64 keyed by derive_seed(seed, trial). Variate
/// transforms are spelled out so streams do not depend on the standard
/// library's distribution implementations.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial) : engine_(derive_seed(seed, trial)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }
  /// Circular complex Gaussian with unit variance (Box-Muller).
  std::complex<double> complex_normal();

 private:
  std::mt19937_64 engine_;
};

Snapshot draw_snapshot(const Scenario& sc, std::uint64_t trial);

/// Allocation-free variant for the Monte Carlo loops; `out.r` is resized once.
void draw_snapshot_into(const Scenario& sc, std::uint64_t trial, Snapshot& out);

/// CSV trace: trial, truth fields, then re/im pairs of r.
void write_snapshot_trace(std::ostream& os, const Scenario& sc, std::uint64_t first_trial,
                          std::uint64_t count);

}  // namespace winsel
