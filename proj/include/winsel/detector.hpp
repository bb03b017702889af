#pragma once

// Windowed-DFT detectors: statistics, SJNR, the Gaussian-in-Gaussian ROC law
// and empirical threshold calibration for the adaptive policies.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "winsel/selector.hpp"
#include "winsel/simkit.hpp"

namespace winsel {

enum class PolicyKind { fixed, multi_apodization, proposed_exact, proposed_simple };

struct Policy {
  PolicyKind kind = PolicyKind::fixed;
  int window = 0;  // fixed policies only

  static Policy fixed(int window) { return {PolicyKind::fixed, window}; }
  static Policy multi_apodization() { return {PolicyKind::multi_apodization, 0}; }
  static Policy proposed_exact() { return {PolicyKind::proposed_exact, 0}; }
  static Policy proposed_simple() { return {PolicyKind::proposed_simple, 0}; }

  bool operator==(const Policy&) const = default;
};

/// "fixed:<window name>", "multi_apodization", "proposed_exact", "proposed_simple".
std::string policy_name(const Policy& p, const std::vector<WindowSpec>& windows);
Policy parse_policy(const std::string& name, const std::vector<WindowSpec>& windows);

/// Which null hypothesis thresholds are calibrated under.
enum class NullConvention { jammer_plus_noise, noise_only };

struct DetectorSpec {
  Policy policy;
  int bin = 0;
  double pfa = 1e-2;
  std::optional<double> threshold;
};

/// Immutable selector state shared by all detectors of one experiment.
struct DetectorContext {
  HypothesisSet hyp;
  DecisionBoundaries bounds;

  const std::vector<WindowSpec>& windows() const { return hyp.windows; }
};

DetectorContext make_detector_context(int n = 16, double chebyshev_atten_db = 120.0,
                                      double disabling_factor = 2.0,
                                      const HypothesisOptions& options = {});

/// |w_bin^H r|^2 with w modulated to `bin`.
double statistic(const CVectorRef& r, const WindowSpec& w, int bin = 0);

struct PolicyOutcome {
  double statistic = 0.0;
  int window = 0;
};

/// Run the policy's selector on r (at `bin`) and evaluate the chosen window.
PolicyOutcome evaluate_policy(const Policy& policy, const CVectorRef& r,
                              const DetectorContext& ctx, int bin = 0);

/// snr |w^H s|^2 / (jnr w^H R w + ||w||^2), all powers linear.
double sjnr(const WindowSpec& w, const CVectorRef& steering, const BandCov& band, double snr,
            double jnr);

/// pfa^(1 / (1 + sjnr)).
double analytic_pd(double pfa, double sjnr);

/// Statistics for several policies on a shared stream of snapshots.
struct BatchStatistics {
  std::vector<std::vector<double>> statistic;               // [policy][trial]
  std::vector<std::vector<std::uint64_t>> selection_count;  // [policy][window]
};

BatchStatistics run_batch(const std::vector<Policy>& policies, const DetectorContext& ctx,
                          const Scenario& sc, int bin, std::uint64_t trials, int workers = 1);

/// Threshold with exactly floor(pfa * T) of the T statistics strictly above it
/// (absent ties).
double empirical_threshold(std::vector<double> stats, double pfa);

struct Calibration {
  double threshold = 0.0;
  double heldout_pfa = 0.0;  // exceedance rate on an independent H0 run
  std::uint64_t trials = 0;
};

/// Scenario actually used for H0 under `convention` (signal removed, jammer
/// kept or dropped).
Scenario null_scenario(const Scenario& sc, NullConvention convention);

std::vector<Calibration> calibrate_batch(const std::vector<Policy>& policies,
                                         const DetectorContext& ctx, const Scenario& sc_h0,
                                         int bin, double pfa, std::uint64_t trials,
                                         int workers = 1);

/// Empirical (1 - pfa) quantile under H0; also stores it in `spec.threshold`.
Calibration calibrate_threshold(DetectorSpec& spec, const DetectorContext& ctx,
                                const Scenario& sc_h0, std::uint64_t trials, int workers = 1);

struct PdEstimate {
  double pd = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
  std::vector<double> selection_freq;  // per window, sums to 1
};

PdEstimate summarize(const std::vector<double>& stats,
                     const std::vector<std::uint64_t>& selections, double threshold);

PdEstimate estimate_pd(const DetectorSpec& spec, const DetectorContext& ctx,
                       const Scenario& sc_h1, std::uint64_t trials, int workers = 1);

}  // namespace winsel
