#include "winsel/detector.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace winsel {

using detail::require;

namespace {

constexpr std::uint64_t kHoldoutStream = 0x484f4c444f5554ULL;  // "HOLDOUT"

}  // namespace

std::string policy_name(const Policy& p, const std::vector<WindowSpec>& windows) {
  switch (p.kind) {
    case PolicyKind::fixed:
      require(p.window >= 0 && p.window < static_cast<int>(windows.size()),
              ErrorCode::invalid_argument, "fixed policy window index out of range");
      return "fixed:" + windows[p.window].name;
    case PolicyKind::multi_apodization: return "multi_apodization";
    case PolicyKind::proposed_exact: return "proposed_exact";
    case PolicyKind::proposed_simple: return "proposed_simple";
  }
  return "unknown";
}

Policy parse_policy(const std::string& name, const std::vector<WindowSpec>& windows) {
  if (name == "multi_apodization") return Policy::multi_apodization();
  if (name == "proposed_exact") return Policy::proposed_exact();
  if (name == "proposed_simple") return Policy::proposed_simple();
  const std::string prefix = "fixed:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string wname = name.substr(prefix.size());
    for (int k = 0; k < static_cast<int>(windows.size()); ++k) {
      if (windows[k].name == wname) return Policy::fixed(k);
    }
  }
  throw Error(ErrorCode::invalid_config, "unknown policy '" + name + "'");
}

DetectorContext make_detector_context(int n, double chebyshev_atten_db,
                                      double disabling_factor,
                                      const HypothesisOptions& options) {
  DetectorContext ctx{make_hypothesis_set(default_catalog(n, chebyshev_atten_db), options), {}};
  ctx.bounds = decision_boundaries(ctx.hyp, disabling_factor);
  return ctx;
}

double statistic(const CVectorRef& r, const WindowSpec& w, int bin) {
  require(r.size() == w.length(), ErrorCode::dimension_mismatch,
          "statistic: dimension mismatch");
  const Eigen::VectorXcd x = modulate_to_dc(r, bin);
  return std::norm((w.coeffs.cast<std::complex<double>>().transpose() * x).value());
}

PolicyOutcome evaluate_policy(const Policy& policy, const CVectorRef& r,
                              const DetectorContext& ctx, int bin) {
  const Eigen::VectorXcd x = modulate_to_dc(r, bin);
  const auto& windows = ctx.windows();
  int k = 0;
  switch (policy.kind) {
    case PolicyKind::fixed:
      require(policy.window >= 0 && policy.window < static_cast<int>(windows.size()),
              ErrorCode::invalid_argument, "fixed policy window index out of range");
      k = policy.window;
      break;
    case PolicyKind::multi_apodization: {
      const auto pick = multi_apodization(x, windows);
      return {pick.magnitude * pick.magnitude, pick.index};
    }
    case PolicyKind::proposed_exact:
      k = select_exact(x, ctx.hyp);
      break;
    case PolicyKind::proposed_simple:
      k = select_simple(x, ctx.hyp, ctx.bounds);
      break;
  }
  return {statistic(x, windows[k]), k};
}

double sjnr(const WindowSpec& w, const CVectorRef& steering, const BandCov& band, double snr,
            double jnr) {
  require(steering.size() == w.length() && band.n == w.length(), ErrorCode::dimension_mismatch,
          "sjnr: dimension mismatch");
  const Eigen::VectorXcd c = w.coeffs.cast<std::complex<double>>();
  const double gain = std::norm((c.adjoint() * steering).value());
  const double leak = (c.adjoint() * band.matrix * c).value().real();
  return snr * gain / (jnr * leak + w.coeffs.squaredNorm());
}

double analytic_pd(double pfa, double sjnr_linear) {
  require(pfa > 0.0 && pfa < 1.0, ErrorCode::invalid_argument, "analytic_pd: pfa outside (0,1)");
  require(sjnr_linear >= 0.0, ErrorCode::invalid_argument, "analytic_pd: negative SJNR");
  return std::pow(pfa, 1.0 / (1.0 + sjnr_linear));
}

BatchStatistics run_batch(const std::vector<Policy>& policies, const DetectorContext& ctx,
                          const Scenario& sc, int bin, std::uint64_t trials, int workers) {
  validate(sc);
  require(sc.n == ctx.hyp.length(), ErrorCode::dimension_mismatch,
          "scenario length does not match the window catalog");
  require(workers >= 1, ErrorCode::invalid_argument, "workers must be >= 1");
  const std::size_t np = policies.size();
  const std::size_t nw = ctx.windows().size();

  BatchStatistics out;
  out.statistic.assign(np, std::vector<double>(trials));
  out.selection_count.assign(np, std::vector<std::uint64_t>(nw, 0));

  // Each worker owns a contiguous trial range; counts are summed afterwards,
  // so the result does not depend on the worker count.
  const std::uint64_t nthreads = std::min<std::uint64_t>(workers, std::max<std::uint64_t>(trials, 1));
  std::vector<std::vector<std::vector<std::uint64_t>>> local(
      nthreads, std::vector<std::vector<std::uint64_t>>(np, std::vector<std::uint64_t>(nw, 0)));
  auto work = [&](std::uint64_t w) {
    const std::uint64_t lo = trials * w / nthreads;
    const std::uint64_t hi = trials * (w + 1) / nthreads;
    Snapshot snap;
    for (std::uint64_t t = lo; t < hi; ++t) {
      draw_snapshot_into(sc, t, snap);
      const Eigen::VectorXcd x = modulate_to_dc(snap.r, bin);
      for (std::size_t p = 0; p < np; ++p) {
        const auto o = evaluate_policy(policies[p], x, ctx);
        out.statistic[p][t] = o.statistic;
        ++local[w][p][o.window];
      }
    }
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < nthreads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& l : local) {
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t k = 0; k < nw; ++k) out.selection_count[p][k] += l[p][k];
    }
  }
  return out;
}

double empirical_threshold(std::vector<double> stats, double pfa) {
  require(!stats.empty(), ErrorCode::insufficient_trials, "empirical_threshold: no samples");
  const auto t = stats.size();
  const auto above = static_cast<std::size_t>(std::floor(pfa * static_cast<double>(t)));
  require(above < t, ErrorCode::invalid_argument, "empirical_threshold: pfa too large");
  const auto idx = t - above - 1;
  std::nth_element(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(idx), stats.end());
  return stats[idx];
}

Scenario null_scenario(const Scenario& sc, NullConvention convention) {
  Scenario h0 = sc;
  h0.include_signal = false;
  if (convention == NullConvention::noise_only) h0.jnr_db = kOff;
  return h0;
}

std::vector<Calibration> calibrate_batch(const std::vector<Policy>& policies,
                                         const DetectorContext& ctx, const Scenario& sc_h0,
                                         int bin, double pfa, std::uint64_t trials,
                                         int workers) {
  require(pfa > 0.0 && pfa < 1.0, ErrorCode::invalid_argument, "calibration: pfa outside (0,1)");
  require(!sc_h0.include_signal, ErrorCode::invalid_argument,
          "calibration: H0 scenario must not include the signal");
  require(static_cast<double>(trials) >= 100.0 / pfa, ErrorCode::insufficient_trials,
          "calibration: need at least 100/pfa trials");

  const auto fit = run_batch(policies, ctx, sc_h0, bin, trials, workers);
  Scenario holdout = sc_h0;
  holdout.seed = derive_seed(sc_h0.seed, kHoldoutStream);
  const auto check = run_batch(policies, ctx, holdout, bin, trials, workers);

  std::vector<Calibration> cal(policies.size());
  for (std::size_t p = 0; p < policies.size(); ++p) {
    cal[p].threshold = empirical_threshold(fit.statistic[p], pfa);
    const auto& s = check.statistic[p];
    const auto hits = std::count_if(s.begin(), s.end(),
                                    [&](double v) { return v > cal[p].threshold; });
    cal[p].heldout_pfa = static_cast<double>(hits) / static_cast<double>(trials);
    cal[p].trials = trials;
  }
  return cal;
}

Calibration calibrate_threshold(DetectorSpec& spec, const DetectorContext& ctx,
                                const Scenario& sc_h0, std::uint64_t trials, int workers) {
  const auto cal =
      calibrate_batch({spec.policy}, ctx, sc_h0, spec.bin, spec.pfa, trials, workers).front();
  spec.threshold = cal.threshold;
  return cal;
}

PdEstimate summarize(const std::vector<double>& stats,
                     const std::vector<std::uint64_t>& selections, double threshold) {
  PdEstimate e;
  e.trials = stats.size();
  require(e.trials > 0, ErrorCode::insufficient_trials, "estimate_pd: no trials");
  const auto hits =
      std::count_if(stats.begin(), stats.end(), [&](double v) { return v > threshold; });
  const double t = static_cast<double>(e.trials);
  e.pd = static_cast<double>(hits) / t;
  e.stderr_ = std::sqrt(e.pd * (1.0 - e.pd) / t);
  for (auto c : selections) e.selection_freq.push_back(static_cast<double>(c) / t);
  return e;
}

PdEstimate estimate_pd(const DetectorSpec& spec, const DetectorContext& ctx,
                       const Scenario& sc_h1, std::uint64_t trials, int workers) {
  require(spec.threshold.has_value(), ErrorCode::uncalibrated,
          "estimate_pd: detector threshold has not been calibrated");
  require(sc_h1.include_signal, ErrorCode::invalid_argument,
          "estimate_pd: H1 scenario must include the signal");
  const auto batch = run_batch({spec.policy}, ctx, sc_h1, spec.bin, trials, workers);
  return summarize(batch.statistic.front(), batch.selection_count.front(), *spec.threshold);
}

}  // namespace winsel
