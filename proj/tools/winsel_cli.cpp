// winsel command line: run experiments, dump the window catalog and decision
// boundaries, and run quick analytic self-checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "winsel/bandcov.hpp"
#include "winsel/harness.hpp"

namespace {

using nlohmann::json;
using namespace winsel;

void print_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
}

struct RunArgs {
  std::string preset = "case1";
  std::string config;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;
  std::string format;
  std::string h0;
  std::uint64_t decision_log_trials = 0;
  std::string decision_log;
};

int cmd_run(const RunArgs& a, CLI::App& sub) {
  ExperimentConfig cfg = a.config.empty() ? preset_config(parse_preset(a.preset))
                                          : load_config(a.config);
  if (!a.config.empty() && sub.count("--preset") > 0) {
    throw Error(ErrorCode::invalid_config, "--preset and --config are mutually exclusive");
  }
  if (sub.count("--trials")) cfg.trials = a.trials;
  if (sub.count("--seed")) cfg.seed = a.seed;
  if (sub.count("--workers")) cfg.workers = a.workers;
  if (sub.count("--out")) cfg.output_path = a.out;
  if (sub.count("--format")) cfg.output_format = parse_format(a.format);
  if (sub.count("--h0")) {
    cfg = config_from_json([&] {
      auto j = to_json(cfg);
      j["h0_convention"] = a.h0;
      return j;
    }());
  }
  if (sub.count("--decision-log")) {
    cfg.decision_log_path = a.decision_log;
    cfg.decision_log_trials = a.decision_log_trials > 0 ? a.decision_log_trials : 100;
  }

  const auto result = run_experiment(cfg);
  if (cfg.output_path.empty()) {
    if (cfg.output_format == OutputFormat::csv) {
      std::cout << to_csv(result);
    } else {
      HypothesisOptions opts;
      opts.hyp_jnr_db = cfg.hyp_jnr_db;
      const auto ctx =
          make_detector_context(cfg.n, cfg.chebyshev_atten_db, cfg.disabling_factor, opts);
      std::cout << to_json(result, &ctx).dump(2) << '\n';
    }
  } else {
    emit(result, cfg.output_format, cfg.output_path);
  }
  return 0;
}

int cmd_windows(int n, double cheb) {
  std::cout << catalog_json(default_catalog(n, cheb)).dump(2) << '\n';
  return 0;
}

int cmd_boundaries(int n, double cheb, double factor) {
  const auto ctx = make_detector_context(n, cheb, factor);
  std::cout << json{{"n", n},
                    {"disabling_factor", factor},
                    {"boundaries", boundaries_json(ctx)}}
                   .dump(2)
            << '\n';
  return 0;
}

// Fast analytic checks of the installed build: closed-form oracles that do not
// depend on the selector heuristics.
int cmd_validate(std::uint64_t trials, std::uint64_t seed) {
  json checks = json::array();
  bool all_ok = true;
  auto record = [&](const std::string& name, double value, double expected, double tol) {
    const bool ok = std::abs(value - expected) <= tol;
    all_ok = all_ok && ok;
    checks.push_back({{"check", name},
                      {"value", value},
                      {"expected", expected},
                      {"tolerance", tol},
                      {"pass", ok}});
  };

  const auto ctx = make_detector_context();
  const auto& w = ctx.windows();
  for (const auto& win : w) {
    record("dc_gain/" + win.name, win.coeffs.sum(), win.length(), 1e-9);
  }
  record("snr_loss/rectangle", w[0].snr_loss_db, 0.0, 1e-12);

  const auto& band = ctx.hyp.common_band;
  // trace(R) = N (theta2 - theta1) / 2pi = band width in bins; R is PSD.
  record("band_trace", band.matrix.trace().real(), band.band_bins.width(), 1e-9);
  record("band_psd", std::min(0.0, band.eig_values.minCoeff()), 0.0, 1e-9);

  // Noise-only, rectangle, bin 0: |w^H r|^2 ~ Exp(N) so the 1e-2 threshold is N ln 100.
  Scenario h0;
  h0.include_signal = false;
  h0.seed = seed;
  const auto cal = calibrate_batch({Policy::fixed(0)}, ctx, h0, 0, 1e-2, trials).front();
  const double n = w[0].length();
  record("threshold/noise_only_rectangle", cal.threshold / (n * std::log(100.0)), 1.0, 0.1);

  // Rayleigh target, no jammer: Pd = Pfa^(1/(1+SNR*N)).
  Scenario h1;
  h1.seed = derive_seed(seed, 1);
  const auto batch = run_batch({Policy::fixed(0)}, ctx, h1, 0, trials);
  const auto est = summarize(batch.statistic[0], batch.selection_count[0], cal.threshold);
  const double pd_law = analytic_pd(1e-2, n);
  record("pd/rayleigh_rectangle", est.pd, pd_law, 4.0 * std::sqrt(pd_law * (1 - pd_law) / trials) + 0.01);

  std::cout << json{{"checks", checks}, {"pass", all_ok}}.dump(2) << '\n';
  if (!all_ok) {
    print_error("numerical_failure", "one or more self-checks failed");
    return 3;
  }
  return 0;
}

int cmd_trace(const std::string& preset, double jnr_db, std::uint64_t seed, std::uint64_t first,
              std::uint64_t count) {
  const auto cfg = preset_config(parse_preset(preset));
  Scenario sc;
  sc.n = cfg.n;
  sc.snr_db = cfg.snr_db;
  sc.jnr_db = jnr_db;
  sc.jammer_offset_bins = cfg.jammer_offset_bins;
  sc.seed = seed;
  write_snapshot_trace(std::cout, sc, first, count);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-bin adaptive window selection for windowed-DFT detection"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a Monte Carlo experiment");
  run_cmd->add_option("--preset", run.preset, "case1 | case2 | case3 | table2 | custom");
  run_cmd->add_option("--config", run.config, "JSON experiment config");
  run_cmd->add_option("--trials", run.trials, "Monte Carlo trials per point");
  run_cmd->add_option("--seed", run.seed, "Master seed");
  run_cmd->add_option("--workers", run.workers, "Worker threads");
  run_cmd->add_option("--out", run.out, "Output file (stdout when omitted)");
  run_cmd->add_option("--format", run.format, "csv | json");
  run_cmd->add_option("--h0", run.h0, "jammer_plus_noise | noise_only");
  run_cmd->add_option("--decision-log", run.decision_log, "Per-trial selection log (CSV)");
  run_cmd->add_option("--decision-log-trials", run.decision_log_trials,
                      "Trials logged per JNR point (default 100)");

  int n = 16;
  double cheb = 120.0;
  double factor = 2.0;
  auto* win_cmd = app.add_subcommand("windows", "Dump the window catalog metrics as JSON");
  win_cmd->add_option("--n", n, "Window length");
  win_cmd->add_option("--cheb-atten", cheb, "Chebyshev sidelobe attenuation (dB)");

  auto* bnd_cmd = app.add_subcommand("boundaries", "Print pairwise decision boundaries as JSON");
  bnd_cmd->add_option("--n", n, "Window length");
  bnd_cmd->add_option("--cheb-atten", cheb, "Chebyshev sidelobe attenuation (dB)");
  bnd_cmd->add_option("--disabling-factor", factor, "Window disabling factor");

  std::uint64_t vtrials = 20000;
  std::uint64_t vseed = 1;
  auto* val_cmd = app.add_subcommand("validate", "Run the analytic-oracle self-checks");
  val_cmd->add_option("--trials", vtrials, "Trials for the Monte Carlo checks");
  val_cmd->add_option("--seed", vseed, "Seed");

  std::string tpreset = "case1";
  double tjnr = 20.0;
  std::uint64_t tseed = 1, tfirst = 0, tcount = 10;
  auto* trace_cmd = app.add_subcommand("trace", "Dump raw snapshots as CSV for inspection");
  trace_cmd->add_option("--preset", tpreset, "Geometry preset");
  trace_cmd->add_option("--jnr", tjnr, "JNR (dB)");
  trace_cmd->add_option("--seed", tseed, "Seed");
  trace_cmd->add_option("--first", tfirst, "First trial");
  trace_cmd->add_option("--count", tcount, "Number of trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("invalid_argument", e.what());
    return 2;
  }

  try {
    if (*run_cmd) return cmd_run(run, *run_cmd);
    if (*win_cmd) return cmd_windows(n, cheb);
    if (*bnd_cmd) return cmd_boundaries(n, cheb, factor);
    if (*val_cmd) return cmd_validate(vtrials, vseed);
    if (*trace_cmd) return cmd_trace(tpreset, tjnr, tseed, tfirst, tcount);
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
