#include "winsel/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#ifndef WINSEL_VERSION
#define WINSEL_VERSION "dev"
#endif

namespace winsel {

using detail::require;
using nlohmann::json;

namespace {

constexpr std::uint64_t kH0Stream = 0;
constexpr std::uint64_t kH1Stream = 2;
constexpr std::uint64_t kTable2Stream = 7;

// JSON has no infinities; they travel as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw Error(ErrorCode::invalid_config, "expected a number, got '" + s + "'");
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return number_from(j);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end != s.c_str() && *end == '\0', ErrorCode::invalid_config,
          "csv: malformed number '" + s + "'");
  return v;
}

std::string null_convention_name(NullConvention c) {
  return c == NullConvention::noise_only ? "noise_only" : "jammer_plus_noise";
}

NullConvention parse_null_convention(const std::string& s) {
  if (s == "noise_only") return NullConvention::noise_only;
  if (s == "jammer_plus_noise") return NullConvention::jammer_plus_noise;
  throw Error(ErrorCode::invalid_config, "unknown h0_convention '" + s + "'");
}

DetectorContext context_for(const ExperimentConfig& cfg) {
  HypothesisOptions opts;
  opts.hyp_jnr_db = cfg.hyp_jnr_db;
  return make_detector_context(cfg.n, cfg.chebyshev_atten_db, cfg.disabling_factor, opts);
}

std::vector<Policy> parse_policies(const ExperimentConfig& cfg, const DetectorContext& ctx) {
  std::vector<Policy> out;
  for (const auto& name : cfg.policies) out.push_back(parse_policy(name, ctx.windows()));
  return out;
}

std::vector<std::string> window_names(const DetectorContext& ctx) {
  std::vector<std::string> names;
  for (const auto& w : ctx.windows()) names.push_back(w.name);
  return names;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string library_version() { return WINSEL_VERSION; }

std::string to_string(Preset p) {
  switch (p) {
    case Preset::case1: return "case1";
    case Preset::case2: return "case2";
    case Preset::case3: return "case3";
    case Preset::table2: return "table2";
    case Preset::custom: return "custom";
  }
  return "custom";
}

Preset parse_preset(const std::string& s) {
  for (auto p : {Preset::case1, Preset::case2, Preset::case3, Preset::table2, Preset::custom}) {
    if (to_string(p) == s) return p;
  }
  throw Error(ErrorCode::invalid_config, "invalid preset '" + s + "'");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw Error(ErrorCode::invalid_config, "invalid output format '" + s + "'");
}

std::vector<double> default_jnr_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 36; ++i) g.push_back(-10.0 + 2.5 * i);
  return g;
}

ExperimentConfig preset_config(Preset preset) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  cfg.jnr_grid_db = default_jnr_grid();
  cfg.policies = {"fixed:rectangle", "fixed:hamming", "fixed:chebyshev120",
                  "multi_apodization", "proposed_exact", "proposed_simple"};
  switch (preset) {
    case Preset::case1:
    case Preset::custom:
      cfg.jammer_offset_bins = {4.0, 6.0};
      break;
    case Preset::case2:
      cfg.jammer_offset_bins = {1.5, 3.0};
      break;
    case Preset::case3:
      cfg.jammer_offset_bins = {2.35, 2.45};
      break;
    case Preset::table2:
      cfg.trials = 10000;
      cfg.policies = {"proposed_simple"};
      break;
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_config, m); };
  if (cfg.n < 4) bad("n must be >= 4");
  if (!(cfg.pfa > 0.0 && cfg.pfa < 1.0)) bad("pfa must lie in (0, 1)");
  if (cfg.trials < 1000) bad("trials must be >= 1000");
  if (cfg.workers < 1) bad("workers must be >= 1");
  if (cfg.bin < 0 || cfg.bin >= cfg.n) bad("bin must lie in [0, n)");
  if (cfg.policies.empty()) bad("at least one policy is required");
  if (!(cfg.disabling_factor > 1.0)) bad("disabling_factor must exceed 1");
  if (cfg.decision_log_trials > 0 && cfg.decision_log_path.empty()) {
    bad("decision_log_trials set without decision_log_path");
  }
  if (cfg.preset == Preset::table2) {
    if (cfg.table2_snr2_db.empty()) bad("table2_snr2_db must not be empty");
    return;
  }
  if (cfg.jnr_grid_db.empty()) bad("jnr_grid_db must not be empty");
  for (std::size_t i = 1; i < cfg.jnr_grid_db.size(); ++i) {
    if (!(cfg.jnr_grid_db[i] > cfg.jnr_grid_db[i - 1])) bad("jnr_grid_db must be ascending");
  }
  if (static_cast<double>(cfg.trials) < 100.0 / cfg.pfa) {
    bad("trials must be >= 100/pfa for threshold calibration");
  }
  const auto& off = cfg.jammer_offset_bins;
  if (!(off.lo >= 0.0 && off.lo <= off.hi && off.hi < cfg.n)) {
    bad("jammer_offset_bins must satisfy 0 <= a <= b < n");
  }
}

json to_json(const ExperimentConfig& cfg) {
  json grid = json::array();
  for (double v : cfg.jnr_grid_db) grid.push_back(number(v));
  json j = {
      {"preset", to_string(cfg.preset)},
      {"n", cfg.n},
      {"snr_db", number(cfg.snr_db)},
      {"pfa", cfg.pfa},
      {"bin", cfg.bin},
      {"jammer_offset_bins", {cfg.jammer_offset_bins.lo, cfg.jammer_offset_bins.hi}},
      {"jnr_grid_db", grid},
      {"policies", cfg.policies},
      {"trials", cfg.trials},
      {"seed", cfg.seed},
      {"workers", cfg.workers},
      {"output_path", cfg.output_path},
      {"output_format", to_string(cfg.output_format)},
      {"h0_convention", null_convention_name(cfg.h0_convention)},
      {"chebyshev_atten_db", cfg.chebyshev_atten_db},
      {"disabling_factor", cfg.disabling_factor},
      {"hyp_jnr_db", cfg.hyp_jnr_db ? json(*cfg.hyp_jnr_db) : json(nullptr)},
      {"table2_snr2_db", cfg.table2_snr2_db},
      {"table2_tone1_bin", cfg.table2_tone1_bin},
      {"table2_tone2_bin", cfg.table2_tone2_bin},
      {"decision_log_trials", cfg.decision_log_trials},
      {"decision_log_path", cfg.decision_log_path},
  };
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    require(j.is_object(), ErrorCode::invalid_config, "config must be a JSON object");
    const Preset preset = parse_preset(j.value("preset", std::string("custom")));
    ExperimentConfig cfg = preset_config(preset);
    for (const auto& [key, v] : j.items()) {
      if (key == "preset") continue;
      else if (key == "n") cfg.n = v.get<int>();
      else if (key == "snr_db") cfg.snr_db = number_from(v);
      else if (key == "pfa") cfg.pfa = v.get<double>();
      else if (key == "bin") cfg.bin = v.get<int>();
      else if (key == "jammer_offset_bins") {
        require(v.is_array() && v.size() == 2, ErrorCode::invalid_config,
                "jammer_offset_bins must be [a, b]");
        cfg.jammer_offset_bins = {v[0].get<double>(), v[1].get<double>()};
      } else if (key == "jnr_grid_db") {
        cfg.jnr_grid_db.clear();
        for (const auto& x : v) cfg.jnr_grid_db.push_back(number_from(x));
      } else if (key == "policies") cfg.policies = v.get<std::vector<std::string>>();
      else if (key == "trials") cfg.trials = v.get<std::uint64_t>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "workers") cfg.workers = v.get<int>();
      else if (key == "output_path") cfg.output_path = v.get<std::string>();
      else if (key == "output_format") cfg.output_format = parse_format(v.get<std::string>());
      else if (key == "h0_convention") cfg.h0_convention = parse_null_convention(v.get<std::string>());
      else if (key == "chebyshev_atten_db") cfg.chebyshev_atten_db = v.get<double>();
      else if (key == "disabling_factor") cfg.disabling_factor = v.get<double>();
      else if (key == "hyp_jnr_db") {
        if (v.is_null()) cfg.hyp_jnr_db.reset();
        else cfg.hyp_jnr_db = v.get<std::vector<double>>();
      } else if (key == "table2_snr2_db") cfg.table2_snr2_db = v.get<std::vector<double>>();
      else if (key == "table2_tone1_bin") cfg.table2_tone1_bin = v.get<double>();
      else if (key == "table2_tone2_bin") cfg.table2_tone2_bin = v.get<double>();
      else if (key == "decision_log_trials") cfg.decision_log_trials = v.get<std::uint64_t>();
      else if (key == "decision_log_path") cfg.decision_log_path = v.get<std::string>();
      else throw Error(ErrorCode::invalid_config, "unknown config key '" + key + "'");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io_failure, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, "config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

ExperimentResult run_case(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const DetectorContext ctx = context_for(cfg);
  const auto policies = parse_policies(cfg, ctx);

  std::ofstream log;
  if (cfg.decision_log_trials > 0) {
    log.open(cfg.decision_log_path);
    require(static_cast<bool>(log), ErrorCode::io_failure,
            "cannot open decision log '" + cfg.decision_log_path + "'");
    log << "label,jnr_db,trial,trial_seed,bin";
    for (int k = 1; k < ctx.hyp.size(); ++k) log << ",d" << k << "_db";
    log << ",k_max,k_select\n";
  }

  ExperimentResult res;
  res.config = cfg;
  res.window_names = window_names(ctx);
  res.version = library_version();

  for (std::size_t i = 0; i < cfg.jnr_grid_db.size(); ++i) {
    Scenario base;
    base.n = cfg.n;
    base.snr_db = cfg.snr_db;
    base.jnr_db = cfg.jnr_grid_db[i];
    base.signal_bin = cfg.bin;
    base.jammer_offset_bins = cfg.jammer_offset_bins;
    base.include_signal = true;

    Scenario h0 = null_scenario(base, cfg.h0_convention);
    h0.seed = derive_seed(cfg.seed, i, kH0Stream);
    const auto cal = calibrate_batch(policies, ctx, h0, cfg.bin, cfg.pfa, cfg.trials, cfg.workers);

    Scenario h1 = base;
    h1.seed = derive_seed(cfg.seed, i, kH1Stream);
    const auto batch = run_batch(policies, ctx, h1, cfg.bin, cfg.trials, cfg.workers);

    for (std::size_t p = 0; p < policies.size(); ++p) {
      const auto est = summarize(batch.statistic[p], batch.selection_count[p], cal[p].threshold);
      ResultRow row;
      row.label = to_string(cfg.preset);
      row.jnr_db = cfg.jnr_grid_db[i];
      row.bin = cfg.bin;
      row.policy = policy_name(policies[p], ctx.windows());
      row.pd = est.pd;
      row.stderr_ = est.stderr_;
      row.threshold = cal[p].threshold;
      row.heldout_pfa = cal[p].heldout_pfa;
      row.trials = cfg.trials;
      row.selection_probs = est.selection_freq;
      row.seed = cfg.seed;
      res.rows.push_back(std::move(row));
    }

    if (log.is_open()) {
      Snapshot snap;
      const auto n_log = std::min(cfg.decision_log_trials, cfg.trials);
      for (std::uint64_t t = 0; t < n_log; ++t) {
        draw_snapshot_into(h1, t, snap);
        const auto sel = select_simple_detail(snap.r, ctx.hyp, ctx.bounds, cfg.bin);
        log << to_string(cfg.preset) << ',' << fmt_double(base.jnr_db) << ',' << t << ','
            << derive_seed(h1.seed, t) << ',' << cfg.bin;
        for (int k = 1; k < ctx.hyp.size(); ++k) {
          log << ',' << fmt_double(10.0 * std::log10(sel.band_power[k]));
        }
        log << ',' << sel.k_max << ',' << sel.k_select << '\n';
      }
    }
  }
  require(!log.is_open() || static_cast<bool>(log), ErrorCode::io_failure,
          "decision log write failed");
  res.wall_time_s = seconds_since(t0);
  return res;
}

ExperimentResult run_table2(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const DetectorContext ctx = context_for(cfg);
  const auto policies = parse_policies(cfg, ctx);

  ExperimentResult res;
  res.config = cfg;
  res.window_names = window_names(ctx);
  res.version = library_version();

  const double separation =
      std::fmod(cfg.table2_tone2_bin - cfg.table2_tone1_bin + cfg.n, static_cast<double>(cfg.n));
  for (std::size_t ci = 0; ci < cfg.table2_snr2_db.size(); ++ci) {
    // The second tone plays the jammer role: same Rayleigh model, fixed frequency.
    Scenario sc;
    sc.n = cfg.n;
    sc.snr_db = cfg.snr_db;
    sc.jnr_db = cfg.table2_snr2_db[ci];
    sc.signal_bin = cfg.table2_tone1_bin;
    sc.jammer_offset_bins = {separation, separation};
    sc.include_signal = true;
    sc.seed = derive_seed(cfg.seed, ci, kTable2Stream);
    const std::string label(1, static_cast<char>('A' + ci % 26));

    for (int bin = 0; bin < cfg.n; ++bin) {
      const auto batch = run_batch(policies, ctx, sc, bin, cfg.trials, cfg.workers);
      for (std::size_t p = 0; p < policies.size(); ++p) {
        ResultRow row;
        row.label = label;
        row.jnr_db = cfg.table2_snr2_db[ci];
        row.bin = bin;
        row.policy = policy_name(policies[p], ctx.windows());
        row.trials = cfg.trials;
        for (auto c : batch.selection_count[p]) {
          row.selection_probs.push_back(static_cast<double>(c) / static_cast<double>(cfg.trials));
        }
        row.seed = cfg.seed;
        res.rows.push_back(std::move(row));
      }
    }
  }
  res.wall_time_s = seconds_since(t0);
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  return cfg.preset == Preset::table2 ? run_table2(cfg) : run_case(cfg);
}

std::string to_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "label,jnr_db,bin,policy,pd,stderr,trials,threshold,heldout_pfa";
  for (const auto& w : result.window_names) os << ",sel_" << w;
  os << ",seed\n";
  for (const auto& r : result.rows) {
    os << r.label << ',' << fmt_double(r.jnr_db) << ',' << r.bin << ',' << r.policy << ','
       << fmt_optional(r.pd) << ',' << fmt_optional(r.stderr_) << ',' << r.trials << ','
       << fmt_optional(r.threshold) << ',' << fmt_optional(r.heldout_pfa);
    for (double p : r.selection_probs) os << ',' << fmt_double(p);
    os << ',' << r.seed << '\n';
  }
  return os.str();
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorCode::invalid_config, "csv: empty input");
  const auto header = split(line, ',');
  constexpr std::size_t kFixed = 9;
  require(header.size() >= kFixed + 1 && header.back() == "seed", ErrorCode::invalid_config,
          "csv: unexpected header");
  const std::size_t nsel = header.size() - kFixed - 1;

  auto opt = [](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
  };
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    require(f.size() == header.size(), ErrorCode::invalid_config, "csv: ragged row");
    ResultRow r;
    r.label = f[0];
    r.jnr_db = parse_double(f[1]);
    r.bin = std::stoi(f[2]);
    r.policy = f[3];
    r.pd = opt(f[4]);
    r.stderr_ = opt(f[5]);
    r.trials = std::stoull(f[6]);
    r.threshold = opt(f[7]);
    r.heldout_pfa = opt(f[8]);
    for (std::size_t k = 0; k < nsel; ++k) r.selection_probs.push_back(parse_double(f[kFixed + k]));
    r.seed = std::stoull(f.back());
    rows.push_back(std::move(r));
  }
  return rows;
}

json catalog_json(const std::vector<WindowSpec>& windows) {
  json out = json::array();
  for (const auto& w : windows) {
    out.push_back({
        {"name", w.name},
        {"n", w.length()},
        {"coeffs", std::vector<double>(w.coeffs.data(), w.coeffs.data() + w.coeffs.size())},
        {"psl_db", w.psl_db},
        {"snr_loss_db", w.snr_loss_db},
        {"stopband_bins", {w.stopband_bins.lo, w.stopband_bins.hi}},
    });
  }
  return out;
}

json boundaries_json(const DetectorContext& ctx) {
  json out = json::array();
  const auto& w = ctx.windows();
  for (std::size_t k = 1; k < ctx.bounds.bounds_linear.size(); ++k) {
    const auto& band = ctx.hyp.per_window_band[k]->band_bins;
    const double lin = ctx.bounds.bounds_linear[k];
    out.push_back({{"lower", w[k - 1].name},
                   {"upper", w[k].name},
                   {"band_bins", {band.lo, band.hi}},
                   {"jnr_linear", lin},
                   {"jnr_db", 10.0 * std::log10(lin)}});
  }
  return out;
}

json to_json(const ExperimentResult& result, const DetectorContext* ctx) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({
        {"label", r.label},
        {"jnr_db", number(r.jnr_db)},
        {"bin", r.bin},
        {"policy", r.policy},
        {"pd", optional_number(r.pd)},
        {"stderr", optional_number(r.stderr_)},
        {"trials", r.trials},
        {"threshold", optional_number(r.threshold)},
        {"heldout_pfa", optional_number(r.heldout_pfa)},
        {"selection_probs", r.selection_probs},
        {"seed", r.seed},
    });
  }
  json meta = {{"version", result.version},
               {"wall_time_s", result.wall_time_s},
               {"seed", result.config.seed},
               {"config", to_json(result.config)},
               {"windows", result.window_names}};
  if (ctx) {
    meta["catalog"] = catalog_json(ctx->windows());
    meta["boundaries"] = boundaries_json(*ctx);
  }
  return {{"metadata", meta}, {"rows", rows}};
}

ExperimentResult result_from_json(const json& j) {
  try {
    ExperimentResult res;
    const auto& meta = j.at("metadata");
    res.version = meta.at("version").get<std::string>();
    res.wall_time_s = meta.at("wall_time_s").get<double>();
    res.config = config_from_json(meta.at("config"));
    res.window_names = meta.at("windows").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      ResultRow row;
      row.label = r.at("label").get<std::string>();
      row.jnr_db = number_from(r.at("jnr_db"));
      row.bin = r.at("bin").get<int>();
      row.policy = r.at("policy").get<std::string>();
      row.pd = optional_from(r.at("pd"));
      row.stderr_ = optional_from(r.at("stderr"));
      row.trials = r.at("trials").get<std::uint64_t>();
      row.threshold = optional_from(r.at("threshold"));
      row.heldout_pfa = optional_from(r.at("heldout_pfa"));
      row.selection_probs = r.at("selection_probs").get<std::vector<double>>();
      row.seed = r.at("seed").get<std::uint64_t>();
      res.rows.push_back(std::move(row));
    }
    return res;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("result json: ") + e.what());
  }
}

void emit(const ExperimentResult& result, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io_failure, "cannot open output '" + path + "'");
  if (format == OutputFormat::csv) {
    out << to_csv(result);
  } else {
    const DetectorContext ctx = context_for(result.config);
    out << to_json(result, &ctx).dump(2) << '\n';
  }
  out.flush();
  require(static_cast<bool>(out), ErrorCode::io_failure, "write to '" + path + "' failed");
}

}  // namespace winsel
