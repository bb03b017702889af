#include "winsel/simkit.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include "winsel/error.hpp"

namespace winsel {

using detail::require;

namespace {

double mean_power(double db) { return std::isinf(db) && db < 0 ? 0.0 : std::pow(10.0, db / 10.0); }

}  // namespace

void validate(const Scenario& sc) {
  require(sc.n >= 4, ErrorCode::invalid_argument, "scenario: n must be >= 4");
  require(!std::isnan(sc.snr_db) && sc.snr_db < std::numeric_limits<double>::infinity(),
          ErrorCode::invalid_argument, "scenario: snr_db must be finite or -inf");
  require(!std::isnan(sc.jnr_db) && sc.jnr_db < std::numeric_limits<double>::infinity(),
          ErrorCode::invalid_argument, "scenario: jnr_db must be finite or -inf");
  require(std::isfinite(sc.signal_bin), ErrorCode::invalid_argument,
          "scenario: signal_bin must be finite");
  const auto& off = sc.jammer_offset_bins;
  require(off.lo >= 0.0 && off.lo <= off.hi && off.hi < sc.n, ErrorCode::invalid_argument,
          "scenario: jammer offset interval must satisfy 0 <= a <= b < n");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

std::complex<double> TrialRng::complex_normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log(u1));  // sqrt(-2 ln u) / sqrt(2)
  return std::polar(radius, 2.0 * std::numbers::pi * u2);
}

void draw_snapshot_into(const Scenario& sc, std::uint64_t trial, Snapshot& out) {
  TrialRng rng(sc.seed, trial);
  const double two_pi = 2.0 * std::numbers::pi;

  // Fixed draw order keeps H0 and H1 streams aligned.
  auto& t = out.truth;
  t.gamma_s = rng.exponential(mean_power(sc.snr_db));
  t.phi_s = rng.uniform(0.0, two_pi);
  t.gamma_j = rng.exponential(mean_power(sc.jnr_db));
  t.phi_j = rng.uniform(0.0, two_pi);
  t.jammer_bin = sc.signal_bin + rng.uniform(sc.jammer_offset_bins.lo, sc.jammer_offset_bins.hi);
  if (!sc.include_signal) t.gamma_s = 0.0;

  const double amp_s = std::sqrt(t.gamma_s);
  const double amp_j = std::sqrt(t.gamma_j);
  const double w_s = two_pi * sc.signal_bin / sc.n;
  const double w_j = two_pi * t.jammer_bin / sc.n;

  out.r.resize(sc.n);
  for (int i = 0; i < sc.n; ++i) {
    std::complex<double> v = rng.complex_normal();
    if (amp_s > 0.0) v += std::polar(amp_s, w_s * i + t.phi_s);
    if (amp_j > 0.0) v += std::polar(amp_j, w_j * i + t.phi_j);
    out.r[i] = v;
  }
}

Snapshot draw_snapshot(const Scenario& sc, std::uint64_t trial) {
  validate(sc);
  Snapshot s;
  draw_snapshot_into(sc, trial, s);
  return s;
}

void write_snapshot_trace(std::ostream& os, const Scenario& sc, std::uint64_t first_trial,
                          std::uint64_t count) {
  validate(sc);
  os << "trial,gamma_s,gamma_j,phi_s,phi_j,jammer_bin";
  for (int i = 0; i < sc.n; ++i) os << ",re" << i << ",im" << i;
  os << '\n';
  const auto old_precision = os.precision(17);
  Snapshot s;
  for (std::uint64_t k = 0; k < count; ++k) {
    draw_snapshot_into(sc, first_trial + k, s);
    os << first_trial + k << ',' << s.truth.gamma_s << ',' << s.truth.gamma_j << ','
       << s.truth.phi_s << ',' << s.truth.phi_j << ',' << s.truth.jammer_bin;
    for (int i = 0; i < sc.n; ++i) os << ',' << s.r[i].real() << ',' << s.r[i].imag();
    os << '\n';
  }
  os.precision(old_precision);
  if (!os) throw Error(ErrorCode::io_failure, "snapshot trace: write failed");
}

}  // namespace winsel
