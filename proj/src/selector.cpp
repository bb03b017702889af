#include "winsel/selector.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace winsel {

using detail::require;

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// w^H r with w real: sum w[n] r[n]
std::complex<double> weighted_sum(const Eigen::VectorXd& w, const CVectorRef& r) {
  return (w.cast<std::complex<double>>().transpose() * r).value();
}

}  // namespace

HypothesisSet make_hypothesis_set(std::vector<WindowSpec> windows,
                                  const HypothesisOptions& options) {
  require(!windows.empty(), ErrorCode::invalid_argument, "hypothesis set: no windows");
  const int n = windows.front().length();
  for (std::size_t k = 0; k < windows.size(); ++k) {
    require(windows[k].length() == n, ErrorCode::dimension_mismatch,
            "hypothesis set: windows have different lengths");
    if (k > 0) {
      require(windows[k].psl_db > windows[k - 1].psl_db, ErrorCode::invalid_argument,
              "hypothesis set: windows must be in strictly increasing PSL order");
    }
  }

  HypothesisSet h;
  if (options.hyp_jnr_db) {
    require(options.hyp_jnr_db->size() == windows.size(), ErrorCode::dimension_mismatch,
            "hypothesis set: one hypothesis JNR per window required");
    h.hyp_jnr_db = *options.hyp_jnr_db;
  } else {
    for (const auto& w : windows) h.hyp_jnr_db.push_back(w.psl_db / 2.0);
  }
  for (std::size_t k = 1; k < h.hyp_jnr_db.size(); ++k) {
    require(h.hyp_jnr_db[k] > h.hyp_jnr_db[k - 1], ErrorCode::invalid_argument,
            "hypothesis set: hypothesis JNRs must be strictly increasing");
  }

  h.per_window_band.resize(windows.size());
  for (std::size_t k = 1; k < windows.size(); ++k) {
    h.per_window_band[k] =
        band_covariance<double>(n, windows[k].stopband_bins, options.rank_threshold);
  }
  h.common_band = windows.size() > 1
                      ? *h.per_window_band.back()
                      : band_covariance<double>(n, windows.front().stopband_bins,
                                                options.rank_threshold);
  h.windows = std::move(windows);
  return h;
}

double boundary_jnr(const WindowSpec& w1, const WindowSpec& w2, const BandCov& band,
                    const CVectorRef& steering) {
  require(w1.length() == band.n && w2.length() == band.n && steering.size() == band.n,
          ErrorCode::dimension_mismatch, "boundary_jnr: dimension mismatch");
  const Eigen::VectorXcd c1 = w1.coeffs.cast<std::complex<double>>();
  const Eigen::VectorXcd c2 = w2.coeffs.cast<std::complex<double>>();
  const double g1 = std::norm((c1.adjoint() * steering).value());
  const double g2 = std::norm((c2.adjoint() * steering).value());
  const double q1 = (c1.adjoint() * band.matrix * c1).value().real();
  const double q2 = (c2.adjoint() * band.matrix * c2).value().real();
  const double num = g1 * w2.coeffs.squaredNorm() - g2 * w1.coeffs.squaredNorm();
  const double den = g2 * q1 - g1 * q2;
  const double jnr = num / den;
  require(std::isfinite(jnr) && jnr > 0.0, ErrorCode::degenerate_pair,
          "boundary_jnr: windows " + w1.name + " and " + w2.name +
              " are mis-ordered or spectrally indistinguishable");
  return jnr;
}

double boundary_jnr(const WindowSpec& w1, const WindowSpec& w2, const BandCov& band) {
  return boundary_jnr(w1, w2, band, Eigen::VectorXcd::Ones(band.n));
}

DecisionBoundaries decision_boundaries(const HypothesisSet& hyp, double disabling_factor) {
  require(disabling_factor > 1.0, ErrorCode::invalid_argument,
          "decision boundaries: disabling factor must exceed 1");
  DecisionBoundaries d;
  d.disabling_factor = disabling_factor;
  d.bounds_linear.push_back(0.0);
  for (int k = 1; k < hyp.size(); ++k) {
    // The pair shares the stronger window's (narrower) suppression band.
    d.bounds_linear.push_back(
        boundary_jnr(hyp.windows[k - 1], hyp.windows[k], *hyp.per_window_band[k]));
  }
  for (std::size_t k = 1; k < d.bounds_linear.size(); ++k) {
    require(d.bounds_linear[k] > d.bounds_linear[k - 1], ErrorCode::degenerate_pair,
            "decision boundaries are not ascending");
  }
  return d;
}

Eigen::VectorXcd steering_vector(int n, double bin) {
  Eigen::VectorXcd s(n);
  const double step = 2.0 * std::numbers::pi * bin / n;
  for (int i = 0; i < n; ++i) s[i] = std::polar(1.0, step * i);
  return s;
}

Eigen::VectorXcd modulate_to_dc(const CVectorRef& r, int bin) {
  const int n = static_cast<int>(r.size());
  require(bin >= 0 && bin < n, ErrorCode::invalid_argument,
          "bin index " + std::to_string(bin) + " outside [0, N)");
  Eigen::VectorXcd out = r;
  if (bin == 0) return out;
  for (int i = 0; i < n; ++i) {
    // Reduce the phase index mod N so that D_alpha is exact on the DFT grid.
    const int idx = static_cast<int>((static_cast<long long>(bin) * i) % n);
    out[i] *= std::polar(1.0, -2.0 * std::numbers::pi * idx / n);
  }
  return out;
}

std::vector<double> exact_llrs(const CVectorRef& r, const HypothesisSet& hyp) {
  const BandCov& b = hyp.common_band;
  require(r.size() == b.n, ErrorCode::dimension_mismatch, "exact_llr: dimension mismatch");
  const int nj = b.effective_rank;
  const Eigen::VectorXd proj = (b.jammer_space().adjoint() * r).cwiseAbs2();
  const double g1 = db_to_linear(hyp.hyp_jnr_db.front());

  std::vector<double> llr(hyp.size(), 0.0);
  for (int k = 1; k < hyp.size(); ++k) {
    const double gk = db_to_linear(hyp.hyp_jnr_db[k]);
    double acc = 0.0;
    for (int i = 0; i < nj; ++i) {
      const double lam = b.eig_values[i];
      const double a1 = g1 * lam + 1.0;
      const double ak = gk * lam + 1.0;
      acc += std::log(a1 / ak) + (1.0 / a1 - 1.0 / ak) * proj[i];
    }
    llr[k] = acc;
  }
  return llr;
}

double exact_llr(const CVectorRef& r, const HypothesisSet& hyp, int k) {
  require(k >= 0 && k < hyp.size(), ErrorCode::invalid_argument,
          "exact_llr: hypothesis index out of range");
  if (k == 0) return 0.0;
  return exact_llrs(r, hyp)[k];
}

int select_exact(const CVectorRef& r, const HypothesisSet& hyp, int bin) {
  const auto llr = exact_llrs(modulate_to_dc(r, bin), hyp);
  int best = 0;
  for (int k = 1; k < static_cast<int>(llr.size()); ++k) {
    if (llr[k] > llr[best]) best = k;
  }
  return best;
}

SimpleSelection select_simple_detail(const CVectorRef& r, const HypothesisSet& hyp,
                                     const DecisionBoundaries& bounds, int bin) {
  require(hyp.size() > 0, ErrorCode::invalid_argument, "select_simple: empty window set");
  require(r.size() == hyp.length(), ErrorCode::dimension_mismatch,
          "select_simple: dimension mismatch");
  require(static_cast<int>(bounds.bounds_linear.size()) == hyp.size(),
          ErrorCode::dimension_mismatch, "select_simple: boundary count mismatch");

  const int last = hyp.size() - 1;
  SimpleSelection sel;
  sel.band_power.assign(hyp.size(), 0.0);
  if (last == 0) return sel;

  const Eigen::VectorXcd x = modulate_to_dc(r, bin);
  for (int k = 1; k <= last; ++k) sel.band_power[k] = band_power(x, *hyp.per_window_band[k]);

  // Window disabling: the jammer sits in window k+1's transition band.
  sel.k_max = last;
  for (int k = 1; k < last; ++k) {
    if (sel.band_power[k] > bounds.disabling_factor * sel.band_power[k + 1]) {
      sel.k_max = k;
      break;
    }
  }

  const double d = sel.band_power[1];
  int cell = 0;
  for (int k = 1; k <= last; ++k) {
    if (bounds.bounds_linear[k] < d) cell = k;
  }
  sel.k_select = std::min(cell, sel.k_max);
  return sel;
}

int select_simple(const CVectorRef& r, const HypothesisSet& hyp,
                  const DecisionBoundaries& bounds, int bin) {
  return select_simple_detail(r, hyp, bounds, bin).k_select;
}

ApodizationPick multi_apodization(const CVectorRef& r, const std::vector<WindowSpec>& windows,
                                  int bin) {
  require(!windows.empty(), ErrorCode::invalid_argument, "multi_apodization: no windows");
  const Eigen::VectorXcd x = modulate_to_dc(r, bin);
  ApodizationPick pick{std::numeric_limits<double>::infinity(), 0};
  for (int k = 0; k < static_cast<int>(windows.size()); ++k) {
    require(windows[k].length() == x.size(), ErrorCode::dimension_mismatch,
            "multi_apodization: dimension mismatch");
    const double mag = std::abs(weighted_sum(windows[k].coeffs, x));
    if (mag < pick.magnitude) pick = {mag, k};
  }
  return pick;
}

}  // namespace winsel
