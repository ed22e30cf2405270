#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfseries/errors.hpp"
#include "cfseries/series.hpp"

namespace cfs {

// Estimate of ||c||_{l_infty,M} = sup_eta |(c,eta)| / (M^{|eta|} |eta|!).
// The sup is over an infinite set, so every result states how it was
// obtained:
//   exact           - finite support, sup over the whole (finite) support;
//   lower_bound     - sup over X^{<=J} only, the tail is unexamined;
//   certified_exact - scanned sup, plus a growth certificate proving the
//                     tail cannot exceed it.
struct NormEstimate {
  enum class Status { exact, lower_bound, certified_exact };

  double value = 0.0;
  std::optional<Word> attained_at;
  int horizon = 0;
  Status status = Status::exact;
};

inline const char* to_string(NormEstimate::Status s) {
  switch (s) {
    case NormEstimate::Status::exact: return "exact";
    case NormEstimate::Status::lower_bound: return "lower_bound";
    default: return "certified_exact";
  }
}

namespace detail {

inline double factorial_d(int k) { return std::tgamma(k + 1.0); }

// Tail levels of the certificate-implied norm bound K (Mc/M)^k (k!)^{s-1}
// have ratio (Mc/M) (k+1)^{s-1}; once s <= 1 and that ratio is <= 1 at the
// first unscanned level, the whole tail is dominated by its first term.
inline bool certificate_caps_tail(const GrowthCertificate& cert, double M,
                                  int horizon, double scanned_sup) {
  if (cert.s > 1.0) return false;
  const double r = cert.M / M;
  const int k = horizon + 1;
  if (r * std::pow(k + 1.0, cert.s - 1.0) > 1.0) return false;
  const double level_bound =
      cert.K * std::pow(r, k) * std::pow(factorial_d(k), cert.s - 1.0);
  return level_bound <= scanned_sup;
}

}  // namespace detail

inline NormEstimate ell_infty_M_norm(const Series& c, double M, int horizon) {
  if (M <= 0.0) throw NumericError("ell_infty_M_norm requires M > 0");
  NormEstimate est;
  est.horizon = horizon;
  if (c.is_finite_support()) {
    est.status = NormEstimate::Status::exact;
    for (const auto& [w, coeff] : c.terms()) {
      const double v = abs_max(coeff) / (std::pow(M, w.length()) *
                                         detail::factorial_d(w.length()));
      if (v > est.value) {
        est.value = v;
        est.attained_at = w;
      }
    }
    return est;
  }
  if (horizon > c.horizon())
    throw HorizonError("norm scan horizon exceeds series horizon");
  est.status = NormEstimate::Status::lower_bound;
  double denom = 1.0;  // M^k k!
  for (int k = 0; k <= horizon; ++k) {
    if (k > 0) denom *= M * k;
    for (const auto& w : c.support_level(k)) {
      const double v = abs_max(c.coefficient(w)) / denom;
      if (v > est.value) {
        est.value = v;
        est.attained_at = w;
      }
    }
  }
  if (c.certificate() &&
      detail::certificate_caps_tail(*c.certificate(), M, horizon, est.value))
    est.status = NormEstimate::Status::certified_exact;
  return est;
}

struct GevreyFit {
  GrowthCertificate cert;
  bool lc_range = true;  // s <= 1, i.e. inside the locally convergent class
  int levels_used = 0;
};

// Fits (K, M, s) to the per-length coefficient maxima by least squares on
//   log a_k ~ log K + k log M + s log k!,
// then rescans for the smallest K making the bound hold on X^{<=J}.
inline GevreyFit fit_growth_certificate(const Series& c, int horizon) {
  if (horizon < 4) throw NumericError("fit_growth_certificate needs J >= 4");
  if (!c.is_finite_support() && horizon > c.horizon())
    throw HorizonError("fit horizon exceeds series horizon");

  std::vector<std::pair<int, double>> levels;  // (k, max |(c,eta)|)
  for (int k = 0; k <= horizon; ++k) {
    double a = 0.0;
    for (const auto& w : c.support_level(k))
      a = std::max(a, abs_max(c.coefficient(w)));
    if (a > 0.0) levels.emplace_back(k, a);
  }
  int positive_lengths = 0;
  for (const auto& [k, a] : levels)
    if (k >= 1) ++positive_lengths;
  if (positive_lengths < 3)
    throw NumericError("fit_growth_certificate: fewer than 3 nonzero "
                       "length-levels");

  Eigen::MatrixXd A(levels.size(), 3);
  Eigen::VectorXd y(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto [k, a] = levels[i];
    A(i, 0) = 1.0;
    A(i, 1) = k;
    A(i, 2) = std::lgamma(k + 1.0);
    y(i) = std::log(a);
  }
  Eigen::Vector3d beta = A.colPivHouseholderQr().solve(y);

  GevreyFit fit;
  fit.levels_used = static_cast<int>(levels.size());
  fit.cert.s = std::max(0.0, beta(2));
  fit.cert.M = std::exp(beta(1));
  fit.lc_range = fit.cert.s <= 1.0;

  // Smallest K making the claimed bound hold on everything scanned.
  double K = 0.0;
  for (const auto& [k, a] : levels) {
    const double denom = std::pow(fit.cert.M, k) *
                         std::pow(detail::factorial_d(k), fit.cert.s);
    K = std::max(K, a / denom);
  }
  fit.cert.K = K;
  return fit;
}

// Re-checks a certificate against every queried word up to the horizon.
inline bool verify_certificate(const Series& c, const GrowthCertificate& cert,
                               int horizon) {
  const int limit =
      c.is_finite_support() ? std::min(horizon, c.max_support_length())
                            : std::min(horizon, c.horizon());
  for (int k = 0; k <= limit; ++k)
    for (const auto& w : c.support_level(k))
      if (!cert.admits(k, abs_max(c.coefficient(w)))) return false;
  return true;
}

// Verdict of a finite-sample Silva/Banach convergence probe. Never a claim
// about the true limit: `diverged` means no grid M worked at this horizon.
struct ConvergenceReport {
  enum class Mode { banach, silva, diverged };

  Mode mode = Mode::diverged;
  double M = 0.0;  // the grid M at which convergence was observed
  std::vector<double> grid;
  int horizon = 0;
  double tol = 0.0;
  // norms[g][j] = ||c_j - c||_{l_infty, grid[g]} scanned value
  std::vector<std::vector<double>> norms;
};

inline nlohmann::json convergence_report_to_json(const ConvergenceReport& r) {
  nlohmann::json j;
  j["mode"] = r.mode == ConvergenceReport::Mode::banach   ? "banach"
              : r.mode == ConvergenceReport::Mode::silva  ? "silva"
                                                          : "diverged";
  if (r.mode != ConvergenceReport::Mode::diverged) j["M"] = r.M;
  j["grid"] = r.grid;
  j["horizon"] = r.horizon;
  j["tol"] = r.tol;
  j["norm_table"] = nlohmann::json::array();
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    nlohmann::json row;
    row["M"] = r.grid[g];
    row["norms"] = r.norms[g];
    j["norm_table"].push_back(row);
  }
  return j;
}

inline std::vector<double> default_silva_grid() {
  return {1, 2, 3, 4, 5, 6, 7, 8};
}

// Convergence in the Silva sense requires one fixed M working for the whole
// sequence. The probe reports the smallest grid M at which the norm sequence
// has fallen below tol and is nonincreasing over its last three entries.
inline ConvergenceReport silva_convergence_check(
    const std::vector<Series>& sequence, const Series& limit,
    std::vector<double> M_grid, int horizon, double tol = 1e-6) {
  if (M_grid.empty()) M_grid = default_silva_grid();
  std::sort(M_grid.begin(), M_grid.end());
  ConvergenceReport report;
  report.grid = M_grid;
  report.horizon = horizon;
  report.tol = tol;
  report.norms.resize(M_grid.size());

  for (std::size_t g = 0; g < M_grid.size(); ++g) {
    for (const Series& cj : sequence) {
      Series diff = linear_combination(1.0, cj, -1.0, limit);
      report.norms[g].push_back(
          ell_infty_M_norm(diff, M_grid[g], horizon).value);
    }
  }
  for (std::size_t g = 0; g < M_grid.size(); ++g) {
    const auto& ns = report.norms[g];
    if (ns.empty() || ns.back() >= tol) continue;
    bool nonincreasing = true;
    const std::size_t from = ns.size() >= 3 ? ns.size() - 3 : 0;
    for (std::size_t j = from + 1; j < ns.size(); ++j)
      if (ns[j] > ns[j - 1]) nonincreasing = false;
    if (!nonincreasing) continue;
    report.mode = M_grid.size() == 1 ? ConvergenceReport::Mode::banach
                                     : ConvergenceReport::Mode::silva;
    report.M = M_grid[g];
    return report;
  }
  report.mode = ConvergenceReport::Mode::diverged;
  return report;
}

struct FrechetProbeEntry {
  double M = 0.0;
  NormEstimate estimate;
  // Geometric growth of per-level norm contributions over the last scanned
  // levels; a strong hint that the true norm at this M is infinite.
  bool infinite_trend = false;
};

struct FrechetProbeReport {
  std::vector<FrechetProbeEntry> entries;
  bool all_finite_up_to_horizon = true;
};

inline std::vector<double> default_frechet_grid() {
  return {1.0, 1.0 / 2, 1.0 / 3, 1.0 / 4, 1.0 / 5, 1.0 / 6, 1.0 / 7, 1.0 / 8};
}

// Advisory probe of the all-M membership condition on a finite M list.
inline FrechetProbeReport frechet_membership_probe(const Series& c,
                                                   std::vector<double> M_list,
                                                   int horizon) {
  if (M_list.empty()) M_list = default_frechet_grid();
  FrechetProbeReport report;
  for (double M : M_list) {
    FrechetProbeEntry entry;
    entry.M = M;
    entry.estimate = ell_infty_M_norm(c, M, horizon);

    // Ratio test on the scanned per-level maxima.
    std::vector<double> level_vals;
    const int limit = c.is_finite_support()
                          ? std::min(horizon, c.max_support_length())
                          : horizon;
    double denom = 1.0;
    for (int k = 0; k <= limit; ++k) {
      if (k > 0) denom *= M * k;
      double a = 0.0;
      for (const auto& w : c.support_level(k))
        a = std::max(a, abs_max(c.coefficient(w)));
      if (a > 0.0) level_vals.push_back(a / denom);
    }
    if (level_vals.size() >= 4) {
      bool growing = true;
      for (std::size_t i = level_vals.size() - 3; i < level_vals.size(); ++i)
        if (level_vals[i] <= level_vals[i - 1] * 1.000001) growing = false;
      entry.infinite_trend = growing;
    }
    if (entry.infinite_trend) report.all_finite_up_to_horizon = false;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace cfs
