#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "cfseries/errors.hpp"
#include "cfseries/series.hpp"
#include "cfseries/signal.hpp"
#include "cfseries/topology.hpp"

namespace cfs {

namespace detail {

// Compensated (double-double) scalar: value = hi + lo with |lo| <= ulp(hi)/2.
// The iterated-integral recursion loses relative accuracy at depth: an error
// committed at level j is re-integrated against u, which decays like
// ||u||_1^{k-j}/(k-j)! instead of tracking the in-phase decay of E_eta
// itself, so by level ~50 plain doubles can be wrong by many orders of
// magnitude relative to E_eta. Since the coefficients multiplying deep
// integrals grow factorially, that noise surfaces at O(1) in the output.
// Carrying the recursion in double-double pushes the noise floor from
// ~1e-16 to ~1e-32 of the running magnitude, which keeps certified
// evaluations accurate through N = 50 and beyond.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(const DD& a, const DD& b) {
  DD s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD dd_mul_d(const DD& a, double b) {
  DD p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

}  // namespace detail

// Iterated integrals E_eta[u] on the signal grid, with suffix memoization:
// E_{x_i etabar} = running_integral(u_i * E_{etabar}), E_empty = 1. The
// leftmost letter integrates last, so all words sharing a suffix share the
// inner integrals. The recursion is carried in double-double precision (see
// detail::DD) and rounded to double on read.
class IteratedIntegralCache {
 public:
  explicit IteratedIntegralCache(const Signal& u) : u_(u) {}

  const std::vector<double>& get(const Word& eta) {
    auto it = rounded_.find(eta);
    if (it != rounded_.end()) return it->second;
    const std::vector<detail::DD>& exact = get_dd(eta);
    std::vector<double> value(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i)
      value[i] = exact[i].hi + exact[i].lo;
    return rounded_.emplace(eta, std::move(value)).first->second;
  }

  const Signal& signal() const { return u_; }

 private:
  const std::vector<detail::DD>& get_dd(const Word& eta) {
    auto it = cache_.find(eta);
    if (it != cache_.end()) return it->second;
    const int n = u_.grid_size();
    std::vector<detail::DD> value(n);
    if (eta.is_empty()) {
      for (auto& v : value) v = {1.0, 0.0};
    } else {
      const std::vector<detail::DD>& inner = get_dd(eta.tail());
      const std::vector<double> channel = u_.letter_channel(eta.front());
      const double half_dt = 0.5 * u_.dt();
      detail::DD acc{0.0, 0.0};
      detail::DD prev = detail::dd_mul_d(inner[0], channel[0]);
      value[0] = acc;
      for (int i = 1; i < n; ++i) {
        const detail::DD cur = detail::dd_mul_d(inner[i], channel[i]);
        acc = detail::dd_add(acc,
                             detail::dd_mul_d(detail::dd_add(prev, cur),
                                              half_dt));
        value[i] = acc;
        prev = cur;
      }
    }
    return cache_.emplace(eta, std::move(value)).first->second;
  }

  const Signal& u_;
  std::map<Word, std::vector<detail::DD>, LengthLexLess> cache_;
  std::map<Word, std::vector<double>, LengthLexLess> rounded_;
};

inline std::vector<double> iterated_integral(const Word& eta, const Signal& u) {
  IteratedIntegralCache cache(u);
  return cache.get(eta);
}

// max{||u||_1, T} < 1/(M(m+1)). `m` counts the letters beyond the first one
// actually in play; for a one-letter alphabet pass m = 0.
struct RadiusCheck {
  double u_l1 = 0.0;
  double T = 0.0;
  double threshold = 0.0;
  bool ok = false;
};

inline RadiusCheck radius_check(const GrowthCertificate& cert, const Signal& u,
                                int m = -1) {
  if (cert.s > 1.0)
    throw NumericError("radius_check needs a certificate with s <= 1");
  if (m < 0) m = u.num_channels();
  RadiusCheck rc;
  rc.u_l1 = u.num_channels() > 0 ? lp_norm(u, 1.0).value : 0.0;
  rc.T = u.duration();
  rc.threshold = 1.0 / (cert.M * (m + 1));
  rc.ok = std::max(rc.u_l1, rc.T) < rc.threshold;
  return rc;
}

struct EvalConstants {
  double K = 0.0;
  double M = 0.0;
  double R = 0.0;
  int m = 0;
  double T = 0.0;
};

struct EvalResult {
  Signal y;  // ell output channels on the input grid
  int N = 0;
  double tail_bound = kInf;
  bool radius_ok = false;
  EvalConstants constants;
};

// Truncated Chen-Fliess evaluation y = sum_{|eta|<=N} (c,eta) E_eta[u].
// With a certificate of Gevrey order s <= 1 and rho = M R (m+1) < 1, the
// discarded tail is uniformly bounded by K rho^{N+1} / (1 - rho); otherwise
// the evaluation is honest but uncertified (tail_bound = inf).
inline EvalResult evaluate_truncated(const Series& c, const Signal& u, int N,
                                     int effective_m = -1,
                                     std::uint64_t word_cap = kDefaultWordCap) {
  if (!c.is_finite_support() && N > c.horizon())
    throw HorizonError("truncation length exceeds series horizon");
  const int ell = c.ell();
  const int n = u.grid_size();
  std::vector<std::vector<double>> y(ell, std::vector<double>(n, 0.0));

  IteratedIntegralCache cache(u);
  std::uint64_t visited = 0;
  for (int k = 0; k <= N; ++k) {
    for (const auto& w : c.support_level(k, word_cap)) {
      if (++visited > word_cap)
        throw ResourceCapError("evaluation visited more than " +
                               std::to_string(word_cap) + " words");
      const Coeff coeff = c.coefficient(w);
      if (is_zero_coeff(coeff)) continue;
      const std::vector<double>& E = cache.get(w);
      for (int j = 0; j < ell; ++j) {
        const double cj = coeff[j];
        if (cj == 0.0) continue;
        for (int i = 0; i < n; ++i) y[j][i] += cj * E[i];
      }
    }
  }

  EvalResult result;
  result.y = Signal(u.t0(), u.dt(), std::move(y));
  result.N = N;
  const int m = effective_m >= 0 ? effective_m : u.num_channels();
  result.constants.m = m;
  result.constants.T = u.duration();
  result.constants.R =
      std::max(u.num_channels() > 0 ? lp_norm(u, 1.0).value : 0.0,
               u.duration());
  if (c.is_finite_support() && c.max_support_length() <= N) {
    // Nothing was discarded: the tail is empty regardless of any radius.
    result.tail_bound = 0.0;
    result.radius_ok = true;
  } else if (c.certificate() && c.certificate()->s <= 1.0) {
    const GrowthCertificate& cert = *c.certificate();
    result.constants.K = cert.K;
    result.constants.M = cert.M;
    const double rho = cert.M * result.constants.R * (m + 1);
    if (rho < 1.0) {
      result.radius_ok = true;
      result.tail_bound = cert.K * std::pow(rho, N + 1) / (1.0 - rho);
    }
  }
  return result;
}

// Smallest N whose certified tail bound is below tol; empty when the radius
// condition fails.
inline std::optional<int> choose_truncation(const GrowthCertificate& cert,
                                            const Signal& u, int effective_m,
                                            double tol = 1e-8,
                                            int max_N = 512) {
  if (cert.s > 1.0) return std::nullopt;
  const double R =
      std::max(u.num_channels() > 0 ? lp_norm(u, 1.0).value : 0.0,
               u.duration());
  const double rho = cert.M * R * (effective_m + 1);
  if (rho >= 1.0) return std::nullopt;
  for (int N = 0; N <= max_N; ++N)
    if (cert.K * std::pow(rho, N + 1) / (1.0 - rho) < tol) return N;
  return std::nullopt;
}

// Checks the two iterated-integral bounds for a given word:
//   |E_eta[u]| <= E_eta[ubar]            pointwise (ubar_j = |u_j|), and
//   |E_p[u]|   <= prod_j U_j^{r_j}/r_j!  pointwise, with the global form
//                 R^k / prod_j r_j!      at R = max{||u||_1, T},
// where p is the shuffle power x_0^{r_0} sh ... sh x_m^{r_m} built from
// eta's letter multiplicities.
struct Lemma2Check {
  bool ok = false;
  double margin_abs = 0.0;      // min_t (E_eta[ubar] - |E_eta[u]|)
  double margin_product = 0.0;  // min_t (prod U_j^{r_j}/r_j! - |E_p[u]|)
  double margin_global = 0.0;   // R^k/prod r_j! - max_t |E_p[u]|
};

inline Lemma2Check lemma2_bound_check(const Word& eta, const Signal& u) {
  const int n = u.grid_size();
  const int m = u.num_channels();

  Signal ubar = u;
  {
    std::vector<std::vector<double>> abs_ch;
    for (int i = 1; i <= m; ++i) {
      std::vector<double> ch = u.input_channel(i);
      for (double& v : ch) v = std::abs(v);
      abs_ch.push_back(std::move(ch));
    }
    if (m > 0) ubar = Signal(u.t0(), u.dt(), std::move(abs_ch));
  }

  Lemma2Check out;
  const std::vector<double> E = iterated_integral(eta, u);
  const std::vector<double> Ebar = iterated_integral(eta, ubar);
  out.margin_abs = kInf;
  for (int i = 0; i < n; ++i)
    out.margin_abs = std::min(out.margin_abs, Ebar[i] - std::abs(E[i]));

  // Letter multiplicities r_0..r_m of eta.
  std::vector<int> r(m + 1, 0);
  for (int letter : eta.letters) {
    if (letter > m) throw FormatError("word letter beyond signal channels");
    ++r[letter];
  }
  const Polynomial<double> p =
      multinomial_shuffle_expansion<double>(Alphabet{m}, r);

  IteratedIntegralCache cache(u);
  std::vector<double> Ep(n, 0.0);
  for (const auto& [w, coeff] : p.terms()) {
    const std::vector<double>& Ew = cache.get(w);
    for (int i = 0; i < n; ++i) Ep[i] += coeff * Ew[i];
  }

  // U_j(t) = int_0^t |u_j|; U_0(t) = t - t0.
  std::vector<std::vector<double>> U(m + 1);
  for (int j = 0; j <= m; ++j) {
    std::vector<double> ch = u.letter_channel(j);
    for (double& v : ch) v = std::abs(v);
    U[j] = running_integral(ch, u.dt());
  }
  double r_factorial_product = 1.0;
  for (int j = 0; j <= m; ++j)
    r_factorial_product *= std::tgamma(r[j] + 1.0);

  out.margin_product = kInf;
  double Ep_max = 0.0;
  for (int i = 0; i < n; ++i) {
    double bound = 1.0;
    for (int j = 0; j <= m; ++j) bound *= std::pow(U[j][i], r[j]);
    bound /= r_factorial_product;
    out.margin_product = std::min(out.margin_product, bound - std::abs(Ep[i]));
    Ep_max = std::max(Ep_max, std::abs(Ep[i]));
  }
  const double R =
      std::max(m > 0 ? lp_norm(u, 1.0).value : 0.0, u.duration());
  out.margin_global =
      std::pow(R, eta.length()) / r_factorial_product - Ep_max;

  // The absolute-value bound compares identical quadratures, but the product
  // and global bounds compare an iterated trapezoid against a product of
  // trapezoids, so their agreement is only O(dt^2).
  const double abs_slack = 1e-9;
  const double quad_slack =
      1e-9 + eta.length() * std::max(1.0, u.duration()) * u.dt() * u.dt();
  out.ok = out.margin_abs >= -abs_slack &&
           out.margin_product >= -quad_slack &&
           out.margin_global >= -quad_slack;
  return out;
}

struct ContinuityProbeRow {
  double input_dist = 0.0;   // ||v - u||_p
  double output_dist = 0.0;  // ||F_c[v] - F_c[u]||_q
};

// Empirical modulus-of-continuity table for fixed c across a list of
// perturbed inputs; q is the conjugate exponent of p.
inline std::vector<ContinuityProbeRow> continuity_probe(
    const Series& c, const Signal& u, const std::vector<Signal>& perturbed,
    double p, int N, int effective_m = -1) {
  const double q = conjugate_exponent(p);
  const EvalResult base = evaluate_truncated(c, u, N, effective_m);
  std::vector<ContinuityProbeRow> rows;
  for (const Signal& v : perturbed) {
    if (!v.same_grid(u) || v.num_channels() != u.num_channels())
      throw FormatError("continuity_probe: perturbation grid mismatch");
    std::vector<std::vector<double>> diff;
    for (int i = 1; i <= u.num_channels(); ++i) {
      std::vector<double> ch = v.input_channel(i);
      const auto& uch = u.input_channel(i);
      for (std::size_t j = 0; j < ch.size(); ++j) ch[j] -= uch[j];
      diff.push_back(std::move(ch));
    }
    ContinuityProbeRow row;
    row.input_dist =
        u.num_channels() > 0
            ? lp_norm(Signal(u.t0(), u.dt(), std::move(diff)), p).value
            : 0.0;
    const EvalResult pert = evaluate_truncated(c, v, N, effective_m);
    double dist = 0.0;
    for (int j = 1; j <= base.y.num_channels(); ++j)
      dist = std::max(dist, lq_distance(base.y.input_channel(j),
                                        pert.y.input_channel(j), u.dt(), q));
    row.output_dist = dist;
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json eval_result_sidecar(const EvalResult& r) {
  nlohmann::json j;
  j["N"] = r.N;
  j["radius_ok"] = r.radius_ok;
  if (std::isfinite(r.tail_bound))
    j["tail_bound"] = r.tail_bound;
  else
    j["tail_bound"] = "inf";
  j["constants"] = {{"K", r.constants.K},
                    {"M", r.constants.M},
                    {"R", r.constants.R},
                    {"m", r.constants.m},
                    {"T", r.constants.T}};
  return j;
}

}  // namespace cfs
