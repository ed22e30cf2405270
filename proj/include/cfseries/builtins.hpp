#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cfseries/errors.hpp"
#include "cfseries/series.hpp"

namespace cfs {

// Named example series, all supported on powers of x_1 over the alphabet
// {x_0, x_1}. They are single-letter examples, so operator-side radius
// arithmetic should use an effective letter count of one (m_eff = 0).

namespace detail {

inline std::vector<Word> x1_power_level(int k) {
  return {Word::power(1, k)};
}

inline double catalan_number(int n) {
  // C_{n+1} = C_n * 2(2n+1)/(n+2); exact in doubles through n = 30, after
  // which the value is correctly rounded.
  double c = 1.0;
  for (int i = 0; i < n; ++i) c = c * 2.0 * (2.0 * i + 1.0) / (i + 2.0);
  return c;
}

inline double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace detail

// sum_k M^k k! x1^k, the geometric-factorial family of Example fixed-u.
inline Series factorial_geometric(double M, int l_max = 60) {
  auto fn = [M](const Word& w) -> Coeff {
    const int k = w.length();
    if (w != Word::power(1, k)) return {0.0};
    return {std::pow(M, k) * detail::factorial(k)};
  };
  Series s = Series::generated(Alphabet{1}, 1, fn, l_max,
                               detail::x1_power_level);
  s.set_certificate(GrowthCertificate{1.0, M, 1.0});
  return s;
}

// Finite truncation sum_{k<=N} M^k k! x1^k as a polynomial.
inline Series factorial_geometric_truncated(double M, int N) {
  Series::TermMap terms;
  for (int k = 0; k <= N; ++k)
    terms[Word::power(1, k)] = {std::pow(M, k) * detail::factorial(k)};
  Series s = Series::finite(Alphabet{1}, 1, std::move(terms));
  s.set_certificate(GrowthCertificate{1.0, M, 1.0});
  return s;
}

// j! x1^j, the monomial sequence of the Banach/Silva convergence example.
inline Series banach_monomial(int j) {
  Series::TermMap terms;
  terms[Word::power(1, j)] = {detail::factorial(j)};
  return Series::finite(Alphabet{1}, 1, std::move(terms));
}

// Partial sum sum_{1<=k<=j} (k!)^2 x1^k of the ultrametric divergence
// example.
inline Series example31_partial(int j) {
  Series::TermMap terms;
  for (int k = 1; k <= j; ++k) {
    const double f = detail::factorial(k);
    terms[Word::power(1, k)] = {f * f};
  }
  return Series::finite(Alphabet{1}, 1, std::move(terms));
}

// The limit sum_k (k!)^2 x1^k; Gevrey order 2, outside the locally
// convergent class.
inline Series example31_limit(int l_max = 40) {
  auto fn = [](const Word& w) -> Coeff {
    const int k = w.length();
    if (k == 0 || w != Word::power(1, k)) return {0.0};
    const double f = detail::factorial(k);
    return {f * f};
  };
  return Series::generated(Alphabet{1}, 1, fn, l_max, detail::x1_power_level);
}

// Catalan family: coefficient n! * n^{(5j-2)/(2j)} * C_n on x1^n. The n!
// weight restores the Gevrey-1 normalization under which the membership
// pattern of the example holds: j = 1 lies in l_infty,4 while j > 1 does
// not, and the whole family lives in l_infty,5.
inline Series catalan_gevrey_member(int j, int l_max = 60) {
  if (j < 1) throw NumericError("catalan_gevrey member index must be >= 1");
  const double expo = (5.0 * j - 2.0) / (2.0 * j);
  auto fn = [expo](const Word& w) -> Coeff {
    const int n = w.length();
    if (n == 0 || w != Word::power(1, n)) return {0.0};
    return {detail::factorial(n) * std::pow(n, expo) *
            detail::catalan_number(n)};
  };
  return Series::generated(Alphabet{1}, 1, fn, l_max, detail::x1_power_level);
}

// The limit of the Catalan family (exponent 5/2).
inline Series catalan_gevrey_limit(int l_max = 60) {
  auto fn = [](const Word& w) -> Coeff {
    const int n = w.length();
    if (n == 0 || w != Word::power(1, n)) return {0.0};
    return {detail::factorial(n) * std::pow(n, 2.5) *
            detail::catalan_number(n)};
  };
  return Series::generated(Alphabet{1}, 1, fn, l_max, detail::x1_power_level);
}

// Builtin lookup used by the CLI: "factorial_geometric(2)", "example31",
// "example31(5)", "catalan_gevrey", "catalan_gevrey(3)", "banach_monomial(4)".
inline Series parse_builtin_series(const std::string& spec) {
  auto open = spec.find('(');
  std::string name = spec.substr(0, open);
  std::optional<double> arg;
  if (open != std::string::npos) {
    auto close = spec.find(')', open);
    if (close == std::string::npos)
      throw FormatError("unterminated builtin argument in '" + spec + "'");
    arg = std::stod(spec.substr(open + 1, close - open - 1));
  }
  if (name == "factorial_geometric") {
    if (!arg) throw FormatError("factorial_geometric needs an M argument");
    return factorial_geometric(*arg);
  }
  if (name == "banach_monomial") {
    if (!arg) throw FormatError("banach_monomial needs an index argument");
    return banach_monomial(static_cast<int>(*arg));
  }
  if (name == "example31")
    return arg ? example31_partial(static_cast<int>(*arg)) : example31_limit();
  if (name == "catalan_gevrey")
    return arg ? catalan_gevrey_member(static_cast<int>(*arg))
               : catalan_gevrey_limit();
  throw FormatError("unknown builtin series '" + spec + "'");
}

}  // namespace cfs
