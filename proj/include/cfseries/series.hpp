#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfseries/errors.hpp"
#include "cfseries/polynomial.hpp"
#include "cfseries/word.hpp"

namespace cfs {

// Coefficient in R^ell.
using Coeff = std::vector<double>;

inline double abs_max(const Coeff& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline bool is_zero_coeff(const Coeff& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// Claims |(c,eta)| <= K * M^{|eta|} * (|eta|!)^s for all eta.
struct GrowthCertificate {
  double K = 0.0;   // >= 0
  double M = 1.0;   // > 0
  double s = 1.0;   // Gevrey exponent, >= 0

  double bound(int word_length) const {
    return K * std::pow(M, word_length) *
           std::pow(std::tgamma(word_length + 1.0), s);
  }

  bool admits(int word_length, double coeff_abs_max) const {
    // Small slack absorbs tgamma/pow rounding on exact boundary cases.
    return coeff_abs_max <= bound(word_length) * (1.0 + 1e-12) + 1e-300;
  }
};

// Formal power series over X with coefficients in R^ell. Either a sparse
// finite-support map (a polynomial) or a generator-backed series with an
// explicit queryable horizon L_max. Generated series may carry a support
// enumerator so scans over X^{<=J} touch only candidate words.
class Series {
 public:
  using CoeffFn = std::function<Coeff(const Word&)>;
  using SupportLevelFn = std::function<std::vector<Word>(int)>;
  using TermMap = std::map<Word, Coeff, LengthLexLess>;

  Series() = default;

  static Series finite(Alphabet alphabet, int ell, TermMap terms) {
    Series s;
    s.alphabet_ = alphabet;
    s.ell_ = ell;
    for (auto it = terms.begin(); it != terms.end();) {
      if (it->second.size() != static_cast<std::size_t>(ell))
        throw FormatError("coefficient dimension does not match ell");
      it = is_zero_coeff(it->second) ? terms.erase(it) : std::next(it);
    }
    s.terms_ = std::move(terms);
    return s;
  }

  static Series zero(Alphabet alphabet, int ell) {
    return finite(alphabet, ell, {});
  }

  // Scalar (ell=1) polynomial from a word-algebra polynomial.
  static Series from_polynomial(const Polynomial<double>& p) {
    TermMap terms;
    for (const auto& [w, c] : p.terms()) terms[w] = Coeff{c};
    return finite(p.alphabet(), 1, std::move(terms));
  }

  static Series generated(Alphabet alphabet, int ell, CoeffFn fn, int l_max,
                          SupportLevelFn support_level = {}) {
    Series s;
    s.alphabet_ = alphabet;
    s.ell_ = ell;
    s.finite_ = false;
    s.gen_ = std::move(fn);
    s.l_max_ = l_max;
    s.support_level_ = std::move(support_level);
    return s;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  int ell() const { return ell_; }
  bool is_finite_support() const { return finite_; }
  const TermMap& terms() const { return terms_; }

  // Largest queryable word length: L_max for generated series, unbounded
  // for polynomials (absent words are zero).
  int horizon() const {
    return finite_ ? std::numeric_limits<int>::max() : l_max_;
  }

  int max_support_length() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.length();
  }

  const std::optional<GrowthCertificate>& certificate() const { return cert_; }
  void set_certificate(GrowthCertificate cert) { cert_ = cert; }

  Coeff coefficient(const Word& w) const {
    if (finite_) {
      auto it = terms_.find(w);
      return it == terms_.end() ? Coeff(ell_, 0.0) : it->second;
    }
    if (w.length() > l_max_)
      throw HorizonError("coefficient query at length " +
                         std::to_string(w.length()) +
                         " beyond series horizon L_max=" +
                         std::to_string(l_max_));
    Coeff c = gen_(w);
    if (c.size() != static_cast<std::size_t>(ell_))
      throw FormatError("generator returned wrong coefficient dimension");
    return c;
  }

  // Candidate support words of length k, in canonical order. For finite
  // support this is the stored level; for generated series the declared
  // enumerator, else all of X^k (subject to the cap).
  std::vector<Word> support_level(int k,
                                  std::uint64_t cap = kDefaultWordCap) const {
    if (finite_) {
      std::vector<Word> out;
      for (const auto& [w, c] : terms_)
        if (w.length() == k) out.push_back(w);
      return out;
    }
    if (k > l_max_)
      throw HorizonError("support scan at length " + std::to_string(k) +
                         " beyond series horizon L_max=" +
                         std::to_string(l_max_));
    if (support_level_) return support_level_(k);
    return enumerate_words(alphabet_, k, cap);
  }

 private:
  Alphabet alphabet_;
  int ell_ = 1;
  bool finite_ = true;
  TermMap terms_;
  CoeffFn gen_;
  int l_max_ = 0;
  SupportLevelFn support_level_;
  std::optional<GrowthCertificate> cert_;
};

// Order of a series: length of the shortest supported word. `exact` is
// false when the scan hit the limit without finding support on a series
// whose support could extend past it (then value = J+1 is a lower bound).
struct OrdResult {
  bool infinite = false;
  int value = 0;
  bool exact = true;
};

inline OrdResult ord(const Series& c, int search_limit) {
  if (c.is_finite_support()) {
    if (c.terms().empty()) return {true, 0, true};
    return {false, c.terms().begin()->first.length(), true};
  }
  const int limit = std::min(search_limit, c.horizon());
  for (int k = 0; k <= limit; ++k) {
    for (const auto& w : c.support_level(k))
      if (!is_zero_coeff(c.coefficient(w))) return {false, k, true};
  }
  return {false, limit + 1, false};  // lower bound only
}

struct UltrametricParams {
  double sigma = 0.5;  // strictly inside (0,1)
};

struct DistResult {
  double value = 0.0;
  bool exact = true;
};

inline Series linear_combination(double a, const Series& c, double b,
                                 const Series& d) {
  if (!(c.alphabet() == d.alphabet()) || c.ell() != d.ell())
    throw FormatError("linear_combination: mismatched alphabet or ell");
  const int ell = c.ell();
  if (c.is_finite_support() && d.is_finite_support()) {
    Series::TermMap terms = c.terms();
    for (auto& [w, coeff] : terms)
      for (double& x : coeff) x *= a;
    for (const auto& [w, coeff] : d.terms()) {
      auto [it, inserted] = terms.try_emplace(w, Coeff(ell, 0.0));
      for (int i = 0; i < ell; ++i) it->second[i] += b * coeff[i];
    }
    return Series::finite(c.alphabet(), ell, std::move(terms));
  }
  const int l_max = std::min(c.horizon(), d.horizon());
  auto fn = [a, c, b, d, ell](const Word& w) {
    Coeff cc = c.coefficient(w);
    Coeff dc = d.coefficient(w);
    Coeff out(ell);
    for (int i = 0; i < ell; ++i) out[i] = a * cc[i] + b * dc[i];
    return out;
  };
  auto support = [c, d](int k) {
    std::vector<Word> merged = c.support_level(k);
    std::vector<Word> other = d.support_level(k);
    std::vector<Word> out;
    std::merge(merged.begin(), merged.end(), other.begin(), other.end(),
               std::back_inserter(out), LengthLexLess{});
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  return Series::generated(c.alphabet(), ell, fn, l_max, support);
}

// sigma^{ord(c-d)}, with sigma^inf := 0.
inline DistResult ultrametric_dist(const Series& c, const Series& d,
                                   const UltrametricParams& params,
                                   int search_limit) {
  if (params.sigma <= 0.0 || params.sigma >= 1.0)
    throw NumericError("ultrametric sigma must lie strictly in (0,1)");
  OrdResult o = ord(linear_combination(1.0, c, -1.0, d), search_limit);
  if (o.infinite) return {0.0, true};
  return {std::pow(params.sigma, o.value), o.exact};
}

// --- JSON serialization (finite-support series) ---
//   { "m": int, "ell": int, "terms": [ { "word": "x0 x1", "coeff": [..] } ] }

inline nlohmann::json series_to_json(const Series& c) {
  if (!c.is_finite_support())
    throw FormatError("only finite-support series serialize to JSON");
  nlohmann::json j;
  j["m"] = c.alphabet().m;
  j["ell"] = c.ell();
  j["terms"] = nlohmann::json::array();
  for (const auto& [w, coeff] : c.terms())
    j["terms"].push_back({{"word", render_word(w)}, {"coeff", coeff}});
  return j;
}

inline Series series_from_json(const nlohmann::json& j) {
  Alphabet alphabet{j.at("m").get<int>()};
  const int ell = j.at("ell").get<int>();
  if (alphabet.m < 0 || ell < 1) throw FormatError("bad series header");
  Series::TermMap terms;
  for (const auto& t : j.at("terms")) {
    Word w = parse_word(t.at("word").get<std::string>());
    for (int letter : w.letters)
      if (letter > alphabet.m)
        throw FormatError("letter out of alphabet in '" +
                          t.at("word").get<std::string>() + "'");
    Coeff coeff = t.at("coeff").get<Coeff>();
    if (coeff.size() != static_cast<std::size_t>(ell))
      throw FormatError("coefficient dimension does not match ell");
    terms[w] = std::move(coeff);
  }
  return Series::finite(alphabet, ell, std::move(terms));
}

}  // namespace cfs
