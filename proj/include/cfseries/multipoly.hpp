#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "cfseries/errors.hpp"

namespace cfs {

// Multivariate polynomial in z_1..z_n, sparse exponent-vector term list.
class MultiPoly {
 public:
  using Exponents = std::vector<int>;
  using TermMap = std::map<Exponents, double>;

  MultiPoly() = default;
  explicit MultiPoly(int nvars) : nvars_(nvars) {}

  static MultiPoly constant(int nvars, double value) {
    MultiPoly p(nvars);
    p.add_term(Exponents(nvars, 0), value);
    return p;
  }

  static MultiPoly variable(int nvars, int index) {
    MultiPoly p(nvars);
    Exponents e(nvars, 0);
    e[index] = 1;
    p.add_term(e, 1.0);
    return p;
  }

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t num_terms() const { return terms_.size(); }

  void add_term(const Exponents& exps, double coef) {
    if (exps.size() != static_cast<std::size_t>(nvars_))
      throw FormatError("exponent vector has wrong arity");
    if (coef == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(exps, coef);
    if (!inserted) {
      it->second += coef;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  MultiPoly& operator+=(const MultiPoly& other) {
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) {
    a += b;
    return a;
  }

  friend MultiPoly operator*(double s, MultiPoly p) {
    if (s == 0.0) return MultiPoly(p.nvars_);
    for (auto& [e, c] : p.terms_) c *= s;
    return p;
  }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly out(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  // d/dz_i, exact.
  MultiPoly partial(int var) const {
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents d(e);
      --d[var];
      out.add_term(d, c * e[var]);
    }
    return out;
  }

  double eval(const std::vector<double>& z) const {
    double total = 0.0;
    for (const auto& [e, c] : terms_) {
      double term = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) term *= z[i];
      total += term;
    }
    return total;
  }

  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

 private:
  int nvars_ = 0;
  TermMap terms_;
};

// L_g h = sum_i g_i * dh/dz_i, exact symbolic arithmetic.
inline MultiPoly lie_derivative(const MultiPoly& h,
                                const std::vector<MultiPoly>& g) {
  if (g.size() != static_cast<std::size_t>(h.nvars()))
    throw FormatError("lie_derivative: vector field arity mismatch");
  MultiPoly out(h.nvars());
  for (int i = 0; i < h.nvars(); ++i) out += g[i] * h.partial(i);
  return out;
}

}  // namespace cfs
