#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "cfseries/word.hpp"

namespace cfs {

// Finite-support polynomial over the free monoid X^* with scalar
// coefficients. T = long long keeps the word-algebra identities exact;
// T = double is used where polynomials meet signals.
template <typename T>
class Polynomial {
 public:
  using TermMap = std::map<Word, T, LengthLexLess>;

  Polynomial() = default;
  explicit Polynomial(Alphabet alphabet) : alphabet_(alphabet) {}

  static Polynomial monomial(Alphabet alphabet, const Word& w, T coeff = T(1)) {
    Polynomial p(alphabet);
    p.add_term(w, coeff);
    return p;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  T coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? T(0) : it->second;
  }

  void add_term(const Word& w, T coeff) {
    auto it = terms_.find(w);
    if (it == terms_.end()) {
      if (coeff != T(0)) terms_.emplace(w, coeff);
      return;
    }
    it->second += coeff;
    if (it->second == T(0)) terms_.erase(it);
  }

  Polynomial& operator+=(const Polynomial& other) {
    for (const auto& [w, c] : other.terms_) add_term(w, c);
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    a += b;
    return a;
  }

  Polynomial& operator*=(T scalar) {
    if (scalar == T(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [w, c] : terms_) c *= scalar;
    return *this;
  }

  friend Polynomial operator*(T scalar, Polynomial p) {
    p *= scalar;
    return p;
  }

  T coefficient_sum() const {
    T s(0);
    for (const auto& [w, c] : terms_) s += c;
    return s;
  }

  int max_length() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.length();
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  Alphabet alphabet_;
  TermMap terms_;
};

namespace detail {

// Word shuffle by the displayed recursion:
//   (x_i eta) sh (x_j xi) = x_i (eta sh (x_j xi)) + x_j ((x_i eta) sh xi),
// with the empty word as unit. Returns word -> multiplicity.
template <typename T>
std::map<Word, T, LengthLexLess> shuffle_words(const Word& a, const Word& b) {
  std::map<Word, T, LengthLexLess> out;
  if (a.is_empty()) {
    out.emplace(b, T(1));
    return out;
  }
  if (b.is_empty()) {
    out.emplace(a, T(1));
    return out;
  }
  for (const auto& [w, mult] : shuffle_words<T>(a.tail(), b))
    out[w.prepend(a.front())] += mult;
  for (const auto& [w, mult] : shuffle_words<T>(a, b.tail()))
    out[w.prepend(b.front())] += mult;
  return out;
}

}  // namespace detail

template <typename T>
Polynomial<T> shuffle(const Polynomial<T>& p, const Polynomial<T>& q) {
  Polynomial<T> out(p.alphabet());
  for (const auto& [wp, cp] : p.terms()) {
    for (const auto& [wq, cq] : q.terms()) {
      for (const auto& [w, mult] : detail::shuffle_words<T>(wp, wq))
        out.add_term(w, cp * cq * mult);
    }
  }
  return out;
}

// char(X^k): the sum of all words of length k, unit coefficients.
template <typename T = long long>
Polynomial<T> char_polynomial(const Alphabet& alphabet, int k,
                              std::uint64_t cap = kDefaultWordCap) {
  Polynomial<T> out(alphabet);
  for (const auto& w : enumerate_words(alphabet, k, cap)) out.add_term(w, T(1));
  return out;
}

// x_0^{r_0} sh x_1^{r_1} sh ... sh x_m^{r_m} by iterated shuffle.
template <typename T = long long>
Polynomial<T> multinomial_shuffle_expansion(const Alphabet& alphabet,
                                            const std::vector<int>& exponents) {
  Polynomial<T> out =
      Polynomial<T>::monomial(alphabet, Word::power(0, exponents.empty() ? 0 : exponents[0]));
  for (std::size_t i = 1; i < exponents.size(); ++i) {
    out = shuffle(out, Polynomial<T>::monomial(alphabet, Word::power(static_cast<int>(i),
                                                                     exponents[i])));
  }
  return out;
}

}  // namespace cfs
