#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "cfseries/polynomial.hpp"
#include "cfseries/word.hpp"

using namespace cfs;

namespace {

// Independent shuffle oracle: enumerate every interleaving of a and b by
// choosing which of the |a|+|b| output slots receive a's letters. This never
// touches the recursion under test.
Polynomial<long long> shuffle_oracle(const Alphabet& alphabet, const Word& a,
                                     const Word& b) {
  Polynomial<long long> out(alphabet);
  const int total = a.length() + b.length();
  // Iterate over all combinations of slots for a's letters.
  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + a.length(), true);
  std::sort(mask.begin(), mask.end());
  do {
    Word w;
    int ia = 0, ib = 0;
    for (int pos = 0; pos < total; ++pos) {
      if (mask[pos])
        w.letters.push_back(a.letters[ia++]);
      else
        w.letters.push_back(b.letters[ib++]);
    }
    out.add_term(w, 1);
  } while (std::next_permutation(mask.begin(), mask.end()));
  return out;
}

Polynomial<long long> random_polynomial(std::mt19937& rng, const Alphabet& a,
                                        int max_len, int max_terms) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> letter(0, a.m);
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> nterms(1, max_terms);
  Polynomial<long long> p(a);
  const int n = nterms(rng);
  for (int t = 0; t < n; ++t) {
    Word w;
    const int l = len(rng);
    for (int i = 0; i < l; ++i) w.letters.push_back(letter(rng));
    p.add_term(w, coeff(rng));
  }
  return p;
}

long long factorial_ll(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("word serialization round trip and canonical order") {
  CHECK(render_word(Word::empty()) == "e");
  CHECK(render_word(Word({0, 1, 1})) == "x0 x1 x1");
  CHECK(parse_word("e") == Word::empty());
  CHECK(parse_word("x0 x1 x1") == Word({0, 1, 1}));
  CHECK_THROWS_AS(parse_word("x0 y1"), FormatError);
  CHECK_THROWS_AS(parse_word("e x1"), FormatError);

  LengthLexLess less;
  CHECK(less(Word::empty(), Word({0})));
  CHECK(less(Word({1}), Word({0, 0})));
  CHECK(less(Word({0, 1}), Word({1, 0})));
}

TEST_CASE("enumerate_words") {
  Alphabet one{1};
  auto w0 = enumerate_words(one, 0);
  REQUIRE(w0.size() == 1);
  CHECK(w0[0] == Word::empty());

  auto w2 = enumerate_words(one, 2);
  REQUIRE(w2.size() == 4);
  CHECK(w2[0] == Word({0, 0}));
  CHECK(w2[1] == Word({0, 1}));
  CHECK(w2[2] == Word({1, 0}));
  CHECK(w2[3] == Word({1, 1}));

  CHECK(enumerate_words(Alphabet{2}, 3).size() == 27);
  CHECK(enumerate_words_up_to(one, 3).size() == 1 + 2 + 4 + 8);

  CHECK_THROWS_AS(enumerate_words(Alphabet{9}, 8), ResourceCapError);
}

TEST_CASE("shuffle base cases") {
  Alphabet a{1};
  auto x0 = Polynomial<long long>::monomial(a, Word({0}));
  auto x1 = Polynomial<long long>::monomial(a, Word({1}));

  auto sq = shuffle(x1, x1);
  CHECK(sq.coefficient(Word({1, 1})) == 2);
  CHECK(sq.terms().size() == 1);

  auto mix = shuffle(x0, x1);
  CHECK(mix.coefficient(Word({0, 1})) == 1);
  CHECK(mix.coefficient(Word({1, 0})) == 1);
  CHECK(mix.terms().size() == 2);

  // x1x1 sh x1 = 3 x1x1x1, checked against the interleaving oracle.
  auto cube = shuffle(Polynomial<long long>::monomial(a, Word({1, 1})), x1);
  CHECK(cube == shuffle_oracle(a, Word({1, 1}), Word({1})));
  CHECK(cube.coefficient(Word({1, 1, 1})) == 3);

  // Empty word is the unit.
  auto unit = Polynomial<long long>::monomial(a, Word::empty());
  CHECK(shuffle(unit, mix) == mix);
  CHECK(shuffle(mix, unit) == mix);
}

TEST_CASE("shuffle of random words matches interleaving oracle") {
  std::mt19937 rng(7);
  Alphabet a{2};
  std::uniform_int_distribution<int> len(0, 4);
  std::uniform_int_distribution<int> letter(0, 2);
  for (int trial = 0; trial < 40; ++trial) {
    Word wa, wb;
    for (int i = 0, l = len(rng); i < l; ++i) wa.letters.push_back(letter(rng));
    for (int i = 0, l = len(rng); i < l; ++i) wb.letters.push_back(letter(rng));
    auto lhs = shuffle(Polynomial<long long>::monomial(a, wa),
                       Polynomial<long long>::monomial(a, wb));
    CHECK(lhs == shuffle_oracle(a, wa, wb));
  }
}

TEST_CASE("shuffle is commutative and associative") {
  std::mt19937 rng(11);
  Alphabet a{2};
  for (int trial = 0; trial < 25; ++trial) {
    auto p = random_polynomial(rng, a, 3, 3);
    auto q = random_polynomial(rng, a, 3, 3);
    auto r = random_polynomial(rng, a, 2, 2);
    CHECK(shuffle(p, q) == shuffle(q, p));
    CHECK(shuffle(shuffle(p, q), r) == shuffle(p, shuffle(q, r)));
  }
}

TEST_CASE("char_polynomial") {
  auto p = char_polynomial(Alphabet{1}, 1);
  CHECK(p.coefficient(Word({0})) == 1);
  CHECK(p.coefficient(Word({1})) == 1);
  CHECK(p.terms().size() == 2);

  auto q = char_polynomial(Alphabet{0}, 3);
  CHECK(q.terms().size() == 1);
  CHECK(q.coefficient(Word({0, 0, 0})) == 1);

  auto r = char_polynomial(Alphabet{1}, 2);
  CHECK(r.terms().size() == 4);
  for (const auto& [w, c] : r.terms()) CHECK(c == 1);
}

TEST_CASE("multinomial_shuffle_expansion") {
  auto p = multinomial_shuffle_expansion(Alphabet{1}, {1, 1});
  CHECK(p.coefficient(Word({0, 1})) == 1);
  CHECK(p.coefficient(Word({1, 0})) == 1);

  // x_i^{r} is the word power, so {2} over {x0} is just x0x0.
  auto q = multinomial_shuffle_expansion(Alphabet{0}, {2});
  CHECK(q.coefficient(Word({0, 0})) == 1);
  CHECK(q.terms().size() == 1);

  // r = (1,2): x0 sh x1x1, checked against the interleaving oracle.
  CHECK(multinomial_shuffle_expansion(Alphabet{1}, {1, 2}) ==
        shuffle_oracle(Alphabet{1}, Word({0}), Word({1, 1})));
}

TEST_CASE("characteristic polynomial identity over compositions") {
  for (int m = 0; m <= 2; ++m) {
    Alphabet a{m};
    for (int k = 0; k <= 5; ++k) {
      Polynomial<long long> sum(a);
      // all compositions r_0+...+r_m = k
      std::vector<int> r(m + 1, 0);
      std::function<void(int, int)> walk = [&](int idx, int rem) {
        if (idx == m) {
          r[idx] = rem;
          sum += multinomial_shuffle_expansion(a, r);
          return;
        }
        for (int v = 0; v <= rem; ++v) {
          r[idx] = v;
          walk(idx + 1, rem - v);
        }
      };
      walk(0, k);
      CHECK(sum == char_polynomial(a, k));
    }
  }
}

TEST_CASE("coefficient mass of a shuffle power is the multinomial") {
  // total coefficient mass of x_0^{r_0} sh ... sh x_m^{r_m} is
  // k!/(r_0!...r_m!).
  for (int m = 0; m <= 2; ++m) {
    std::vector<std::vector<int>> cases;
    if (m == 0) cases = {{3}, {5}};
    if (m == 1) cases = {{2, 3}, {1, 4}, {0, 3}};
    if (m == 2) cases = {{1, 2, 2}, {2, 0, 3}};
    for (const auto& r : cases) {
      int k = 0;
      long long denom = 1;
      for (int v : r) {
        k += v;
        denom *= factorial_ll(v);
      }
      auto p = multinomial_shuffle_expansion(Alphabet{m}, r);
      CHECK(p.coefficient_sum() == factorial_ll(k) / denom);
    }
  }
}

TEST_CASE("the exponential character is multiplicative under shuffle") {
  // phi(w) = 1/|w|! extends to a homomorphism: phi(p sh q) = phi(p) phi(q),
  // since E_w[u] = t^{|w|}/|w|! when every channel is 1.
  std::mt19937 rng(23);
  Alphabet a{1};
  auto phi = [](const Polynomial<long long>& p) {
    double s = 0.0;
    for (const auto& [w, c] : p.terms())
      s += static_cast<double>(c) / factorial_ll(w.length());
    return s;
  };
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_polynomial(rng, a, 3, 3);
    auto q = random_polynomial(rng, a, 3, 3);
    CHECK(phi(shuffle(p, q)) ==
          doctest::Approx(phi(p) * phi(q)).epsilon(1e-12));
  }
}
