#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cfseries/builtins.hpp"
#include "cfseries/topology.hpp"

using namespace cfs;

namespace {

Series geometric_series(double base, int l_max) {
  auto fn = [base](const Word& w) -> Coeff {
    const int k = w.length();
    if (w != Word::power(1, k)) return {0.0};
    return {std::pow(base, k)};
  };
  return Series::generated(
      Alphabet{1}, 1, fn, l_max,
      [](int k) { return std::vector<Word>{Word::power(1, k)}; });
}

Series random_scalar_polynomial(std::mt19937& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> letter(0, 1);
  std::uniform_real_distribution<double> coeff(-4.0, 4.0);
  std::uniform_int_distribution<int> nterms(0, 5);
  Series::TermMap terms;
  for (int t = 0, n = nterms(rng); t < n; ++t) {
    Word w;
    for (int i = 0, l = len(rng); i < l; ++i)
      w.letters.push_back(letter(rng));
    terms[w] = {coeff(rng)};
  }
  return Series::finite(Alphabet{1}, 1, std::move(terms));
}

}  // namespace

TEST_CASE("norm of the factorial monomials") {
  for (int j = 0; j <= 20; ++j) {
    Series cj = banach_monomial(j);
    NormEstimate n1 = ell_infty_M_norm(cj, 1.0, 25);
    CHECK(n1.status == NormEstimate::Status::exact);
    CHECK(n1.value == 1.0);

    NormEstimate n2 = ell_infty_M_norm(cj, 2.0, 25);
    CHECK(n2.status == NormEstimate::Status::exact);
    CHECK(n2.value == doctest::Approx(std::pow(2.0, -j)).epsilon(1e-12));
  }
  CHECK(ell_infty_M_norm(Series::zero(Alphabet{1}, 1), 3.0, 10).value == 0.0);
}

TEST_CASE("norm records the maximizing word") {
  Series::TermMap terms;
  terms[Word({1})] = {4.0};
  terms[Word({1, 1})] = {1.0};
  Series c = Series::finite(Alphabet{1}, 1, std::move(terms));
  NormEstimate n = ell_infty_M_norm(c, 1.0, 10);
  REQUIRE(n.attained_at.has_value());
  CHECK(*n.attained_at == Word({1}));
  CHECK(n.value == doctest::Approx(4.0));
}

TEST_CASE("certificate promotes a scanned norm to certified_exact") {
  Series c = factorial_geometric(1.0, 60);  // cert (K=1, M=1, s=1)
  NormEstimate at2 = ell_infty_M_norm(c, 2.0, 10);
  CHECK(at2.status == NormEstimate::Status::certified_exact);
  CHECK(at2.value == doctest::Approx(1.0));

  // At M = 1 the tail levels are flat, not decreasing below the scan sup;
  // still certified because the first unscanned level cannot exceed it.
  NormEstimate at1 = ell_infty_M_norm(c, 1.0, 10);
  CHECK(at1.value == doctest::Approx(1.0));
  CHECK(at1.status == NormEstimate::Status::certified_exact);

  Series bare = geometric_series(2.0, 60);  // no certificate
  CHECK(ell_infty_M_norm(bare, 1.0, 10).status ==
        NormEstimate::Status::lower_bound);
}

TEST_CASE("norm axioms at fixed M") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> scalar(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    Series c = random_scalar_polynomial(rng, 4);
    Series d = random_scalar_polynomial(rng, 4);
    const double M = 0.5 + trial % 3;
    const double a = scalar(rng);

    const double nc = ell_infty_M_norm(c, M, 10).value;
    const double nd = ell_infty_M_norm(d, M, 10).value;
    const double nac =
        ell_infty_M_norm(linear_combination(a, c, 0.0, d), M, 10).value;
    const double nsum =
        ell_infty_M_norm(linear_combination(1.0, c, 1.0, d), M, 10).value;

    CHECK(nac == doctest::Approx(std::abs(a) * nc));  // homogeneity
    CHECK(nsum <= nc + nd + 1e-12);                   // triangle
    CHECK((nc == 0.0) == c.terms().empty());
  }
}

TEST_CASE("norm is monotone decreasing in M") {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    Series c = random_scalar_polynomial(rng, 4);
    double prev = ell_infty_M_norm(c, 0.25, 10).value;
    for (double M : {0.5, 1.0, 2.0, 4.0}) {
      const double cur = ell_infty_M_norm(c, M, 10).value;
      CHECK(cur <= prev * (1.0 + 1e-12));
      prev = cur;
    }
  }
}

TEST_CASE("norm is the smallest admissible K") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    Series c = random_scalar_polynomial(rng, 4);
    if (c.terms().empty()) continue;
    const double M = 1.5;
    NormEstimate n = ell_infty_M_norm(c, M, 10);
    GrowthCertificate at{n.value, M, 1.0};
    CHECK(verify_certificate(c, at, 10));
    REQUIRE(n.attained_at.has_value());
    const Word& w = *n.attained_at;
    GrowthCertificate below{n.value * (1.0 - 1e-9), M, 1.0};
    CHECK(!below.admits(w.length(), abs_max(c.coefficient(w))));
  }
}

TEST_CASE("Gevrey fit recovers known growth classes") {
  // (c, x1^k) = k!  ->  s = 1, M = 1
  GevreyFit f1 = fit_growth_certificate(factorial_geometric(1.0, 60), 40);
  CHECK(f1.cert.s == doctest::Approx(1.0).epsilon(0.1));
  CHECK(f1.cert.M == doctest::Approx(1.0).epsilon(0.1));
  CHECK(f1.lc_range);
  CHECK(verify_certificate(factorial_geometric(1.0, 60), f1.cert, 40));

  // (c, x1^k) = 2^k  ->  s = 0, M = 2
  GevreyFit f2 = fit_growth_certificate(geometric_series(2.0, 60), 40);
  CHECK(f2.cert.s == doctest::Approx(0.0).epsilon(0.1));
  CHECK(f2.cert.M == doctest::Approx(2.0).epsilon(0.1));
  CHECK(f2.lc_range);

  // (c, x1^k) = (k!)^2  ->  s = 2, outside the locally convergent range
  GevreyFit f3 = fit_growth_certificate(example31_limit(40), 40);
  CHECK(f3.cert.s == doctest::Approx(2.0).epsilon(0.1));
  CHECK(!f3.lc_range);
}

TEST_CASE("Gevrey fit rejects degenerate data") {
  Series::TermMap terms;
  terms[Word({1})] = {1.0};
  terms[Word({1, 1})] = {1.0};
  Series thin = Series::finite(Alphabet{1}, 1, std::move(terms));
  CHECK_THROWS_AS(fit_growth_certificate(thin, 10), NumericError);
  CHECK_THROWS_AS(fit_growth_certificate(thin, 3), NumericError);
}

TEST_CASE("silva convergence of the factorial monomials") {
  std::vector<Series> seq;
  for (int j = 1; j <= 20; ++j) seq.push_back(banach_monomial(j));
  Series zero = Series::zero(Alphabet{1}, 1);

  ConvergenceReport only1 = silva_convergence_check(seq, zero, {1.0}, 25);
  CHECK(only1.mode == ConvergenceReport::Mode::diverged);

  ConvergenceReport both = silva_convergence_check(seq, zero, {1.0, 2.0}, 25);
  CHECK(both.mode == ConvergenceReport::Mode::silva);
  CHECK(both.M == 2.0);
  CHECK(both.norms[0].back() == doctest::Approx(1.0));
  CHECK(both.norms[1].back() == doctest::Approx(std::pow(2.0, -20)));
}

TEST_CASE("constant sequences converge at the smallest grid M") {
  Series c = banach_monomial(3);
  std::vector<Series> seq(5, c);
  ConvergenceReport r =
      silva_convergence_check(seq, c, {0.5, 1.0, 2.0}, 10);
  CHECK(r.mode == ConvergenceReport::Mode::silva);
  CHECK(r.M == 0.5);
}

TEST_CASE("convergence at M implies convergence at coarser grid M'") {
  std::vector<Series> seq;
  for (int j = 1; j <= 20; ++j) seq.push_back(banach_monomial(j));
  Series zero = Series::zero(Alphabet{1}, 1);
  ConvergenceReport r =
      silva_convergence_check(seq, zero, {2.0, 3.0, 4.0}, 25);
  CHECK(r.mode == ConvergenceReport::Mode::silva);
  CHECK(r.M == 2.0);
  // every coarser grid norm sequence also ends below tol
  for (std::size_t g = 0; g < r.grid.size(); ++g)
    CHECK(r.norms[g].back() < r.tol);
}

TEST_CASE("single-element grids report banach mode") {
  std::vector<Series> seq;
  for (int j = 1; j <= 20; ++j) seq.push_back(banach_monomial(j));
  ConvergenceReport r =
      silva_convergence_check(seq, Series::zero(Alphabet{1}, 1), {2.0}, 25);
  CHECK(r.mode == ConvergenceReport::Mode::banach);
  CHECK(r.M == 2.0);
}

TEST_CASE("convergence report serializes its evidence") {
  std::vector<Series> seq = {banach_monomial(1), banach_monomial(2)};
  ConvergenceReport r =
      silva_convergence_check(seq, Series::zero(Alphabet{1}, 1), {1.0}, 10);
  nlohmann::json j = convergence_report_to_json(r);
  CHECK(j["mode"] == "diverged");
  CHECK(j["norm_table"].size() == 1);
  CHECK(j["norm_table"][0]["norms"].size() == 2);
}

TEST_CASE("Frechet membership probe") {
  // Gevrey-0 series: finite at every probed M.
  Series gev0 = geometric_series(2.0, 80);
  FrechetProbeReport r0 = frechet_membership_probe(gev0, {}, 60);
  CHECK(r0.all_finite_up_to_horizon);

  // (c, x1^k) = k!: the scanned levels at M = 1/2 grow like 2^k.
  Series fact = factorial_geometric(1.0, 80);
  FrechetProbeReport r1 = frechet_membership_probe(fact, {0.5}, 40);
  REQUIRE(r1.entries.size() == 1);
  CHECK(r1.entries[0].infinite_trend);
  CHECK(!r1.all_finite_up_to_horizon);

  FrechetProbeReport rz =
      frechet_membership_probe(Series::zero(Alphabet{1}, 1), {}, 10);
  CHECK(rz.all_finite_up_to_horizon);
  for (const auto& e : rz.entries) CHECK(e.estimate.value == 0.0);
}
