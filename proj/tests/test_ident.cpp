#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cfseries/ident.hpp"

using namespace cfs;

TEST_CASE("regressor values are iterated integrals") {
  Signal u = Signal::constant(1.0, 0.0, 1.0, 1e-3);

  Regressor r0 = build_regressor(u, {Word::empty()}, 500);
  CHECK(r0.phi.size() == 1);
  CHECK(r0.phi(0) == 1.0);
  CHECK(r0.t == doctest::Approx(0.5));

  Regressor r1 = build_regressor(u, {Word::empty(), Word({1})}, 500);
  CHECK(r1.phi(0) == 1.0);
  CHECK(r1.phi(1) == doctest::Approx(0.5).epsilon(1e-12));

  // Drift powers at t = 1: [1, 1, 1/2].
  Regressor r2 =
      build_regressor(u, {Word::empty(), Word({0}), Word({0, 0})}, 1000);
  CHECK(r2.phi(0) == 1.0);
  CHECK(r2.phi(1) == doctest::Approx(1.0));
  CHECK(r2.phi(2) == doctest::Approx(0.5));

  CHECK_THROWS_AS(build_regressor(u, {Word::empty()}, 1001), FormatError);
}

TEST_CASE("single scalar RLS update") {
  const double delta = 1e3;
  RlsState st = RlsState::init({Word::empty()}, 1, 1.0, delta);
  Regressor reg;
  reg.phi.resize(1);
  reg.phi(0) = 1.0;
  rls_update(st, reg, {3.0});
  CHECK(st.theta(0, 0) == doctest::Approx(3.0 * delta / (1.0 + delta)));
  CHECK(st.P(0, 0) == doctest::Approx(delta / (1.0 + delta)));
  CHECK(st.sample_count == 1);
}

TEST_CASE("zero regressor is a no-information update") {
  RlsState st = RlsState::init({Word::empty(), Word({1})}, 1);
  Regressor reg;
  reg.phi = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd P_before = st.P;
  rls_update(st, reg, {7.0});
  CHECK(st.theta.isZero());
  CHECK(st.P.isApprox(P_before));
}

TEST_CASE("init validates the forgetting factor") {
  CHECK_THROWS_AS(RlsState::init({Word::empty()}, 1, 0.0), NumericError);
  CHECK_THROWS_AS(RlsState::init({Word::empty()}, 1, 1.5), NumericError);
}

TEST_CASE("RLS matches the batch regularized least-squares oracle") {
  std::mt19937 rng(59);
  std::normal_distribution<double> noise(0.0, 0.1);
  const int d = 3, samples = 40;
  const double delta = 1e3;

  Eigen::MatrixXd Phi(samples, d);
  Eigen::VectorXd Y(samples);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    for (int k = 0; k < d; ++k) Phi(i, k) = val(rng);
    Y(i) = 2.0 * Phi(i, 0) - Phi(i, 2) + noise(rng);
  }

  RlsState st = RlsState::init(
      {Word::empty(), Word({0}), Word({1})}, 1, 1.0, delta);
  for (int i = 0; i < samples; ++i) {
    Regressor reg;
    reg.phi = Phi.row(i).transpose();
    rls_update(st, reg, {Y(i)});
  }

  // P0 = delta I makes RLS the exact solver of
  //   min ||Y - Phi theta||^2 + (1/delta)||theta||^2.
  Eigen::MatrixXd A =
      Phi.transpose() * Phi + (1.0 / delta) * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd batch = A.ldlt().solve(Phi.transpose() * Y);
  CHECK((st.theta.col(0) - batch).norm() < 1e-8 * batch.norm());
}

TEST_CASE("identify recovers a polynomial series exactly in its span") {
  Series::TermMap terms;
  terms[Word::empty()] = {0.5};
  terms[Word({1})] = {2.0};
  terms[Word({0, 1})] = {-1.0};
  Series truth = Series::finite(Alphabet{1}, 1, std::move(terms));

  // Multi-tone input over a long window: the ridge bias of the P0 prior
  // shrinks with the smallest Gram eigenvalue, so the input must be
  // persistently exciting for tight recovery.
  Signal u = Signal::from_function(
      [](double t) {
        return 1.5 * std::sin(2.0 * t) + std::cos(7.3 * t) +
               0.8 * std::sin(13.1 * t + 0.5) + 0.4;
      },
      0.0, 4.0, 5e-4);
  EvalResult sim = evaluate_truncated(truth, u, 2);

  IdentResult id = identify(u, sim.y, 2);
  CHECK(!id.ill_conditioned);
  for (const Word& w : enumerate_words_up_to(Alphabet{1}, 2)) {
    // Recovery is exact up to the 1/delta ridge bias of the P0 prior.
    CHECK(id.estimate.coefficient(w)[0] ==
          doctest::Approx(truth.coefficient(w)[0]).epsilon(5e-4).scale(1.0));
  }
  CHECK(id.residual_history.size() == static_cast<std::size_t>(u.grid_size()));
  CHECK(id.residual_history.back() < 1e-3);
}

TEST_CASE("identify on zero output returns the zero polynomial") {
  Signal u = Signal::cosine(4.0, 0.0, 0.5, 1e-3);
  Signal y = Signal::constant(0.0, 0.0, 0.5, 1e-3);
  IdentResult id = identify(u, y, 2);
  CHECK(id.estimate.terms().empty());
}

TEST_CASE("re-evaluating the estimate reproduces the data") {
  Series::TermMap terms;
  terms[Word({0})] = {1.0, -2.0};
  terms[Word({1, 1})] = {0.5, 0.25};
  Series truth = Series::finite(Alphabet{1}, 2, std::move(terms));
  Signal u = Signal::from_function(
      [](double t) {
        return 1.5 * std::sin(2.0 * t) + std::cos(7.3 * t) +
               0.8 * std::sin(13.1 * t + 0.5) + 0.4;
      },
      0.0, 2.0, 5e-4);
  EvalResult sim = evaluate_truncated(truth, u, 2);

  IdentResult id = identify(u, sim.y, 2);
  EvalResult rehat = evaluate_truncated(id.estimate, u, 2);
  for (int j = 1; j <= 2; ++j) {
    double worst = 0.0;
    for (int i = 0; i < u.grid_size(); ++i)
      worst = std::max(worst, std::abs(rehat.y.input_channel(j)[i] -
                                       sim.y.input_channel(j)[i]));
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("identify validates its inputs") {
  Signal u = Signal::cosine(1.0, 0.0, 0.5, 1e-3);
  Signal y = Signal::constant(0.0, 0.0, 0.7, 1e-3);
  CHECK_THROWS_AS(identify(u, y, 1), FormatError);
}
