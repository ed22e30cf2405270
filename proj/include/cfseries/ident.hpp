#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cfseries/errors.hpp"
#include "cfseries/fliess_operator.hpp"
#include "cfseries/series.hpp"
#include "cfseries/signal.hpp"
#include "cfseries/word.hpp"

namespace cfs {

// phi_k = E_{eta_k}[u](t) over an ordered word basis; phi at the empty-word
// index is always 1.
struct Regressor {
  double t = 0.0;
  Eigen::VectorXd phi;
};

inline Regressor build_regressor(IteratedIntegralCache& cache,
                                 const std::vector<Word>& basis, int t_index) {
  const Signal& u = cache.signal();
  if (t_index < 0 || t_index >= u.grid_size())
    throw FormatError("regressor time index out of range");
  Regressor reg;
  reg.t = u.time(t_index);
  reg.phi.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    reg.phi(static_cast<Eigen::Index>(k)) = cache.get(basis[k])[t_index];
  return reg;
}

inline Regressor build_regressor(const Signal& u, const std::vector<Word>& basis,
                                 int t_index) {
  IteratedIntegralCache cache(u);
  return build_regressor(cache, basis, t_index);
}

// Exponentially weighted recursive least squares over a fixed word basis.
// The regressors are shared across output channels, so a single covariance
// P serves all ell estimates.
struct RlsState {
  std::vector<Word> basis;
  Eigen::MatrixXd theta;  // basis x ell
  Eigen::MatrixXd P;
  double lambda = 1.0;
  int sample_count = 0;

  static RlsState init(std::vector<Word> basis, int ell, double lambda = 1.0,
                       double delta = 1e3) {
    if (lambda <= 0.0 || lambda > 1.0)
      throw NumericError("forgetting factor must lie in (0,1]");
    RlsState st;
    const auto d = static_cast<Eigen::Index>(basis.size());
    st.basis = std::move(basis);
    st.theta = Eigen::MatrixXd::Zero(d, ell);
    st.P = delta * Eigen::MatrixXd::Identity(d, d);
    st.lambda = lambda;
    return st;
  }
};

inline void rls_update(RlsState& state, const Regressor& reg,
                       const Coeff& y_obs) {
  if (reg.phi.size() != state.theta.rows() ||
      static_cast<Eigen::Index>(y_obs.size()) != state.theta.cols())
    throw FormatError("rls_update: dimension mismatch");
  const Eigen::VectorXd& phi = reg.phi;
  const double denom = state.lambda + phi.dot(state.P * phi);
  if (!(denom > 1e-300)) throw NumericError("rls_update: gain denominator underflow");
  const Eigen::VectorXd gain = (state.P * phi) / denom;
  for (Eigen::Index j = 0; j < state.theta.cols(); ++j) {
    const double err = y_obs[static_cast<std::size_t>(j)] -
                       phi.dot(state.theta.col(j));
    state.theta.col(j) += gain * err;
  }
  state.P = (state.P - gain * (phi.transpose() * state.P)) / state.lambda;
  state.P = 0.5 * (state.P + state.P.transpose());  // keep P symmetric
  ++state.sample_count;
}

struct IdentResult {
  Series estimate;
  RlsState final_state;
  // Max-over-channels prediction residual per processed sample.
  std::vector<double> residual_history;
  double condition_estimate = 0.0;
  bool ill_conditioned = false;
};

// Runs RLS over the whole grid in time order and returns the estimated
// truncated generating polynomial on the basis X^{<=J}.
inline IdentResult identify(const Signal& u, const Signal& y, int J,
                            double lambda = 1.0,
                            std::uint64_t word_cap = kDefaultWordCap) {
  if (!u.same_grid(y)) throw FormatError("identify: u and y grids differ");
  const Alphabet alphabet{u.num_channels()};
  std::vector<Word> basis = enumerate_words_up_to(alphabet, J, word_cap);
  const int ell = y.num_channels();

  RlsState state = RlsState::init(basis, ell, lambda);
  IteratedIntegralCache cache(u);
  std::vector<double> residuals;
  residuals.reserve(u.grid_size());
  for (int i = 0; i < u.grid_size(); ++i) {
    Regressor reg = build_regressor(cache, basis, i);
    Coeff obs(ell);
    for (int j = 1; j <= ell; ++j) obs[j - 1] = y.input_channel(j)[i];
    double res = 0.0;
    for (Eigen::Index j = 0; j < state.theta.cols(); ++j)
      res = std::max(res, std::abs(obs[static_cast<std::size_t>(j)] -
                                   reg.phi.dot(state.theta.col(j))));
    residuals.push_back(res);
    rls_update(state, reg, obs);
  }

  Series::TermMap terms;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Coeff coeff(ell);
    for (int j = 0; j < ell; ++j)
      coeff[j] = state.theta(static_cast<Eigen::Index>(k), j);
    if (!is_zero_coeff(coeff)) terms[basis[k]] = coeff;
  }

  IdentResult result{Series::finite(alphabet, ell, std::move(terms)),
                     std::move(state), std::move(residuals), 0.0, false};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(result.final_state.P);
  const double smin = svd.singularValues().minCoeff();
  result.condition_estimate =
      smin > 0.0 ? svd.singularValues().maxCoeff() / smin : kInf;
  result.ill_conditioned = !(result.condition_estimate < 1e12);
  return result;
}

}  // namespace cfs
