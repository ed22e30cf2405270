#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfseries/errors.hpp"
#include "cfseries/multipoly.hpp"
#include "cfseries/series.hpp"
#include "cfseries/signal.hpp"

namespace cfs {

// Control-affine polynomial state-space model
//   zdot = g_0(z) + sum_i g_i(z) u_i,   y_j = h_j(z),   z(t0) = z0.
struct StateSpace {
  int n = 0;    // state dimension
  int m = 0;    // number of inputs (g_0 is the drift field)
  int ell = 1;  // number of outputs
  std::vector<std::vector<MultiPoly>> vector_fields;  // g_0..g_m, each n comps
  std::vector<MultiPoly> outputs;                     // h_1..h_ell
  std::vector<double> z0;

  void validate() const {
    if (n < 1) throw FormatError("state dimension must be >= 1");
    if (static_cast<int>(vector_fields.size()) != m + 1)
      throw FormatError("need exactly m+1 vector fields g_0..g_m");
    for (const auto& g : vector_fields) {
      if (static_cast<int>(g.size()) != n)
        throw FormatError("vector field component count != n");
      for (const auto& p : g)
        if (p.nvars() != n) throw FormatError("vector field arity != n");
    }
    if (static_cast<int>(outputs.size()) != ell)
      throw FormatError("output count != ell");
    for (const auto& h : outputs)
      if (h.nvars() != n) throw FormatError("output arity != n");
    if (static_cast<int>(z0.size()) != n)
      throw FormatError("initial state dimension != n");
  }
};

// Generating series of a realization via Eq. (c,eta) = L_{g_{i_1}}..L_{g_{i_k}} h (z0)
// for eta = x_{i_k}...x_{i_1}: reading eta left to right, each appended
// letter contributes the *innermost-first* Lie derivative, so the prefix
// tree of X^{<=J} memoizes the intermediate polynomials.
inline Series series_from_realization(const StateSpace& sys, int J,
                                      std::size_t term_cap = 2'000'000) {
  sys.validate();
  const Alphabet alphabet{sys.m};
  Series::TermMap terms;

  struct Node {
    Word word;
    std::vector<MultiPoly> polys;  // one per output
  };
  std::vector<Node> frontier;
  frontier.push_back({Word::empty(), sys.outputs});

  std::size_t total_terms = 0;
  for (int depth = 0; depth <= J; ++depth) {
    for (const Node& node : frontier) {
      Coeff coeff(sys.ell);
      for (int j = 0; j < sys.ell; ++j) coeff[j] = node.polys[j].eval(sys.z0);
      if (!is_zero_coeff(coeff)) terms[node.word] = coeff;
    }
    if (depth == J) break;
    std::vector<Node> next;
    for (const Node& node : frontier) {
      // Dead subtree: all outputs identically zero stay zero under L_g.
      bool all_zero = true;
      for (const auto& p : node.polys) all_zero &= p.is_zero();
      if (all_zero) continue;
      for (int letter = 0; letter <= sys.m; ++letter) {
        Node child;
        child.word = node.word.append(letter);
        for (const auto& p : node.polys) {
          child.polys.push_back(lie_derivative(p, sys.vector_fields[letter]));
          total_terms += child.polys.back().num_terms();
          if (total_terms > term_cap)
            throw ResourceCapError(
                "symbolic expansion exceeded the polynomial term cap");
        }
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
  return Series::finite(alphabet, sys.ell, std::move(terms));
}

// Classical fixed-step RK4 on the signal grid, u held by linear
// interpolation at half-steps; outputs h_j(z(t)).
inline Signal simulate(const StateSpace& sys, const Signal& u,
                       double blowup_guard = 1e9) {
  sys.validate();
  if (u.num_channels() != sys.m)
    throw FormatError("simulate: signal channel count != m");

  auto rhs = [&](const std::vector<double>& z,
                 const std::vector<double>& uin) {
    std::vector<double> dz(sys.n, 0.0);
    for (int i = 0; i < sys.n; ++i) {
      double v = sys.vector_fields[0][i].eval(z);
      for (int c = 1; c <= sys.m; ++c)
        v += sys.vector_fields[c][i].eval(z) * uin[c - 1];
      dz[i] = v;
    }
    return dz;
  };
  auto u_at = [&](int step, double frac) {
    std::vector<double> uin(sys.m);
    for (int c = 1; c <= sys.m; ++c) {
      const auto& ch = u.input_channel(c);
      uin[c - 1] = frac == 0.0
                       ? ch[step]
                       : (1.0 - frac) * ch[step] + frac * ch[step + 1];
    }
    return uin;
  };

  const double dt = u.dt();
  std::vector<double> z = sys.z0;
  std::vector<std::vector<double>> y(sys.ell,
                                     std::vector<double>(u.grid_size()));
  auto record = [&](int i) {
    for (int j = 0; j < sys.ell; ++j) y[j][i] = sys.outputs[j].eval(z);
  };
  record(0);
  for (int i = 0; i < u.steps(); ++i) {
    const auto u0 = u_at(i, 0.0);
    const auto uh = u_at(i, 0.5);
    const auto u1 = u_at(i, 1.0);
    const auto k1 = rhs(z, u0);
    std::vector<double> zt(sys.n);
    for (int d = 0; d < sys.n; ++d) zt[d] = z[d] + 0.5 * dt * k1[d];
    const auto k2 = rhs(zt, uh);
    for (int d = 0; d < sys.n; ++d) zt[d] = z[d] + 0.5 * dt * k2[d];
    const auto k3 = rhs(zt, uh);
    for (int d = 0; d < sys.n; ++d) zt[d] = z[d] + dt * k3[d];
    const auto k4 = rhs(zt, u1);
    for (int d = 0; d < sys.n; ++d) {
      z[d] += dt / 6.0 * (k1[d] + 2 * k2[d] + 2 * k3[d] + k4[d]);
      if (!(std::abs(z[d]) < blowup_guard))
        throw NumericError("simulate: state exceeded blow-up guard at t=" +
                           std::to_string(u.time(i + 1)));
    }
    record(i + 1);
  }
  return Signal(u.t0(), dt, std::move(y));
}

// --- JSON I/O ---
// Polynomials as term lists {"exps":[ints],"coef":float}.

inline nlohmann::json multipoly_to_json(const MultiPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : p.terms())
    terms.push_back({{"exps", e}, {"coef", c}});
  return terms;
}

inline MultiPoly multipoly_from_json(const nlohmann::json& j, int nvars) {
  MultiPoly p(nvars);
  for (const auto& t : j)
    p.add_term(t.at("exps").get<std::vector<int>>(),
               t.at("coef").get<double>());
  return p;
}

inline nlohmann::json statespace_to_json(const StateSpace& sys) {
  nlohmann::json j;
  j["n"] = sys.n;
  j["m"] = sys.m;
  j["ell"] = sys.ell;
  j["z0"] = sys.z0;
  j["vector_fields"] = nlohmann::json::array();
  for (const auto& g : sys.vector_fields) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& p : g) comps.push_back(multipoly_to_json(p));
    j["vector_fields"].push_back(comps);
  }
  j["outputs"] = nlohmann::json::array();
  for (const auto& h : sys.outputs) j["outputs"].push_back(multipoly_to_json(h));
  return j;
}

inline StateSpace statespace_from_json(const nlohmann::json& j) {
  StateSpace sys;
  sys.n = j.at("n").get<int>();
  sys.m = j.at("m").get<int>();
  sys.ell = j.at("ell").get<int>();
  sys.z0 = j.at("z0").get<std::vector<double>>();
  for (const auto& g : j.at("vector_fields")) {
    std::vector<MultiPoly> comps;
    for (const auto& p : g) comps.push_back(multipoly_from_json(p, sys.n));
    sys.vector_fields.push_back(std::move(comps));
  }
  for (const auto& h : j.at("outputs"))
    sys.outputs.push_back(multipoly_from_json(h, sys.n));
  sys.validate();
  return sys;
}

}  // namespace cfs
