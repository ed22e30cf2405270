#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cfseries/errors.hpp"

namespace cfs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniformly sampled m-channel input on [t0, t0+T], linear-interpolation
// semantics between samples. The drift channel u_0 = 1 is implicit and not
// stored; channel i here means u_i for i = 1..m.
class Signal {
 public:
  Signal() = default;

  Signal(double t0, double dt, std::vector<std::vector<double>> channels)
      : t0_(t0), dt_(dt), channels_(std::move(channels)) {
    if (dt_ <= 0.0) throw FormatError("signal dt must be positive");
    if (channels_.empty()) throw FormatError("signal needs >= 1 channel");
    const std::size_t n = channels_.front().size();
    if (n < 2) throw FormatError("signal needs >= 2 grid points");
    for (const auto& ch : channels_) {
      if (ch.size() != n) throw FormatError("signal channels differ in length");
      for (double v : ch)
        if (!std::isfinite(v)) throw FormatError("signal sample not finite");
    }
    steps_ = static_cast<int>(n) - 1;
  }

  // Grid with no stored input channels: only the drift u_0 = 1 acts.
  static Signal drift_only(double t0, double T, double dt) {
    const int n = grid_steps(T, dt);
    Signal s;
    s.t0_ = t0;
    s.dt_ = T / n;
    s.steps_ = n;
    return s;
  }

  static Signal from_function(std::function<double(double)> f, double t0,
                              double T, double dt) {
    const int n = grid_steps(T, dt);
    std::vector<double> samples(n + 1);
    for (int i = 0; i <= n; ++i) samples[i] = f(t0 + i * (T / n));
    return Signal(t0, T / n, {std::move(samples)});
  }

  static Signal constant(double value, double t0, double T, double dt) {
    return from_function([value](double) { return value; }, t0, T, dt);
  }

  static Signal cosine(double omega, double t0, double T, double dt) {
    return from_function([omega](double t) { return std::cos(omega * t); }, t0,
                         T, dt);
  }

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  int steps() const { return steps_; }
  int grid_size() const { return steps() + 1; }
  double duration() const { return steps() * dt_; }
  int num_channels() const { return static_cast<int>(channels_.size()); }
  double time(int i) const { return t0_ + i * dt_; }

  // Stored input channel, 1-based (u_1..u_m).
  const std::vector<double>& input_channel(int i) const {
    if (i < 1 || i > num_channels())
      throw FormatError("input channel index out of range");
    return channels_[i - 1];
  }

  // Channel by letter index: letter 0 is the implicit drift u_0 = 1.
  std::vector<double> letter_channel(int letter) const {
    if (letter == 0) return std::vector<double>(grid_size(), 1.0);
    return input_channel(letter);
  }

  bool same_grid(const Signal& other) const {
    return steps() == other.steps() && std::abs(t0_ - other.t0_) <= 1e-12 &&
           std::abs(dt_ - other.dt_) <= 1e-12 * dt_;
  }

 private:
  static int grid_steps(double T, double dt) {
    if (T <= 0.0 || dt <= 0.0) throw FormatError("need T > 0 and dt > 0");
    int n = static_cast<int>(std::ceil(T / dt - 1e-9));
    return n < 1 ? 1 : n;
  }

  double t0_ = 0.0;
  double dt_ = 1.0;
  int steps_ = 1;
  std::vector<std::vector<double>> channels_;
};

// Cumulative composite trapezoid of uniformly sampled f; output[0] = 0.
inline std::vector<double> running_integral(const std::vector<double>& f,
                                            double dt) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i)
    out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
  return out;
}

inline double trapezoid(const std::vector<double>& f, double dt) {
  double s = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) s += 0.5 * dt * (f[i - 1] + f[i]);
  return s;
}

struct LpNorm {
  double p = 1.0;
  double value = 0.0;               // max over channels
  std::vector<double> per_channel;  // ||u_i||_p
};

// ||u||_p = max_i ||u_i||_p, trapezoid quadrature for finite p, sample max
// for p = infinity.
inline LpNorm lp_norm(const Signal& u, double p) {
  if (p < 1.0) throw NumericError("lp_norm requires p >= 1");
  LpNorm out;
  out.p = p;
  for (int i = 1; i <= u.num_channels(); ++i) {
    const auto& ch = u.input_channel(i);
    double v;
    if (p == kInf) {
      v = 0.0;
      for (double x : ch) v = std::max(v, std::abs(x));
    } else {
      std::vector<double> integrand(ch.size());
      for (std::size_t j = 0; j < ch.size(); ++j)
        integrand[j] = std::pow(std::abs(ch[j]), p);
      v = std::pow(trapezoid(integrand, u.dt()), 1.0 / p);
    }
    out.per_channel.push_back(v);
    out.value = std::max(out.value, v);
  }
  return out;
}

// Sample-wise L_q distance of two signals on a shared grid (used when the
// outputs of two evaluations are compared).
inline double lq_distance(const std::vector<double>& a,
                          const std::vector<double>& b, double dt, double q) {
  if (a.size() != b.size()) throw FormatError("lq_distance: length mismatch");
  if (q == kInf) {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      v = std::max(v, std::abs(a[i] - b[i]));
    return v;
  }
  std::vector<double> integrand(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    integrand[i] = std::pow(std::abs(a[i] - b[i]), q);
  return std::pow(trapezoid(integrand, dt), 1.0 / q);
}

// q with 1/p + 1/q = 1; q(1) = inf, q(inf) = 1.
inline double conjugate_exponent(double p) {
  if (p < 1.0) throw NumericError("conjugate_exponent requires p >= 1");
  if (p == 1.0) return kInf;
  if (p == kInf) return 1.0;
  return p / (p - 1.0);
}

// --- CSV I/O ---
// Header `t,u1,...,um`; uniform spacing validated at 1e-9 relative.

inline void signal_to_csv(const Signal& u, std::ostream& os,
                          const std::string& value_prefix = "u") {
  os.precision(17);
  os << "t";
  for (int i = 1; i <= u.num_channels(); ++i) os << ',' << value_prefix << i;
  os << '\n';
  for (int j = 0; j < u.grid_size(); ++j) {
    os << u.time(j);
    for (int i = 1; i <= u.num_channels(); ++i)
      os << ',' << u.input_channel(i)[j];
    os << '\n';
  }
}

inline Signal signal_from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty signal CSV");
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.empty()) continue;
    times.push_back(row[0]);
    rows.emplace_back(row.begin() + 1, row.end());
  }
  if (times.size() < 2) throw FormatError("signal CSV needs >= 2 rows");
  const std::size_t m = rows.front().size();
  if (m < 1) throw FormatError("signal CSV needs >= 1 value column");
  for (const auto& r : rows)
    if (r.size() != m) throw FormatError("ragged signal CSV");

  const double dt = (times.back() - times.front()) / (times.size() - 1);
  if (dt <= 0.0) throw FormatError("signal CSV times not increasing");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expect = times.front() + i * dt;
    if (std::abs(times[i] - expect) >
        1e-9 * std::max(1.0, std::abs(times.back())))
      throw FormatError("signal CSV grid is not uniform");
  }
  std::vector<std::vector<double>> channels(m,
                                            std::vector<double>(times.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < m; ++c) channels[c][i] = rows[i][c];
  return Signal(times.front(), dt, std::move(channels));
}

inline Signal load_signal_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open signal CSV: " + path);
  return signal_from_csv(f);
}

}  // namespace cfs
