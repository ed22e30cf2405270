// cfseries command-line tool: evaluate, analyze, and identify generating
// series. Every command is deterministic given its inputs; errors are
// reported as machine-readable JSON on stderr with exit codes
//   0 ok, 2 usage/format, 3 numeric or horizon error, 4 resource cap.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfseries/cfseries.hpp"

namespace fs = std::filesystem;
using namespace cfs;

namespace {

Series load_series(const std::string& spec) {
  if (fs::exists(spec)) {
    std::ifstream f(spec);
    if (!f) throw FormatError("cannot open series file: " + spec);
    nlohmann::json j;
    f >> j;
    return series_from_json(j);
  }
  return parse_builtin_series(spec);
}

// Analytic input generators addressable by name: constant(a), cos(w),
// poly(c0,c1,...). Anything else is treated as a CSV path.
Signal load_input(const std::string& spec, double t0, double T, double dt) {
  auto open = spec.find('(');
  if (open == std::string::npos || fs::exists(spec))
    return load_signal_csv(spec);
  const std::string name = spec.substr(0, open);
  auto close = spec.find(')', open);
  if (close == std::string::npos)
    throw FormatError("unterminated argument list in '" + spec + "'");
  std::vector<double> args;
  std::stringstream as(spec.substr(open + 1, close - open - 1));
  std::string cell;
  while (std::getline(as, cell, ',')) args.push_back(std::stod(cell));
  if (name == "constant") {
    if (args.size() != 1) throw FormatError("constant(a) takes one argument");
    return Signal::constant(args[0], t0, T, dt);
  }
  if (name == "cos") {
    if (args.size() != 1) throw FormatError("cos(w) takes one argument");
    return Signal::cosine(args[0], t0, T, dt);
  }
  if (name == "poly") {
    if (args.empty()) throw FormatError("poly(c0,...) needs coefficients");
    return Signal::from_function(
        [args](double t) {
          double v = 0.0;
          for (std::size_t i = args.size(); i-- > 0;) v = v * t + args[i];
          return v;
        },
        t0, T, dt);
  }
  throw FormatError("unknown input generator '" + spec + "'");
}

std::vector<double> parse_grid(const std::string& spec) {
  // "a..b" inclusive integer range, or a comma list of reals.
  auto dots = spec.find("..");
  std::vector<double> grid;
  if (dots != std::string::npos) {
    const int a = std::stoi(spec.substr(0, dots));
    const int b = std::stoi(spec.substr(dots + 2));
    if (b < a) throw FormatError("empty grid range '" + spec + "'");
    for (int v = a; v <= b; ++v) grid.push_back(v);
    return grid;
  }
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) grid.push_back(std::stod(cell));
  if (grid.empty()) throw FormatError("empty grid '" + spec + "'");
  return grid;
}

void write_json(const nlohmann::json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw FormatError("cannot write " + out);
  f << j.dump(2) << '\n';
}

void write_signal(const Signal& y, const std::string& path,
                  const std::string& prefix) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot write " + path);
  signal_to_csv(y, f, prefix);
}

nlohmann::json norm_to_json(const NormEstimate& n) {
  nlohmann::json j;
  j["value"] = n.value;
  j["status"] = to_string(n.status);
  j["horizon"] = n.horizon;
  if (n.attained_at) j["attained_at"] = render_word(*n.attained_at);
  return j;
}

struct CommonSignalFlags {
  double t0 = 0.0;
  double T = 1.0;
  double dt = 1e-3;

  void attach(CLI::App* cmd) {
    cmd->add_option("--t0", t0, "start time for generated inputs");
    cmd->add_option("--T", T, "duration for generated inputs");
    cmd->add_option("--dt", dt, "grid step for generated inputs");
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Chen-Fliess series toolkit"};
  app.require_subcommand(1);

  // --- eval ---
  auto* eval_cmd = app.add_subcommand(
      "eval", "truncated operator evaluation with a certified tail bound");
  std::string eval_series, eval_input, eval_out = "y.csv", eval_sidecar;
  int eval_N = 30, eval_m = -1;
  CommonSignalFlags eval_sig;
  eval_cmd->add_option("--series", eval_series,
                       "series JSON file or builtin name")->required();
  eval_cmd->add_option("--input", eval_input,
                       "input CSV file or generator spec")->required();
  eval_cmd->add_option("--N", eval_N, "truncation length");
  eval_cmd->add_option("--effective-m", eval_m,
                       "letter count for the radius arithmetic");
  eval_cmd->add_option("--out", eval_out, "output trajectory CSV");
  eval_cmd->add_option("--sidecar", eval_sidecar,
                       "JSON sidecar path (default <out>.json)");
  eval_sig.attach(eval_cmd);

  // --- norm ---
  auto* norm_cmd =
      app.add_subcommand("norm", "scan the l_infty,M norm of a series");
  std::string norm_series, norm_out;
  double norm_M = 1.0;
  int norm_horizon = 20;
  norm_cmd->add_option("--series", norm_series)->required();
  norm_cmd->add_option("--M", norm_M, "geometric weight M");
  norm_cmd->add_option("--horizon", norm_horizon, "scan limit J");
  norm_cmd->add_option("--out", norm_out, "write JSON here instead of stdout");

  // --- converge ---
  auto* conv_cmd = app.add_subcommand(
      "converge", "Silva/Banach convergence probe of a series sequence");
  std::string conv_dir, conv_limit, conv_grid = "1..8", conv_out;
  int conv_horizon = 30;
  double conv_tol = 1e-6;
  conv_cmd->add_option("--sequence", conv_dir,
                       "directory of series JSON files, name order")
      ->required();
  conv_cmd->add_option("--limit", conv_limit,
                       "limit series JSON file or builtin")->required();
  conv_cmd->add_option("--grid", conv_grid, "M grid, 'a..b' or comma list");
  conv_cmd->add_option("--horizon", conv_horizon);
  conv_cmd->add_option("--tol", conv_tol);
  conv_cmd->add_option("--out", conv_out);

  // --- gevrey ---
  auto* gev_cmd = app.add_subcommand(
      "gevrey", "fit a growth certificate (K, M, s) to coefficient data");
  std::string gev_series, gev_out;
  int gev_horizon = 40;
  gev_cmd->add_option("--series", gev_series)->required();
  gev_cmd->add_option("--horizon", gev_horizon);
  gev_cmd->add_option("--out", gev_out);

  // --- realize ---
  auto* real_cmd = app.add_subcommand(
      "realize", "generating series of a polynomial state-space model");
  std::string real_system, real_out;
  int real_J = 8;
  real_cmd->add_option("--system", real_system, "StateSpace JSON file")
      ->required();
  real_cmd->add_option("--J", real_J, "maximum word length");
  real_cmd->add_option("--out", real_out);

  // --- identify ---
  auto* id_cmd = app.add_subcommand(
      "identify", "RLS identification of a truncated series from data");
  std::string id_u, id_y, id_out, id_residuals = "residuals.csv";
  int id_J = 2;
  double id_lambda = 1.0;
  id_cmd->add_option("--u", id_u, "input signal CSV")->required();
  id_cmd->add_option("--y", id_y, "output signal CSV")->required();
  id_cmd->add_option("--J", id_J, "basis word length");
  id_cmd->add_option("--lambda", id_lambda, "forgetting factor in (0,1]");
  id_cmd->add_option("--out", id_out, "estimated series JSON");
  id_cmd->add_option("--residuals", id_residuals, "residual history CSV");

  // --- probe ---
  auto* probe_cmd = app.add_subcommand(
      "probe", "input-output continuity table under scaled perturbations");
  std::string probe_series, probe_input, probe_scales = "1e-1,1e-2,1e-3,1e-4";
  std::string probe_out;
  double probe_p = 2.0;
  int probe_N = 15, probe_m = -1;
  CommonSignalFlags probe_sig;
  probe_cmd->add_option("--series", probe_series)->required();
  probe_cmd->add_option("--input", probe_input)->required();
  probe_cmd->add_option("--scales", probe_scales,
                        "comma list of perturbation amplitudes");
  probe_cmd->add_option("--p", probe_p, "input exponent (output uses q)");
  probe_cmd->add_option("--N", probe_N, "truncation length");
  probe_cmd->add_option("--effective-m", probe_m);
  probe_cmd->add_option("--out", probe_out, "table CSV (default stdout)");
  probe_sig.attach(probe_cmd);

  // --- repro-fig1 ---
  auto* fig_cmd = app.add_subcommand(
      "repro-fig1",
      "fixed-input example: truncated outputs y_j vs the limit y");
  double fig_Ma = 1.0, fig_Mb = 7.0, fig_omega = 10.0, fig_T = 0.2 * M_PI;
  double fig_dt = 1e-4;
  int fig_N = 50;
  std::string fig_js = "1,2,5,10,100", fig_outdir = ".";
  fig_cmd->add_option("--Ma", fig_Ma);
  fig_cmd->add_option("--Mb", fig_Mb);
  fig_cmd->add_option("--omega", fig_omega);
  fig_cmd->add_option("--T", fig_T);
  fig_cmd->add_option("--dt", fig_dt);
  fig_cmd->add_option("--N", fig_N, "truncation length");
  fig_cmd->add_option("--js", fig_js, "sequence indices");
  fig_cmd->add_option("--outdir", fig_outdir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", "usage"}, {"message", e.what()}}
                     .dump()
              << '\n';
    return 2;
  }

  if (app.got_subcommand(eval_cmd)) {
    Series c = load_series(eval_series);
    Signal u = load_input(eval_input, eval_sig.t0, eval_sig.T, eval_sig.dt);
    EvalResult r = evaluate_truncated(c, u, eval_N, eval_m);
    write_signal(r.y, eval_out, "y");
    if (eval_sidecar.empty()) eval_sidecar = eval_out + ".json";
    write_json(eval_result_sidecar(r), eval_sidecar);
    return 0;
  }

  if (app.got_subcommand(norm_cmd)) {
    NormEstimate n =
        ell_infty_M_norm(load_series(norm_series), norm_M, norm_horizon);
    write_json(norm_to_json(n), norm_out);
    return 0;
  }

  if (app.got_subcommand(conv_cmd)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(conv_dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
    if (files.empty())
      throw FormatError("no series JSON files in " + conv_dir);
    std::sort(files.begin(), files.end());
    std::vector<Series> sequence;
    for (const auto& f : files) sequence.push_back(load_series(f.string()));
    ConvergenceReport r =
        silva_convergence_check(sequence, load_series(conv_limit),
                                parse_grid(conv_grid), conv_horizon, conv_tol);
    write_json(convergence_report_to_json(r), conv_out);
    return 0;
  }

  if (app.got_subcommand(gev_cmd)) {
    GevreyFit fit = fit_growth_certificate(load_series(gev_series), gev_horizon);
    nlohmann::json j;
    j["K"] = fit.cert.K;
    j["M"] = fit.cert.M;
    j["s"] = fit.cert.s;
    j["locally_convergent_range"] = fit.lc_range;
    j["levels_used"] = fit.levels_used;
    write_json(j, gev_out);
    return 0;
  }

  if (app.got_subcommand(real_cmd)) {
    std::ifstream f(real_system);
    if (!f) throw FormatError("cannot open system file: " + real_system);
    nlohmann::json sys_json;
    f >> sys_json;
    Series c = series_from_realization(statespace_from_json(sys_json), real_J);
    write_json(series_to_json(c), real_out);
    return 0;
  }

  if (app.got_subcommand(id_cmd)) {
    IdentResult r =
        identify(load_signal_csv(id_u), load_signal_csv(id_y), id_J, id_lambda);
    nlohmann::json j = series_to_json(r.estimate);
    j["condition_estimate"] = r.condition_estimate;
    j["ill_conditioned"] = r.ill_conditioned;
    write_json(j, id_out);
    std::ofstream rf(id_residuals);
    if (!rf) throw FormatError("cannot write " + id_residuals);
    rf.precision(17);
    rf << "sample,residual\n";
    for (std::size_t i = 0; i < r.residual_history.size(); ++i)
      rf << i << ',' << r.residual_history[i] << '\n';
    return 0;
  }

  if (app.got_subcommand(probe_cmd)) {
    Series c = load_series(probe_series);
    Signal u = load_input(probe_input, probe_sig.t0, probe_sig.T, probe_sig.dt);
    std::vector<Signal> perturbed;
    for (double eps : parse_grid(probe_scales)) {
      std::vector<std::vector<double>> ch;
      for (int i = 1; i <= u.num_channels(); ++i) {
        std::vector<double> v = u.input_channel(i);
        for (int k = 0; k < u.grid_size(); ++k)
          v[k] += eps * std::cos(5.0 * u.time(k));
        ch.push_back(std::move(v));
      }
      perturbed.emplace_back(u.t0(), u.dt(), std::move(ch));
    }
    auto rows = continuity_probe(c, u, perturbed, probe_p, probe_N, probe_m);
    std::ostringstream table;
    table.precision(17);
    table << "input_dist,output_dist\n";
    for (const auto& row : rows)
      table << row.input_dist << ',' << row.output_dist << '\n';
    if (probe_out.empty()) {
      std::cout << table.str();
    } else {
      std::ofstream f(probe_out);
      if (!f) throw FormatError("cannot write " + probe_out);
      f << table.str();
    }
    return 0;
  }

  if (app.got_subcommand(fig_cmd)) {
    Signal u = Signal::cosine(fig_omega, 0.0, fig_T, fig_dt);
    Series limit = factorial_geometric_truncated(fig_Mb, fig_N);
    GrowthCertificate cert{1.0, fig_Mb, 1.0};
    RadiusCheck rc = radius_check(cert, u, 0);
    EvalResult limit_eval = evaluate_truncated(limit, u, fig_N, 0);
    write_signal(limit_eval.y, fig_outdir + "/y_limit.csv", "y");

    std::ofstream tf(fig_outdir + "/fig1_table.csv");
    if (!tf) throw FormatError("cannot write " + fig_outdir + "/fig1_table.csv");
    tf.precision(17);
    tf << "j,Mj,sup_diff\n";
    for (double jd : parse_grid(fig_js)) {
      const int j = static_cast<int>(jd);
      const double theta = (j - 1.0) / j;
      const double Mj = fig_Mb * theta + fig_Ma * (1.0 - theta);
      EvalResult rj =
          evaluate_truncated(factorial_geometric_truncated(Mj, fig_N), u,
                             fig_N, 0);
      write_signal(rj.y, fig_outdir + "/y_j" + std::to_string(j) + ".csv", "y");
      const double sup = lq_distance(rj.y.input_channel(1),
                                     limit_eval.y.input_channel(1), u.dt(),
                                     kInf);
      tf << j << ',' << Mj << ',' << sup << '\n';
    }
    nlohmann::json summary;
    summary["u_l1"] = rc.u_l1;
    summary["T"] = rc.T;
    summary["threshold"] = rc.threshold;
    summary["radius_ok"] = rc.ok;
    summary["N"] = fig_N;
    std::cout << summary.dump(2) << '\n';
    return 0;
  }

  return 2;  // unreachable: require_subcommand
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ResourceCapError& e) {
    std::cerr << nlohmann::json{{"error", "resource_cap"},
                                {"message", e.what()}}
                     .dump()
              << '\n';
    return 4;
  } catch (const HorizonError& e) {
    std::cerr << nlohmann::json{{"error", "horizon"}, {"message", e.what()}}
                     .dump()
              << '\n';
    return 3;
  } catch (const NumericError& e) {
    std::cerr << nlohmann::json{{"error", "numeric"}, {"message", e.what()}}
                     .dump()
              << '\n';
    return 3;
  } catch (const FormatError& e) {
    std::cerr << nlohmann::json{{"error", "usage"}, {"message", e.what()}}
                     .dump()
              << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}
                     .dump()
              << '\n';
    return 2;
  }
}
