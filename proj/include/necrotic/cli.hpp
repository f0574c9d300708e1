#pragma once

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "necrotic/evolution.hpp"
#include "necrotic/io.hpp"
#include "necrotic/mode_solver.hpp"
#include "necrotic/stationary.hpp"
#include "necrotic/strip_elliptic.hpp"
#include "necrotic/verify.hpp"

namespace necrotic::cli {

enum class Command { kStationary, kModes, kGammaSweep, kVerify, kEvolve, kBifurcationPrep };
enum class Format { kCsv, kJson };

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

inline constexpr int kMinGrid = 8;
inline constexpr int kMaxGrid = 16384;

/// Validated settings of one invocation.
struct RunConfig {
  Command command = Command::kVerify;
  ModelParams params;
  double rho1_star = 1.0;
  int k = 2;
  int k_max = 30;
  int m = 64;
  int n = 64;
  double a_k = 1.0;
  double c_k = 1.0;
  double dt = 0.01;
  int steps = 100;
  int every = 10;
  std::optional<double> gamma1;
  std::optional<double> gamma2;
  double eps = 0.0;
  std::string out;
  Format format = Format::kCsv;
};

/// Output cell: a number or a string.
struct Cell {
  std::optional<double> number;
  std::string text;
  Cell(double v) : number(v) {}  // NOLINT
  Cell(int v) : number(static_cast<double>(v)) {}  // NOLINT
  Cell(std::string s) : text(std::move(s)) {}  // NOLINT
  Cell(const char* s) : text(s) {}  // NOLINT
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// Tables produced by a command; the first one is the main artifact.
struct Output {
  std::vector<Table> tables;
  bool failed = false;
};

namespace detail {

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "sigma_bar", "sigma_tilde", "mu", "rho1_star", "k", "k_max", "m", "n", "a_k", "c_k",
      "dt", "steps", "every", "gamma1", "gamma2", "eps"};
  return keys;
}

inline int grid_size(const io::Config& cfg, const std::string& key, int fallback) {
  const int v = cfg.get_int(key).value_or(fallback);
  if (v < kMinGrid || v > kMaxGrid) {
    throw io::ConfigError(key, key + " must lie in [8, 16384], got " + std::to_string(v));
  }
  return v;
}

inline std::string csv_cell(const Cell& c) {
  return c.number ? io::format_double(*c.number) : c.text;
}

inline std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_cell(row[i]);
    s += '\n';
  }
  return s;
}

inline nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json rec = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].number) {
        const double v = *row[i].number;
        rec[t.header[i]] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(io::format_double(v));
      } else {
        rec[t.header[i]] = row[i].text;
      }
    }
    rows.push_back(std::move(rec));
  }
  return rows;
}

inline Table summary(std::vector<std::pair<std::string, Cell>> entries) {
  Table t{"summary", {"key", "value"}, {}};
  for (auto& [k, v] : entries) t.rows.push_back({Cell(k), std::move(v)});
  return t;
}

}  // namespace detail

/// Merges the config file with flag overrides and checks command-specific keys.
/// Model commands need sigma_bar; sigma_tilde and mu default to 1.
inline RunConfig make_config(Command command, const io::Config& cfg) {
  for (const auto& [key, value] : cfg.entries()) {
    if (!detail::known_keys().count(key)) throw io::ConfigError(key, "unknown config key " + key);
  }
  RunConfig rc;
  rc.command = command;
  if (command == Command::kVerify) {
    rc.params.sigma_bar = cfg.get_double("sigma_bar").value_or(2.0);
  } else {
    rc.params.sigma_bar = cfg.require_double("sigma_bar");
  }
  rc.params.sigma_tilde = cfg.get_double("sigma_tilde").value_or(1.0);
  rc.params.mu = cfg.get_double("mu").value_or(1.0);
  try {
    rc.params.validate();
  } catch (const DomainError& e) {
    const std::string what = e.what();
    const std::string key = what.rfind("mu", 0) == 0            ? "mu"
                            : what.rfind("sigma_tilde", 0) == 0 ? "sigma_tilde"
                                                                : "sigma_bar";
    throw io::ConfigError(key, what);
  }
  rc.rho1_star = cfg.get_double("rho1_star").value_or(1.0);
  if (!(rc.rho1_star > 0.0)) throw io::ConfigError("rho1_star", "rho1_star must be positive");
  rc.k = cfg.get_int("k").value_or(2);
  if (rc.k < 1) throw io::ConfigError("k", "k must be >= 1");
  rc.k_max = cfg.get_int("k_max").value_or(command == Command::kEvolve ? 4 : 30);
  if (rc.k_max < 1) throw io::ConfigError("k_max", "k_max must be >= 1");
  rc.m = detail::grid_size(cfg, "m", 64);
  if (rc.m % 2 != 0) throw io::ConfigError("m", "m must be even");
  rc.n = detail::grid_size(cfg, "n", 64);
  if (command == Command::kBifurcationPrep && rc.n < 16) {
    throw io::ConfigError("n", "bifurcation-prep needs n >= 16");
  }
  rc.a_k = cfg.get_double("a_k").value_or(1.0);
  rc.c_k = cfg.get_double("c_k").value_or(1.0);
  if (command == Command::kModes || command == Command::kGammaSweep) {
    if (rc.a_k == 0.0) throw io::ConfigError("a_k", "a_k must be nonzero");
    if (rc.c_k == 0.0) throw io::ConfigError("c_k", "c_k must be nonzero");
  }
  rc.dt = cfg.get_double("dt").value_or(0.01);
  if (!(rc.dt > 0.0)) throw io::ConfigError("dt", "dt must be positive");
  rc.steps = cfg.get_int("steps").value_or(100);
  if (rc.steps < 0) throw io::ConfigError("steps", "steps must be >= 0");
  rc.every = cfg.get_int("every").value_or(10);
  if (rc.every < 1) throw io::ConfigError("every", "every must be >= 1");
  rc.gamma1 = cfg.get_double("gamma1");
  rc.gamma2 = cfg.get_double("gamma2");
  rc.eps = cfg.get_double("eps").value_or(0.0);
  if (command == Command::kEvolve && rc.k > rc.k_max) {
    throw io::ConfigError("k", "k must not exceed k_max");
  }
  return rc;
}

inline Output run_stationary(const RunConfig& rc) {
  const FlatStationary fs = flat_stationary(rc.params, rc.rho1_star);
  const FlatResiduals res = flat_residuals(fs);
  Table profile{"profile", {"y", "sigma", "p"}, {}};
  for (int l = 0; l <= rc.n; ++l) {
    const double y = l == rc.n ? fs.rho2_star() : fs.rho1_star() + fs.delta() * l / rc.n;
    profile.rows.push_back({y, sigma_star(fs, y), p_star(fs, y)});
  }
  Output out;
  out.tables.push_back(std::move(profile));
  out.tables.push_back(detail::summary({{"delta", fs.delta()},
                                        {"c", fs.c_value()},
                                        {"rho1_star", fs.rho1_star()},
                                        {"rho2_star", fs.rho2_star()},
                                        {"max_boundary_residual", res.max_boundary()},
                                        {"max_ode_residual", res.max_ode()}}));
  return out;
}

inline Output run_modes(const RunConfig& rc) {
  const FlatStationary fs = flat_stationary(rc.params, rc.rho1_star);
  const ModeSolution sol = assemble_mode({rc.k, rc.a_k, 0.0, rc.c_k, 0.0}, fs);
  Table profile{"profile", {"y", "A", "M"}, {}};
  for (int l = 0; l <= rc.n; ++l) {
    const double y = static_cast<double>(l) / rc.n;
    profile.rows.push_back({y, sol.A(y), sol.M(y)});
  }
  Output out;
  out.tables.push_back(std::move(profile));
  out.tables.push_back(detail::summary({{"k", rc.k},
                                        {"a_k", rc.a_k},
                                        {"c_k", rc.c_k},
                                        {"delta", fs.delta()},
                                        {"gamma1", sol.gamma1},
                                        {"gamma2", sol.gamma2}}));
  return out;
}

inline Output run_gamma_sweep(const RunConfig& rc) {
  const FlatStationary fs = flat_stationary(rc.params, rc.rho1_star);
  const auto rows = gamma_sweep(fs, rc.k_max, rc.c_k / rc.a_k);
  Table t{"gamma", {"k", "gamma1", "gamma2"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.k, r.gamma1, r.gamma2});
  Output out;
  out.tables.push_back(std::move(t));
  out.tables.push_back(detail::summary({{"delta", fs.delta()},
                                        {"ratio_ck_ak", rc.c_k / rc.a_k},
                                        {"k0", positivity_threshold(rows)}}));
  return out;
}

inline Output run_verify(const RunConfig& rc) {
  const verify::Report report = verify::run_all(rc.params, rc.rho1_star);
  Table t{"verify", {"suite", "quantity", "value", "relation", "bound", "result"}, {}};
  for (const auto& c : report.checks) {
    t.rows.push_back({c.suite, c.quantity, c.value, c.relation, c.bound, c.pass ? "PASS" : "FAIL"});
  }
  Output out;
  out.tables.push_back(std::move(t));
  out.failed = !report.all_passed();
  return out;
}

inline Output run_evolve(const RunConfig& rc) {
  const FlatStationary fs = flat_stationary(rc.params, rc.rho1_star);
  const double g1 = rc.gamma1.value_or(gamma1(rc.k, fs, rc.c_k / rc.a_k));
  const double g2 = rc.gamma2.value_or(gamma2(rc.k, fs, rc.a_k / rc.c_k));
  const EvolutionModel model{fs, g1, g2, rc.n};

  LinearState state = LinearState::zeros(rc.k_max);
  state.r_coeffs[rc.k] = {rc.a_k, 0.0};
  state.s_coeffs[rc.k] = {rc.c_k, 0.0};
  Table traj{"trajectory", {"time", "k", "a_k", "b_k", "c_k", "d_k"}, {}};
  auto record = [&](const LinearState& s) {
    for (int k = 0; k <= s.K; ++k) {
      traj.rows.push_back({s.time, k, s.r_coeffs[k][0], s.r_coeffs[k][1], s.s_coeffs[k][0],
                           s.s_coeffs[k][1]});
    }
  };
  record(state);
  for (int i = 1; i <= rc.steps; ++i) {
    state = step(state, rc.dt, model);
    // keep the time exact on the recorded grid
    state.time = i * rc.dt;
    if (i % rc.every == 0 || i == rc.steps) record(state);
  }
  Table disp{"dispersion", {"k", "rate"}, {}};
  for (int k = 1; k <= rc.k_max; ++k) disp.rows.push_back({k, growth_rate(k, fs, g1, g2, rc.n)});

  Output out;
  out.tables.push_back(std::move(traj));
  out.tables.push_back(std::move(disp));
  out.tables.push_back(detail::summary({{"gamma1", g1}, {"gamma2", g2}, {"dt", rc.dt}, {"steps", rc.steps}}));
  return out;
}

inline Output run_bifurcation_prep(const RunConfig& rc) {
  const FlatStationary fs = flat_stationary(rc.params, rc.rho1_star);
  const int k = rc.k;
  const double eps = rc.eps;
  const auto rho1 = BoundaryCurve::from_function(
      rc.m, [&](double x) { return fs.rho1_star() + eps * rc.a_k * std::cos(k * x); });
  const auto rho2 = BoundaryCurve::from_function(
      rc.m, [&](double x) { return fs.rho2_star() + eps * rc.c_k * std::cos(k * x); });
  const double g1 = rc.gamma1.value_or(gamma1(k, fs, rc.c_k / rc.a_k));
  const double g2 = rc.gamma2.value_or(gamma2(k, fs, rc.a_k / rc.c_k));

  const EllipticityBounds eb = ellipticity_bounds(build_operator(rho1, rho2, rc.n));
  const PressureTraces traces = pressure_traces(rho1, rho2, rc.params, rc.n);
  const double c0 = balancing_c0(traces, rho2, g2);
  const BifurcationResidual res = residual_from_traces(traces, rho1, rho2, g1, g2, c0, fs.c_value());
  const double phi_prime = phi_prime_up(rho1, rho2, rc.params, rc.n, 1e-4);

  Table t{"residual", {"x", "rho1", "rho2", "res1", "res2"}, {}};
  double n1 = 0.0, n2 = 0.0;
  for (int j = 0; j < rc.m; ++j) {
    t.rows.push_back({BoundaryCurve::node(j, rc.m), rho1[j], rho2[j], res.res1[j], res.res2[j]});
    n1 = std::max(n1, std::fabs(res.res1[j]));
    n2 = std::max(n2, std::fabs(res.res2[j]));
  }
  Output out;
  out.tables.push_back(std::move(t));
  out.tables.push_back(detail::summary({{"phi", traces.phi},
                                        {"phi_prime", phi_prime},
                                        {"lambda", eb.lambda},
                                        {"Lambda", eb.Lambda},
                                        {"min_determinant", eb.min_determinant},
                                        {"gamma1", g1},
                                        {"gamma2", g2},
                                        {"c0", c0},
                                        {"res1_max", n1},
                                        {"res2_max", n2}}));
  return out;
}

inline Output execute(const RunConfig& rc) {
  switch (rc.command) {
    case Command::kStationary: return run_stationary(rc);
    case Command::kModes: return run_modes(rc);
    case Command::kGammaSweep: return run_gamma_sweep(rc);
    case Command::kVerify: return run_verify(rc);
    case Command::kEvolve: return run_evolve(rc);
    case Command::kBifurcationPrep: return run_bifurcation_prep(rc);
  }
  return {};
}

/// Writes the tables. CSV: the first table goes to --out (or stdout), each
/// further table to <out stem>.<name>.csv; on stdout tables are separated by
/// "# name" lines. JSON: one object keyed by table name.
inline void emit(const Output& output, const RunConfig& rc, std::ostream& out) {
  if (rc.format == Format::kJson) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& t : output.tables) doc[t.name] = detail::to_json(t);
    const std::string text = doc.dump(2) + "\n";
    if (rc.out.empty()) {
      out << text;
    } else {
      io::write_atomic(rc.out, text);
    }
    return;
  }
  if (rc.out.empty()) {
    for (std::size_t i = 0; i < output.tables.size(); ++i) {
      if (output.tables.size() > 1) out << (i ? "\n" : "") << "# " << output.tables[i].name << "\n";
      out << detail::to_csv(output.tables[i]);
    }
    return;
  }
  const std::filesystem::path main(rc.out);
  io::write_atomic(main, detail::to_csv(output.tables.front()));
  for (std::size_t i = 1; i < output.tables.size(); ++i) {
    std::filesystem::path side = main;
    side.replace_extension();
    side += "." + output.tables[i].name + ".csv";
    io::write_atomic(side, detail::to_csv(output.tables[i]));
  }
}

/// Entry point shared by the binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Necrotic multi-layer tumor: flat equilibria, mode formulas, strip solvers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::optional<double> sigma_bar, sigma_tilde, mu, rho1_star;
  std::optional<int> k, k_max, m, n;

  const std::vector<std::pair<std::string, Command>> commands{
      {"stationary", Command::kStationary},
      {"modes", Command::kModes},
      {"gamma-sweep", Command::kGammaSweep},
      {"verify", Command::kVerify},
      {"evolve", Command::kEvolve},
      {"bifurcation-prep", Command::kBifurcationPrep}};
  const std::vector<std::string> help{
      "flat stationary solution: delta, c, sigma* and p* profiles",
      "mode-k profiles A_k, M_k and the surface tensions gamma1, gamma2",
      "gamma1(k), gamma2(k) for k = 1..k_max",
      "run the self-check suites and report pass/fail",
      "evolve the linearized interface amplitudes; trajectory and dispersion",
      "Phi, Phi', ellipticity bounds and residual norms on a (perturbed) flat pair"};

  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--sigma-bar", sigma_bar, "nutrient level on the outer interface");
    sub->add_option("--sigma-tilde", sigma_tilde, "proliferation threshold");
    sub->add_option("--mu", mu, "aggressiveness");
    sub->add_option("--rho1-star", rho1_star, "height of the flat necrotic interface");
    sub->add_option("--k", k, "mode number");
    sub->add_option("--k-max", k_max, "largest mode");
    sub->add_option("--m", m, "x grid points");
    sub->add_option("--n", n, "y' grid intervals");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  Command command = Command::kVerify;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) command = commands[i].second;
  }

  RunConfig rc;
  try {
    io::Config cfg = config_path.empty() ? io::Config{} : io::Config::load(config_path);
    auto put = [&cfg](const std::string& key, const auto& v) {
      if (!v) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, int>) {
        cfg.set(key, std::to_string(*v));
      } else {
        cfg.set(key, io::format_double(*v));
      }
    };
    put("sigma_bar", sigma_bar);
    put("sigma_tilde", sigma_tilde);
    put("mu", mu);
    put("rho1_star", rho1_star);
    put("k", k);
    put("k_max", k_max);
    put("m", m);
    put("n", n);
    rc = make_config(command, cfg);
    rc.out = out_path;
    rc.format = format == "json" ? Format::kJson : Format::kCsv;
  } catch (const io::ConfigError& e) {
    err << "config error [" << e.key() << "]: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const Output output = execute(rc);
    emit(output, rc, out);
    if (output.failed) {
      err << "one or more checks failed\n";
      return kExitFailure;
    }
    return kExitOk;
  } catch (const UnsolvableError& e) {
    err << nlohmann::json{{"error", e.what()}, {"defect", e.defect()}}.dump() << "\n";
  } catch (const SolveError& e) {
    err << nlohmann::json{{"error", e.what()}, {"residual", e.residual()}}.dump() << "\n";
  } catch (const std::exception& e) {
    err << nlohmann::json{{"error", e.what()}}.dump() << "\n";
  }
  return kExitFailure;
}

}  // namespace necrotic::cli
