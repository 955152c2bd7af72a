#include <chrono>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mshjb/diagnostics.hpp"
#include "mshjb/errors.hpp"
#include "mshjb/hamiltonian.hpp"
#include "mshjb/hjb.hpp"
#include "mshjb/io.hpp"
#include "mshjb/lagrangian.hpp"
#include "mshjb/model.hpp"
#include "mshjb/rng.hpp"
#include "mshjb/version.hpp"

using namespace mshjb;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string command_line;
  std::string model_hash;
  std::chrono::steady_clock::time_point start;
};

GlobalOpts g_opts;

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(std::stod(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_doubles(csv)) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<std::vector<double>> parse_tuples(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t semi = text.find(';', pos);
    if (semi == std::string::npos) semi = text.size();
    out.push_back(parse_doubles(text.substr(pos, semi - pos)));
    pos = semi + 1;
  }
  if (out.empty()) throw ConfigError("empty tuple list");
  return out;
}

void manifest(JsonWriter& w,
              const std::vector<std::pair<std::string, std::string>>& config) {
  auto ms = std::chrono::duration_cast<std::chrono::microseconds>(
                std::chrono::steady_clock::now() - g_opts.start)
                .count() /
            1000.0;
  w.key("manifest").begin_object();
  w.key("command").value(g_opts.command_line);
  w.key("version").value(MSHJB_VERSION);
  w.key("model_hash").value(g_opts.model_hash);
  w.key("seed").value(static_cast<std::uint64_t>(g_opts.seed));
  w.key("threads").value(g_opts.threads);
  w.key("config").begin_object();
  for (const auto& [k, v] : config) w.key(k).value(v);
  w.end_object();
  w.key("duration_ms").value(ms);
  w.end_object();
}

void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty())
    std::cout << payload << "\n";
  else
    write_file(out_path, payload);
}

// Model-or-control loader shared by the evaluator subcommands.
struct LoadedHamiltonian {
  std::unique_ptr<Hamiltonian> H;
  std::optional<MultiScaleNetwork> net;
  std::optional<FastStateSpace> fss;
};

LoadedHamiltonian load_hamiltonian(const std::string& model_path,
                                   const std::string& control_path) {
  LoadedHamiltonian out;
  if (!model_path.empty() && !control_path.empty())
    throw ConfigError("pass either --model or --control, not both");
  if (model_path.empty() && control_path.empty())
    throw ConfigError("one of --model / --control is required");
  if (!model_path.empty()) {
    std::string text = read_file(model_path);
    g_opts.model_hash = fnv1a_hex(text);
    auto net = parse_model(text);
    auto fss = FastStateSpace::enumerate(net.fast_dim, net.conservation);
    out.net = net;
    out.fss = fss;
    out.H = std::make_unique<NetworkHamiltonian>(std::move(net), std::move(fss));
  } else {
    std::string text = read_file(control_path);
    g_opts.model_hash = fnv1a_hex(text);
    out.H = std::make_unique<FiniteControlHamiltonian>(parse_control(text));
  }
  return out;
}

void write_validation_report(const std::vector<std::string>& violations,
                             const std::string& out_path) {
  JsonWriter w;
  w.begin_object();
  w.key("pass").value(violations.empty());
  w.key("violations").value(violations);
  manifest(w, {});
  w.end_object();
  emit(w.str(), out_path);
}

int cmd_model_mm(const std::string& ks, long M, const std::string& out) {
  auto k = parse_doubles(ks);
  if (k.size() != 4) throw ConfigError("--k needs exactly k0,k1,k2,k3");
  auto net = builtin_michaelis_menten(k[0], k[1], k[2], k[3], M);
  emit(serialize_model(net), out);
  return 0;
}

int cmd_model_validate(const std::string& path, const std::string& out) {
  std::string text = read_file(path);
  g_opts.model_hash = fnv1a_hex(text);
  try {
    parse_model(text);
  } catch (const ParseError& e) {
    write_validation_report(e.violations(), out);
    return 2;
  }
  write_validation_report({}, out);
  return 0;
}

int cmd_ham_eval(const std::string& model, const std::string& control,
                 const std::string& xs, const std::string& ps, double tol,
                 const std::string& out) {
  auto loaded = load_hamiltonian(model, control);
  auto x = parse_doubles(xs);
  auto p = parse_doubles(ps);

  JsonWriter w;
  w.begin_object();
  if (loaded.net) {
    EigenConfig cfg;
    cfg.tol = tol;
    auto hv = eval_H(*loaded.net, *loaded.fss, x, p, cfg);
    w.key("H").value(hv.value);
    w.key("theta_star").value(hv.theta_star);
    w.key("grad_p").value(hv.grad_p);
    w.key("residual").value(hv.residual);
  } else {
    std::vector<double> grad(x.size());
    double value = loaded.H->value_and_grad(x, p, grad);
    auto ce = eval_H_control(
        dynamic_cast<FiniteControlHamiltonian&>(*loaded.H).family(), x, p);
    w.key("H").value(value);
    w.key("argmax").value(ce.argmax_label);
    w.key("grad_p").value(grad);
  }
  manifest(w, {{"x", xs}, {"p", ps}, {"tol", format_double(tol)}});
  w.end_object();
  emit(w.str(), out);
  return 0;
}

int cmd_ham_table(const std::string& model, const std::string& control,
                  const std::string& xs, const std::string& ps,
                  const std::string& out) {
  auto loaded = load_hamiltonian(model, control);
  auto xt = parse_tuples(xs);
  auto pt = parse_tuples(ps);
  const int l = loaded.H->slow_dim();

  std::string csv;
  for (int i = 0; i < l; ++i) csv += "x_" + std::to_string(i + 1) + ",";
  for (int i = 0; i < l; ++i) csv += "p_" + std::to_string(i + 1) + ",";
  csv += "H\n";
  for (const auto& x : xt)
    for (const auto& p : pt) {
      double h = loaded.H->value(x, p);
      for (double v : x) csv += format_double(v) + ",";
      for (double v : p) csv += format_double(v) + ",";
      csv += format_double(h) + "\n";
    }
  emit(csv, out);
  return 0;
}

int cmd_lagrangian_eval(const std::string& model, const std::string& control,
                        const std::string& xs, const std::string& vs,
                        double p_radius, double tol, const std::string& out) {
  auto loaded = load_hamiltonian(model, control);
  auto x = parse_doubles(xs);
  auto v = parse_doubles(vs);
  LegendreConfig cfg;
  cfg.p_radius = p_radius;
  cfg.tol = tol;
  auto lr = legendre(*loaded.H, x, v, cfg);

  std::vector<std::string> flags;
  if (lr.radius_limited) flags.push_back("radius-limited");
  JsonWriter w;
  w.begin_object();
  w.key("value").value(lr.value);
  w.key("flags").value(flags);
  w.key("argmax_p").value(lr.argmax_p);
  w.key("converged").value(lr.converged);
  w.key("iterations").value(lr.iterations);
  manifest(w, {{"x", xs},
               {"v", vs},
               {"p_radius", format_double(p_radius)},
               {"tol", format_double(tol)}});
  w.end_object();
  emit(w.str(), out);
  return 0;
}

int cmd_action(const std::string& model, const std::string& control,
               const std::string& path_file, double p_radius,
               const std::string& out) {
  auto loaded = load_hamiltonian(model, control);
  auto path = read_path_csv(read_file(path_file));
  LegendreConfig cfg;
  cfg.p_radius = p_radius;
  auto act = path_action(*loaded.H, path, cfg);

  JsonWriter w;
  w.begin_object();
  w.key("value").value(act.value);  // null when the action is unbounded
  w.key("flags").value(act.flags);
  manifest(w, {{"path", path_file}, {"p_radius", format_double(p_radius)}});
  w.end_object();
  emit(w.str(), out);
  return 0;
}

void write_solve_report(JsonWriter& w, const SolveReport& rep) {
  w.key("iterations").value(rep.iterations);
  w.key("final_update_sup").value(rep.final_update_sup);
  w.key("residual_sup").value(rep.residual_sup);
  w.key("dt").value(rep.dt);
  w.key("cfl_dt").value(rep.cfl_dt);
  w.key("contraction_bound").value(rep.contraction_bound);
  w.key("boundary_projections").value(rep.boundary_projections);
  w.key("sigma").value(rep.sigma);
  w.key("flags").value(rep.flags);
}

Grid grid_from_flags(const std::string& xmax, const std::string& cells) {
  return Grid::box(parse_doubles(xmax), parse_ints(cells));
}

int cmd_solve_stationary(const std::string& model, const std::string& control,
                         double lambda, const std::string& h_file,
                         double h_const, const std::string& xmax,
                         const std::string& cells, int vgrid, double dt,
                         double tol, double p_radius, const std::string& out,
                         const std::string& report_out) {
  auto loaded = load_hamiltonian(model, control);
  GridFunction h;
  if (!h_file.empty()) {
    h = read_grid_function_csv(read_file(h_file));
  } else {
    if (xmax.empty() || cells.empty())
      throw ConfigError("--rhs-const needs --xmax and --cells");
    h = GridFunction::constant(grid_from_flags(xmax, cells), h_const);
  }

  StationaryConfig cfg;
  cfg.velocity_cells = vgrid;
  cfg.dt = dt;
  cfg.tol = tol;
  cfg.p_radius = p_radius;
  cfg.legendre.p_radius = p_radius;
  cfg.threads = g_opts.threads;
  auto [f, rep] = solve_stationary(*loaded.H, h, lambda, cfg);
  emit(write_grid_function_csv(f), out);

  JsonWriter w;
  w.begin_object();
  write_solve_report(w, rep);
  manifest(w, {{"lambda", format_double(lambda)},
               {"vgrid", std::to_string(vgrid)},
               {"dt", format_double(dt)},
               {"tol", format_double(tol)},
               {"p_radius", format_double(p_radius)}});
  w.end_object();
  emit(w.str(), report_out);
  return 0;
}

int cmd_solve_evolution(const std::string& model, const std::string& control,
                        double T, const std::string& u0_file, double u0_const,
                        const std::string& xmax, const std::string& cells,
                        double cfl, const std::string& sigma,
                        const std::string& snapshots, double dt_override,
                        const std::string& out_prefix,
                        const std::string& report_out) {
  auto loaded = load_hamiltonian(model, control);
  GridFunction u0;
  if (!u0_file.empty()) {
    u0 = read_grid_function_csv(read_file(u0_file));
  } else {
    if (xmax.empty() || cells.empty())
      throw ConfigError("--u0-const needs --xmax and --cells");
    u0 = GridFunction::constant(grid_from_flags(xmax, cells), u0_const);
  }

  EvolutionConfig cfg;
  cfg.cfl = cfl;
  if (!sigma.empty()) cfg.sigma_override = parse_doubles(sigma);
  if (!snapshots.empty()) cfg.snapshots = parse_doubles(snapshots);
  cfg.dt_override = dt_override;
  cfg.threads = g_opts.threads;
  auto res = solve_evolution(*loaded.H, u0, T, cfg);

  for (std::size_t k = 0; k < res.states.size(); ++k) {
    std::string path = out_prefix + "_" + std::to_string(k) + ".csv";
    write_file(path, write_grid_function_csv(res.states[k]));
  }

  JsonWriter w;
  w.begin_object();
  w.key("times").value(res.times);
  write_solve_report(w, res.report);
  manifest(w, {{"T", format_double(T)},
               {"cfl", format_double(cfl)},
               {"sigma", sigma},
               {"snapshots", snapshots}});
  w.end_object();
  emit(w.str(), report_out);
  return 0;
}

int cmd_verify(const std::string& model_path, const std::string& xmax,
               const std::string& cells,
               const std::vector<std::string>& samples,
               const std::string& out) {
  std::string text = read_file(model_path);
  g_opts.model_hash = fnv1a_hex(text);

  MultiScaleNetwork net;
  try {
    net = parse_model(text);
  } catch (const ParseError& e) {
    write_validation_report(e.violations(), out);
    return 2;
  }
  auto fss = FastStateSpace::enumerate(net.fast_dim, net.conservation);
  NetworkHamiltonian H(net, fss, {});

  Grid grid = Grid::box(
      xmax.empty()
          ? std::vector<double>(static_cast<std::size_t>(net.slow_dim), 10.0)
          : parse_doubles(xmax),
      cells.empty()
          ? std::vector<int>(static_cast<std::size_t>(net.slow_dim), 40)
          : parse_ints(cells));

  bool all_pass = true;
  std::vector<std::string> violations;

  auto conservation = check_conservation(net);
  if (!conservation.pass) {
    all_pass = false;
    for (int r : conservation.offending_reactions)
      violations.push_back("conservation violated by reaction " +
                           std::to_string(r));
  }

  auto product = check_product_form(net);
  if (!product.pass) {
    all_pass = false;
    for (const auto& v : product.violations) violations.push_back(v.message);
  }

  // Irreducibility at interior grid points, plus any user samples.
  std::vector<std::vector<double>> sample_points;
  if (net.slow_dim == 1) {
    for (double f : {0.25, 0.5, 0.75})
      sample_points.push_back({grid.upper[0] * f});
  } else {
    for (double fx : {0.25, 0.5, 0.75})
      for (double fy : {0.25, 0.5, 0.75}) {
        std::vector<double> x(static_cast<std::size_t>(net.slow_dim));
        for (int i = 0; i < net.slow_dim; ++i)
          x[static_cast<std::size_t>(i)] =
              grid.upper[static_cast<std::size_t>(i)] * (i % 2 == 0 ? fx : fy);
        sample_points.push_back(x);
      }
  }
  for (const auto& s : samples) sample_points.push_back(parse_doubles(s));
  bool irreducible_all = true;
  for (const auto& x : sample_points) {
    auto rep = check_irreducibility(net, x, fss);
    if (!rep.pass) {
      irreducible_all = false;
      std::string msg = "irreducibility fails at x=(";
      for (std::size_t i = 0; i < x.size(); ++i)
        msg += (i ? "," : "") + format_double(x[i]);
      msg += "): " + std::to_string(rep.components.size()) + " components";
      violations.push_back(msg);
    }
  }
  if (!irreducible_all) all_pass = false;

  // Containment: the assumption asks for the existence of some containment
  // function, so the check passes when either built-in candidate passes.
  ContainmentSpec lq{ContainmentSpec::Kind::log_quadratic};
  ContainmentSpec qq{ContainmentSpec::Kind::quadratic};
  auto rep_lq = check_containment(H, lq, grid, g_opts.threads);
  bool qq_ok = true;
  double qq_c = 0.0, qq_interior = 0.0, qq_shell = 0.0;
  try {
    auto rep_qq = check_containment(H, qq, grid, g_opts.threads);
    qq_ok = rep_qq.pass;
    qq_c = rep_qq.c_estimate;
    qq_interior = rep_qq.interior_max;
    qq_shell = rep_qq.shell_max;
  } catch (const OverflowError&) {
    qq_ok = false;  // quadratic tilts overflow on wide grids; candidate fails
  }
  bool containment_pass = rep_lq.pass || qq_ok;
  if (!containment_pass) {
    all_pass = false;
    violations.push_back("no containment candidate passes the shell test");
  }

  Rng rng(g_opts.seed);
  std::vector<std::vector<double>> xs;
  for (int k = 0; k < 10; ++k) {
    std::vector<double> x(static_cast<std::size_t>(net.slow_dim));
    for (int i = 0; i < net.slow_dim; ++i)
      x[static_cast<std::size_t>(i)] =
          rng.uniform(0.1, 0.9) * grid.upper[static_cast<std::size_t>(i)];
    xs.push_back(x);
  }
  ConvexityZeroConfig ccfg;
  ccfg.triples_per_x = 50;
  ccfg.seed = g_opts.seed + 1;
  auto convexity = check_convexity_and_zero(H, xs, ccfg);
  if (!convexity.pass) {
    all_pass = false;
    violations.push_back("convexity/normalization check failed");
  }

  JsonWriter w;
  w.begin_object();
  w.key("pass").value(all_pass);
  w.key("violations").value(violations);
  w.key("checks").begin_object();
  w.key("conservation").value(conservation.pass);
  w.key("product_form").value(product.pass);
  w.key("irreducibility").value(irreducible_all);
  w.key("containment").begin_object();
  w.key("pass").value(containment_pass);
  w.key("log_quadratic").begin_object();
  w.key("pass").value(rep_lq.pass);
  w.key("c_estimate").value(rep_lq.c_estimate);
  w.key("interior_max").value(rep_lq.interior_max);
  w.key("shell_max").value(rep_lq.shell_max);
  w.end_object();
  w.key("quadratic").begin_object();
  w.key("pass").value(qq_ok);
  w.key("c_estimate").value(qq_c);
  w.key("interior_max").value(qq_interior);
  w.key("shell_max").value(qq_shell);
  w.end_object();
  w.end_object();
  w.key("convexity_and_zero").begin_object();
  w.key("pass").value(convexity.pass);
  w.key("worst_zero").value(convexity.worst_zero);
  w.key("worst_convexity").value(convexity.worst_convexity);
  w.end_object();
  w.end_object();
  manifest(w, {{"xmax", xmax}, {"cells", cells}});
  w.end_object();
  emit(w.str(), out);
  return all_pass ? 0 : 2;
}

int cmd_doubling(const std::string& model, const std::string& control,
                 const std::string& u_file, const std::string& v_file,
                 const std::string& upsilon, const std::string& eps,
                 const std::string& alpha, double tol_hdiff,
                 const std::string& out, const std::string& csv_out) {
  auto loaded = load_hamiltonian(model, control);
  auto u = read_grid_function_csv(read_file(u_file));
  auto v = read_grid_function_csv(read_file(v_file));

  ContainmentSpec spec;
  if (upsilon == "log-quadratic")
    spec.kind = ContainmentSpec::Kind::log_quadratic;
  else if (upsilon == "quadratic")
    spec.kind = ContainmentSpec::Kind::quadratic;
  else
    throw ConfigError("--upsilon must be log-quadratic or quadratic");

  DoublingConfig cfg;
  cfg.tol_h_diff = tol_hdiff;
  cfg.threads = g_opts.threads;
  auto rep = doubling_certificate(u, v, spec, parse_doubles(eps),
                                  parse_doubles(alpha), *loaded.H, cfg);

  if (!csv_out.empty())
    write_file(csv_out, write_doubling_csv(rep.rows, loaded.H->slow_dim()));

  JsonWriter w;
  w.begin_object();
  w.key("pass").value(rep.pass);
  w.key("flags").value(rep.flags);
  w.key("rows").begin_array();
  for (const auto& row : rep.rows) {
    w.begin_object();
    w.key("eps").value(row.eps);
    w.key("alpha").value(row.alpha);
    w.key("x").value(row.x);
    w.key("y").value(row.y);
    w.key("phi").value(row.phi);
    w.key("penalty").value(row.penalty);
    w.key("H_sub").value(row.h_sub);
    w.key("H_super").value(row.h_super);
    w.key("H_diff").value(row.h_diff);
    w.end_object();
  }
  w.end_array();
  manifest(w, {{"upsilon", upsilon},
               {"eps", eps},
               {"alpha", alpha},
               {"tol_hdiff", format_double(tol_hdiff)}});
  w.end_object();
  emit(w.str(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  g_opts.start = std::chrono::steady_clock::now();
  for (int i = 0; i < argc; ++i) {
    if (i) g_opts.command_line += ' ';
    g_opts.command_line += argv[i];
  }

  CLI::App app{"mshjb: variational Hamiltonians of two-time-scale reaction "
               "networks and their Hamilton-Jacobi-Bellman equations"};
  app.require_subcommand(1);
  app.add_option("--seed", g_opts.seed, "seed for all randomized sampling");
  app.add_option("--threads", g_opts.threads, "worker threads for grid sweeps");

  auto* model_cmd = app.add_subcommand("model", "model files");
  model_cmd->fallthrough();
  model_cmd->require_subcommand(1);
  std::string mm_k = "1,1,1,1", mm_out;
  long mm_M = 1;
  auto* mm = model_cmd->add_subcommand("mm", "write the enzyme-kinetics model");
  mm->fallthrough();
  mm->add_option("--k", mm_k, "k0,k1,k2,k3")->required();
  mm->add_option("--M", mm_M, "fast conservation constant")->required();
  mm->add_option("--out", mm_out, "output model file");
  std::string validate_path, validate_out;
  auto* validate = model_cmd->add_subcommand("validate", "validate a model file");
  validate->fallthrough();
  validate->add_option("file", validate_path)->required();
  validate->add_option("--out", validate_out, "report file");

  auto* ham = app.add_subcommand("ham", "Hamiltonian evaluation");
  ham->fallthrough();
  ham->require_subcommand(1);
  std::string he_model, he_control, he_x, he_p, he_out;
  double he_tol = 1e-12;
  auto* heval = ham->add_subcommand("eval", "evaluate H(x,p)");
  heval->fallthrough();
  heval->add_option("--model", he_model, "reaction-network model file");
  heval->add_option("--control", he_control, "control-family file");
  heval->add_option("--x", he_x, "slow state")->required();
  heval->add_option("--p", he_p, "momentum")->required();
  heval->add_option("--tol", he_tol, "eigenvalue residual tolerance");
  heval->add_option("--out", he_out);
  std::string ht_model, ht_control, ht_xs, ht_ps, ht_out;
  auto* htable = ham->add_subcommand("table", "tabulate H over x,p tuples");
  htable->fallthrough();
  htable->add_option("--model", ht_model);
  htable->add_option("--control", ht_control);
  htable->add_option("--xs", ht_xs, "semicolon-separated x tuples")->required();
  htable->add_option("--ps", ht_ps, "semicolon-separated p tuples")->required();
  htable->add_option("--out", ht_out);

  auto* lag = app.add_subcommand("lagrangian", "Legendre transform");
  lag->fallthrough();
  lag->require_subcommand(1);
  std::string le_model, le_control, le_x, le_v, le_out;
  double le_radius = 10.0, le_tol = 1e-8;
  auto* leval = lag->add_subcommand("eval", "evaluate L(x,v)");
  leval->fallthrough();
  leval->add_option("--model", le_model);
  leval->add_option("--control", le_control);
  leval->add_option("--x", le_x)->required();
  leval->add_option("--v", le_v)->required();
  leval->add_option("--p-radius", le_radius);
  leval->add_option("--tol", le_tol);
  leval->add_option("--out", le_out);

  std::string ac_model, ac_control, ac_path, ac_out;
  double ac_radius = 10.0;
  auto* action = app.add_subcommand("action", "path action integral");
  action->fallthrough();
  action->add_option("--model", ac_model);
  action->add_option("--control", ac_control);
  action->add_option("--path", ac_path, "path CSV (t,x_1..x_l)")->required();
  action->add_option("--p-radius", ac_radius);
  action->add_option("--out", ac_out);

  auto* solve = app.add_subcommand("solve", "HJB solvers");
  solve->fallthrough();
  solve->require_subcommand(1);
  std::string ss_model, ss_control, ss_h, ss_xmax, ss_cells, ss_out, ss_report;
  double ss_lambda = 1.0, ss_hconst = 0.0, ss_dt = 0.0, ss_tol = 1e-8,
         ss_radius = 3.0;
  int ss_vgrid = 3;
  auto* sstat = solve->add_subcommand("stationary",
                                      "discounted stationary equation");
  sstat->fallthrough();
  sstat->add_option("--model", ss_model);
  sstat->add_option("--control", ss_control);
  sstat->add_option("--lambda", ss_lambda)->required();
  sstat->add_option("--rhs", ss_h, "right-hand side CSV");
  sstat->add_option("--rhs-const", ss_hconst, "constant right-hand side");
  sstat->add_option("--xmax", ss_xmax, "grid upper bounds");
  sstat->add_option("--cells", ss_cells, "cells per axis");
  sstat->add_option("--vgrid", ss_vgrid, "velocity grid points per axis");
  sstat->add_option("--dt", ss_dt, "semi-Lagrangian step (0 = auto)");
  sstat->add_option("--tol", ss_tol);
  sstat->add_option("--p-radius", ss_radius);
  sstat->add_option("--out", ss_out, "solution CSV");
  sstat->add_option("--report", ss_report, "solve report JSON");

  std::string se_model, se_control, se_u0, se_xmax, se_cells, se_sigma,
      se_snapshots, se_out = "evolution", se_report;
  double se_T = 1.0, se_u0const = 0.0, se_cfl = 0.5, se_dt = 0.0;
  auto* sevol = solve->add_subcommand("evolution", "time-dependent equation");
  sevol->fallthrough();
  sevol->add_option("--model", se_model);
  sevol->add_option("--control", se_control);
  sevol->add_option("--T", se_T)->required();
  sevol->add_option("--u0", se_u0, "initial data CSV");
  sevol->add_option("--u0-const", se_u0const);
  sevol->add_option("--xmax", se_xmax);
  sevol->add_option("--cells", se_cells);
  sevol->add_option("--cfl", se_cfl);
  sevol->add_option("--sigma", se_sigma, "dissipation override per axis");
  sevol->add_option("--snapshots", se_snapshots, "snapshot times");
  sevol->add_option("--dt", se_dt, "forced time step (checked against CFL)");
  sevol->add_option("--out", se_out, "output prefix for snapshot CSVs");
  sevol->add_option("--report", se_report);

  std::string vf_model, vf_xmax, vf_cells, vf_out;
  std::vector<std::string> vf_samples;
  auto* verify = app.add_subcommand("verify", "aggregated assumption checks");
  verify->fallthrough();
  verify->add_option("--model", vf_model)->required();
  verify->add_option("--xmax", vf_xmax);
  verify->add_option("--cells", vf_cells);
  verify->add_option("--sample", vf_samples,
                     "extra slow-state sample for irreducibility");
  verify->add_option("--out", vf_out);

  std::string db_model, db_control, db_u, db_v, db_upsilon = "log-quadratic",
              db_eps = "0.1,0.01", db_alpha = "1,10,100,1000,10000", db_out,
              db_csv;
  double db_tol = 1e-2;
  auto* doubling = app.add_subcommand("doubling",
                                      "doubling-of-variables certificate");
  doubling->fallthrough();
  doubling->add_option("--model", db_model);
  doubling->add_option("--control", db_control);
  doubling->add_option("--u", db_u, "subsolution-side CSV")->required();
  doubling->add_option("--v", db_v, "supersolution-side CSV")->required();
  doubling->add_option("--upsilon", db_upsilon);
  doubling->add_option("--eps", db_eps);
  doubling->add_option("--alpha", db_alpha);
  doubling->add_option("--tol-hdiff", db_tol);
  doubling->add_option("--out", db_out);
  doubling->add_option("--csv", db_csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (mm->parsed()) return cmd_model_mm(mm_k, mm_M, mm_out);
    if (validate->parsed()) return cmd_model_validate(validate_path, validate_out);
    if (heval->parsed())
      return cmd_ham_eval(he_model, he_control, he_x, he_p, he_tol, he_out);
    if (htable->parsed())
      return cmd_ham_table(ht_model, ht_control, ht_xs, ht_ps, ht_out);
    if (leval->parsed())
      return cmd_lagrangian_eval(le_model, le_control, le_x, le_v, le_radius,
                                 le_tol, le_out);
    if (action->parsed())
      return cmd_action(ac_model, ac_control, ac_path, ac_radius, ac_out);
    if (sstat->parsed())
      return cmd_solve_stationary(ss_model, ss_control, ss_lambda, ss_h,
                                  ss_hconst, ss_xmax, ss_cells, ss_vgrid,
                                  ss_dt, ss_tol, ss_radius, ss_out, ss_report);
    if (sevol->parsed())
      return cmd_solve_evolution(se_model, se_control, se_T, se_u0, se_u0const,
                                 se_xmax, se_cells, se_cfl, se_sigma,
                                 se_snapshots, se_dt, se_out, se_report);
    if (verify->parsed())
      return cmd_verify(vf_model, vf_xmax, vf_cells, vf_samples, vf_out);
    if (doubling->parsed())
      return cmd_doubling(db_model, db_control, db_u, db_v, db_upsilon, db_eps,
                          db_alpha, db_tol, db_out, db_csv);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
