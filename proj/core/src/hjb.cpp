#include "mshjb/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mshjb/errors.hpp"
#include "mshjb/parallel.hpp"
#include "mshjb/quasirandom.hpp"

namespace mshjb {

Grid Grid::box(std::vector<double> upper, std::vector<int> cells) {
  Grid g;
  g.lower.assign(upper.size(), 0.0);
  g.upper = std::move(upper);
  g.cells = std::move(cells);
  if (g.upper.size() != g.cells.size())
    throw ConfigError("grid upper/cells length mismatch");
  for (std::size_t i = 0; i < g.upper.size(); ++i) {
    if (!(g.upper[i] > 0.0)) throw ConfigError("grid upper must exceed lower=0");
    if (g.cells[i] < 3) throw ConfigError("grid needs at least 3 cells per axis");
  }
  return g;
}

long Grid::node_count() const {
  long n = 1;
  for (int c : cells) n *= c + 1;
  return n;
}

double Grid::min_spacing() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < axes(); ++i) m = std::min(m, spacing(i));
  return m;
}

void Grid::unflatten(long id, std::span<int> idx) const {
  for (int i = axes() - 1; i >= 0; --i) {
    int n = nodes_per_axis(i);
    idx[static_cast<std::size_t>(i)] = static_cast<int>(id % n);
    id /= n;
  }
}

long Grid::flatten(std::span<const int> idx) const {
  long id = 0;
  for (int i = 0; i < axes(); ++i)
    id = id * nodes_per_axis(i) + idx[static_cast<std::size_t>(i)];
  return id;
}

void Grid::node(long id, std::span<double> x) const {
  for (int i = axes() - 1; i >= 0; --i) {
    int n = nodes_per_axis(i);
    int k = static_cast<int>(id % n);
    id /= n;
    x[static_cast<std::size_t>(i)] =
        lower[static_cast<std::size_t>(i)] +
        (upper[static_cast<std::size_t>(i)] - lower[static_cast<std::size_t>(i)]) *
            static_cast<double>(k) / cells[static_cast<std::size_t>(i)];
  }
}

std::vector<double> Grid::node(long id) const {
  std::vector<double> x(static_cast<std::size_t>(axes()));
  node(id, x);
  return x;
}

GridFunction GridFunction::constant(const Grid& g, double c) {
  GridFunction gf;
  gf.grid = g;
  gf.values.assign(static_cast<std::size_t>(g.node_count()), c);
  return gf;
}

SemiLagrangianSolver::SemiLagrangianSolver(const Hamiltonian& H, Grid grid,
                                           StationaryConfig cfg)
    : grid_(std::move(grid)), cfg_(cfg) {
  const int l = grid_.axes();
  if (H.slow_dim() != l)
    throw ConfigError("Hamiltonian dimension does not match the grid");
  const long n = grid_.node_count();

  // Velocity candidates per node: tensor grid inside the sampled gradient
  // box, plus v = 0 and the zero-cost velocity grad_p H(x,0).
  std::vector<std::vector<std::vector<double>>> vels(
      static_cast<std::size_t>(n));
  std::vector<double> vmax(static_cast<std::size_t>(l), 0.0);
  std::vector<std::vector<double>> node_vmax(
      static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(l), 0.0));

  parallel_for(n, cfg_.threads, [&](long id) {
    std::vector<double> x(static_cast<std::size_t>(l));
    grid_.node(id, x);
    Box box = velocity_bounds(H, x, cfg_.p_radius, cfg_.bounds_samples);

    auto& list = vels[static_cast<std::size_t>(id)];
    const int k = std::max(2, cfg_.velocity_cells);
    std::vector<double> v(static_cast<std::size_t>(l));
    long total = 1;
    for (int i = 0; i < l; ++i) total *= k;
    for (long c = 0; c < total; ++c) {
      long rem = c;
      for (int i = 0; i < l; ++i) {
        int ci = static_cast<int>(rem % k);
        rem /= k;
        v[static_cast<std::size_t>(i)] =
            box.lo[static_cast<std::size_t>(i)] +
            (box.hi[static_cast<std::size_t>(i)] -
             box.lo[static_cast<std::size_t>(i)]) *
                static_cast<double>(ci) / (k - 1);
      }
      list.push_back(v);
    }
    list.push_back(std::vector<double>(static_cast<std::size_t>(l), 0.0));
    std::vector<double> g0(static_cast<std::size_t>(l));
    H.value_and_grad(x, std::vector<double>(static_cast<std::size_t>(l), 0.0),
                     g0);
    list.push_back(g0);
    for (const auto& vv : list)
      for (int i = 0; i < l; ++i)
        node_vmax[static_cast<std::size_t>(id)][static_cast<std::size_t>(i)] =
            std::max(node_vmax[static_cast<std::size_t>(id)]
                              [static_cast<std::size_t>(i)],
                     std::abs(vv[static_cast<std::size_t>(i)]));
  });
  for (long id = 0; id < n; ++id)
    for (int i = 0; i < l; ++i)
      vmax[static_cast<std::size_t>(i)] =
          std::max(vmax[static_cast<std::size_t>(i)],
                   node_vmax[static_cast<std::size_t>(id)][static_cast<std::size_t>(i)]);

  // Foot points move at most ~one cell per step by default.
  if (cfg_.dt > 0.0) {
    dt_ = cfg_.dt;
  } else {
    double dt = std::numeric_limits<double>::infinity();
    for (int i = 0; i < l; ++i)
      dt = std::min(dt, grid_.spacing(i) / std::max(vmax[static_cast<std::size_t>(i)],
                                                    1e-8));
    dt_ = dt;
  }

  // Precompute running costs and interpolation stencils.
  arms_.resize(static_cast<std::size_t>(n));
  std::vector<long> clamped(static_cast<std::size_t>(n), 0);
  parallel_for(n, cfg_.threads, [&](long id) {
    std::vector<double> x(static_cast<std::size_t>(l));
    grid_.node(id, x);
    auto& out = arms_[static_cast<std::size_t>(id)];
    LegendreConfig lc = cfg_.legendre;
    lc.p_radius = cfg_.p_radius;
    for (const auto& v : vels[static_cast<std::size_t>(id)]) {
      Arm arm;
      LegendreResult lr = legendre(H, x, v, lc);
      arm.cost = std::max(lr.value, 0.0);
      arm.base.resize(static_cast<std::size_t>(l));
      arm.weight.resize(static_cast<std::size_t>(l));
      bool clipped = false;
      for (int i = 0; i < l; ++i) {
        double foot = x[static_cast<std::size_t>(i)] +
                      dt_ * v[static_cast<std::size_t>(i)];
        double lo = grid_.lower[static_cast<std::size_t>(i)];
        double hi = grid_.upper[static_cast<std::size_t>(i)];
        if (foot < lo || foot > hi) {
          clipped = true;
          foot = std::clamp(foot, lo, hi);
        }
        double s = (foot - lo) / grid_.spacing(i);
        int b = std::min(static_cast<int>(s),
                         grid_.cells[static_cast<std::size_t>(i)] - 1);
        b = std::max(b, 0);
        arm.base[static_cast<std::size_t>(i)] = b;
        arm.weight[static_cast<std::size_t>(i)] = s - b;
      }
      if (clipped) clamped[static_cast<std::size_t>(id)]++;
      out.push_back(std::move(arm));
    }
  });
  for (long c : clamped) clamped_feet_ += c;
}

void SemiLagrangianSolver::sweep(const std::vector<double>& h, double lambda,
                                 double beta, const std::vector<double>& f,
                                 std::vector<double>& out) const {
  const long n = grid_.node_count();
  const int l = grid_.axes();
  parallel_for(n, cfg_.threads, [&](long id) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Arm& arm : arms_[static_cast<std::size_t>(id)]) {
      // Multilinear interpolation of f at the precomputed stencil.
      double interp = 0.0;
      const int corners = 1 << l;
      for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        long flat = 0;
        for (int i = 0; i < l; ++i) {
          int bit = (c >> i) & 1;
          w *= bit ? arm.weight[static_cast<std::size_t>(i)]
                   : 1.0 - arm.weight[static_cast<std::size_t>(i)];
          flat = flat * grid_.nodes_per_axis(i) +
                 arm.base[static_cast<std::size_t>(i)] + bit;
        }
        interp += w * f[static_cast<std::size_t>(flat)];
      }
      double cand = (1.0 - beta) * (h[static_cast<std::size_t>(id)] -
                                    lambda * arm.cost) +
                    beta * interp;
      best = std::max(best, cand);
    }
    out[static_cast<std::size_t>(id)] = best;
  });
}

std::pair<GridFunction, SolveReport> SemiLagrangianSolver::solve(
    const GridFunction& h, double lambda) const {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (!(h.grid == grid_)) throw ConfigError("h lives on a different grid");
  const long n = grid_.node_count();
  const double beta = std::exp(-dt_ / lambda);

  GridFunction f = GridFunction::constant(grid_, 0.0);
  std::vector<double> next(static_cast<std::size_t>(n));

  SolveReport rep;
  rep.dt = dt_;
  rep.contraction_bound = beta;
  rep.boundary_projections = clamped_feet_;
  if (clamped_feet_ > 0) rep.flags.push_back("boundary_projection_active");

  const double stop = cfg_.tol * (1.0 - beta);
  const int cap = cfg_.fixed_sweeps > 0 ? cfg_.fixed_sweeps : cfg_.max_iter;
  int it = 0;
  for (; it < cap; ++it) {
    sweep(h.values, lambda, beta, f.values, next);
    double update = 0.0;
    for (long i = 0; i < n; ++i)
      update = std::max(update, std::abs(next[static_cast<std::size_t>(i)] -
                                         f.values[static_cast<std::size_t>(i)]));
    f.values.swap(next);
    rep.update_history.push_back(update);
    rep.final_update_sup = update;
    if (cfg_.fixed_sweeps == 0 && update <= stop) break;
  }
  if (cfg_.fixed_sweeps == 0 && it == cfg_.max_iter)
    throw ConvergenceError("stationary solve did not converge in " +
                           std::to_string(cfg_.max_iter) + " sweeps");
  rep.iterations = std::min(it + 1, cap);

  // Post-hoc residual of the fixed-point map.
  sweep(h.values, lambda, beta, f.values, next);
  double res = 0.0;
  for (long i = 0; i < n; ++i)
    res = std::max(res, std::abs(next[static_cast<std::size_t>(i)] -
                                 f.values[static_cast<std::size_t>(i)]));
  rep.residual_sup = res;
  return {std::move(f), std::move(rep)};
}

std::pair<GridFunction, SolveReport> solve_stationary(
    const Hamiltonian& H, const GridFunction& h, double lambda,
    const StationaryConfig& cfg) {
  SemiLagrangianSolver solver(H, h.grid, cfg);
  return solver.solve(h, lambda);
}

namespace {

// One-sided/centered difference pair along each axis; boundary nodes fall
// back to the interior-side difference for both D- and D+.
void differences(const GridFunction& u, long id, std::span<const int> idx,
                 std::span<double> dminus, std::span<double> dplus) {
  const Grid& g = u.grid;
  for (int i = 0; i < g.axes(); ++i) {
    const int ni = g.nodes_per_axis(i);
    const double dx = g.spacing(i);
    long stride = 1;
    for (int j = g.axes() - 1; j > i; --j) stride *= g.nodes_per_axis(j);
    const int k = idx[static_cast<std::size_t>(i)];
    const double here = u.values[static_cast<std::size_t>(id)];
    double dm, dp;
    if (k > 0)
      dm = (here - u.values[static_cast<std::size_t>(id - stride)]) / dx;
    else
      dm = (u.values[static_cast<std::size_t>(id + stride)] - here) / dx;
    if (k < ni - 1)
      dp = (u.values[static_cast<std::size_t>(id + stride)] - here) / dx;
    else
      dp = (here - u.values[static_cast<std::size_t>(id - stride)]) / dx;
    dminus[static_cast<std::size_t>(i)] = dm;
    dplus[static_cast<std::size_t>(i)] = dp;
  }
}

std::vector<double> estimate_sigma(const Hamiltonian& H, const GridFunction& u0,
                                   int n_samples, int threads) {
  const Grid& g = u0.grid;
  const int l = g.axes();
  const long n = g.node_count();

  // Per-axis range of one-sided differences of u0.
  std::vector<double> p_lo(static_cast<std::size_t>(l),
                           std::numeric_limits<double>::infinity());
  std::vector<double> p_hi(static_cast<std::size_t>(l),
                           -std::numeric_limits<double>::infinity());
  {
    std::vector<int> idx(static_cast<std::size_t>(l));
    std::vector<double> dm(static_cast<std::size_t>(l)),
        dp(static_cast<std::size_t>(l));
    for (long id = 0; id < n; ++id) {
      g.unflatten(id, idx);
      differences(u0, id, idx, dm, dp);
      for (int i = 0; i < l; ++i) {
        p_lo[static_cast<std::size_t>(i)] =
            std::min({p_lo[static_cast<std::size_t>(i)],
                      dm[static_cast<std::size_t>(i)],
                      dp[static_cast<std::size_t>(i)]});
        p_hi[static_cast<std::size_t>(i)] =
            std::max({p_hi[static_cast<std::size_t>(i)],
                      dm[static_cast<std::size_t>(i)],
                      dp[static_cast<std::size_t>(i)]});
      }
    }
  }

  // Sample |dH/dp| over grid nodes x gradient box, corners included.
  std::vector<double> sigma(static_cast<std::size_t>(l), 0.0);
  std::vector<double> u(static_cast<std::size_t>(2 * l));
  std::vector<double> x(static_cast<std::size_t>(l)),
      p(static_cast<std::size_t>(l)), grad(static_cast<std::size_t>(l));
  auto probe = [&](std::span<const double> xx, std::span<const double> pp) {
    H.value_and_grad(xx, pp, grad);
    for (int i = 0; i < l; ++i)
      sigma[static_cast<std::size_t>(i)] =
          std::max(sigma[static_cast<std::size_t>(i)],
                   std::abs(grad[static_cast<std::size_t>(i)]));
  };
  for (int k = 0; k < n_samples; ++k) {
    halton_point(static_cast<std::uint64_t>(k + 1), u);
    for (int i = 0; i < l; ++i) {
      x[static_cast<std::size_t>(i)] =
          g.lower[static_cast<std::size_t>(i)] +
          (g.upper[static_cast<std::size_t>(i)] -
           g.lower[static_cast<std::size_t>(i)]) *
              u[static_cast<std::size_t>(i)];
      p[static_cast<std::size_t>(i)] =
          p_lo[static_cast<std::size_t>(i)] +
          (p_hi[static_cast<std::size_t>(i)] -
           p_lo[static_cast<std::size_t>(i)]) *
              u[static_cast<std::size_t>(l + i)];
    }
    probe(x, p);
  }
  // Gradient-box corners at a few grid corners and the centroid.
  std::vector<std::vector<double>> xs;
  xs.push_back(std::vector<double>(static_cast<std::size_t>(l)));
  for (int i = 0; i < l; ++i)
    xs.back()[static_cast<std::size_t>(i)] =
        0.5 * (g.lower[static_cast<std::size_t>(i)] +
               g.upper[static_cast<std::size_t>(i)]);
  xs.push_back(g.lower);
  xs.push_back(g.upper);
  for (const auto& xx : xs)
    for (int corner = 0; corner < (1 << l); ++corner) {
      for (int i = 0; i < l; ++i)
        p[static_cast<std::size_t>(i)] = ((corner >> i) & 1)
                                             ? p_hi[static_cast<std::size_t>(i)]
                                             : p_lo[static_cast<std::size_t>(i)];
      probe(xx, p);
    }

  for (auto& s : sigma) s *= 1.25;
  (void)threads;
  return sigma;
}

}  // namespace

EvolutionResult solve_evolution(const Hamiltonian& H, const GridFunction& u0,
                                double T, const EvolutionConfig& cfg) {
  if (!(T > 0.0)) throw ConfigError("T must be > 0");
  if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0)
    throw ConfigError("cfl must lie in (0, 1]");
  const Grid& g = u0.grid;
  const int l = g.axes();
  if (H.slow_dim() != l)
    throw ConfigError("Hamiltonian dimension does not match the grid");
  const long n = g.node_count();

  std::vector<double> sigma = cfg.sigma_override;
  if (sigma.empty()) {
    sigma = estimate_sigma(H, u0, cfg.sigma_samples, cfg.threads);
  } else if (static_cast<int>(sigma.size()) != l) {
    throw ConfigError("sigma override must have one entry per axis");
  }

  double sigma_sum = 0.0;
  for (double s : sigma) sigma_sum += s;
  const double cfl_dt =
      cfg.cfl * g.min_spacing() / std::max(sigma_sum, 1e-12);
  double dt = cfl_dt;
  if (cfg.dt_override > 0.0) {
    if (cfg.dt_override > cfl_dt * (1.0 + 1e-12))
      throw ConfigError("forced dt violates the CFL bound");
    dt = cfg.dt_override;
  }

  std::vector<double> stops = cfg.snapshots;
  std::sort(stops.begin(), stops.end());
  for (double t : stops)
    if (!(t >= 0.0) || t > T + 1e-12)
      throw ConfigError("snapshot times must lie in [0, T]");
  if (stops.empty() || std::abs(stops.back() - T) > 1e-12) stops.push_back(T);

  EvolutionResult out;
  out.report.dt = dt;
  out.report.cfl_dt = cfl_dt;
  out.report.sigma = sigma;

  GridFunction u = u0;
  std::vector<double> next(static_cast<std::size_t>(n));
  double t = 0.0;
  bool sigma_underflow = false;
  std::vector<double> sigma_seen(static_cast<std::size_t>(l), 0.0);
  int steps = 0;

  std::vector<double> grad_abs(static_cast<std::size_t>(n) *
                               static_cast<std::size_t>(l));
  auto step = [&](double h_step) {
    parallel_for(n, cfg.threads, [&](long id) {
      std::vector<int> idx(static_cast<std::size_t>(l));
      std::vector<double> dm(static_cast<std::size_t>(l)),
          dp(static_cast<std::size_t>(l)), pm(static_cast<std::size_t>(l)),
          grad(static_cast<std::size_t>(l)), x(static_cast<std::size_t>(l));
      g.unflatten(id, idx);
      g.node(id, x);
      differences(u, id, idx, dm, dp);
      for (int i = 0; i < l; ++i)
        pm[static_cast<std::size_t>(i)] =
            0.5 * (dm[static_cast<std::size_t>(i)] +
                   dp[static_cast<std::size_t>(i)]);
      double hval = H.value_and_grad(x, pm, grad);
      double diss = 0.0;
      for (int i = 0; i < l; ++i) {
        diss += 0.5 * sigma[static_cast<std::size_t>(i)] *
                (dp[static_cast<std::size_t>(i)] - dm[static_cast<std::size_t>(i)]);
        grad_abs[static_cast<std::size_t>(id) * l + static_cast<std::size_t>(i)] =
            std::abs(grad[static_cast<std::size_t>(i)]);
      }
      next[static_cast<std::size_t>(id)] =
          u.values[static_cast<std::size_t>(id)] + h_step * (hval + diss);
    });
    for (long id = 0; id < n; ++id)
      for (int i = 0; i < l; ++i)
        sigma_seen[static_cast<std::size_t>(i)] =
            std::max(sigma_seen[static_cast<std::size_t>(i)],
                     grad_abs[static_cast<std::size_t>(id) * l +
                              static_cast<std::size_t>(i)]);
    u.values.swap(next);
    ++steps;
  };

  for (double stop_t : stops) {
    while (t < stop_t - 1e-14) {
      double h_step = std::min(dt, stop_t - t);
      step(h_step);
      t += h_step;
    }
    out.times.push_back(stop_t);
    out.states.push_back(u);
  }

  for (int i = 0; i < l; ++i)
    if (sigma_seen[static_cast<std::size_t>(i)] >
        sigma[static_cast<std::size_t>(i)] + 1e-12)
      sigma_underflow = true;
  if (sigma_underflow)
    out.report.flags.push_back("sigma-underflow: scheme not monotone");
  out.report.iterations = steps;
  return out;
}

GridFunction residual_check(const GridFunction& f, const GridFunction& h,
                            double lambda, const Hamiltonian& H,
                            double* sup_out) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (!(f.grid == h.grid)) throw ConfigError("f and h live on different grids");
  const Grid& g = f.grid;
  const int l = g.axes();
  const long n = g.node_count();

  GridFunction res = GridFunction::constant(g, 0.0);
  std::vector<int> idx(static_cast<std::size_t>(l));
  std::vector<double> x(static_cast<std::size_t>(l)),
      grad(static_cast<std::size_t>(l));
  double sup = 0.0;
  for (long id = 0; id < n; ++id) {
    g.unflatten(id, idx);
    g.node(id, x);
    // Centered differences inside, one-sided on the boundary.
    for (int i = 0; i < l; ++i) {
      const int k = idx[static_cast<std::size_t>(i)];
      const int ni = g.nodes_per_axis(i);
      const double dx = g.spacing(i);
      long stride = 1;
      for (int j = l - 1; j > i; --j) stride *= g.nodes_per_axis(j);
      if (k > 0 && k < ni - 1)
        grad[static_cast<std::size_t>(i)] =
            (f.values[static_cast<std::size_t>(id + stride)] -
             f.values[static_cast<std::size_t>(id - stride)]) /
            (2.0 * dx);
      else if (k == 0)
        grad[static_cast<std::size_t>(i)] =
            (f.values[static_cast<std::size_t>(id + stride)] -
             f.values[static_cast<std::size_t>(id)]) /
            dx;
      else
        grad[static_cast<std::size_t>(i)] =
            (f.values[static_cast<std::size_t>(id)] -
             f.values[static_cast<std::size_t>(id - stride)]) /
            dx;
    }
    double r = f.values[static_cast<std::size_t>(id)] -
               lambda * H.value(x, grad) - h.values[static_cast<std::size_t>(id)];
    res.values[static_cast<std::size_t>(id)] = r;
    sup = std::max(sup, std::abs(r));
  }
  if (sup_out) *sup_out = sup;
  return res;
}

ComparisonResult discrete_comparison(const GridFunction& u,
                                     const GridFunction& v) {
  if (!(u.grid == v.grid)) throw ConfigError("grid mismatch");
  ComparisonResult out;
  out.sup_diff = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < static_cast<long>(u.values.size()); ++i) {
    double d = u.values[static_cast<std::size_t>(i)] -
               v.values[static_cast<std::size_t>(i)];
    if (d > out.sup_diff) {
      out.sup_diff = d;
      out.argmax_node = i;
    }
  }
  return out;
}

}  // namespace mshjb
