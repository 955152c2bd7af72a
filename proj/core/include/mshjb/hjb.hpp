#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mshjb/hamiltonian.hpp"
#include "mshjb/lagrangian.hpp"

namespace mshjb {

/// Rectangular truncation of E = [0,inf)^l with nodes on both boundaries.
/// cells[i] counts cells per axis, so axis i carries cells[i]+1 nodes.
struct Grid {
  std::vector<double> lower;  // componentwise 0
  std::vector<double> upper;
  std::vector<int> cells;

  static Grid box(std::vector<double> upper, std::vector<int> cells);

  int axes() const { return static_cast<int>(cells.size()); }
  long node_count() const;
  int nodes_per_axis(int i) const { return cells[static_cast<std::size_t>(i)] + 1; }
  double spacing(int i) const {
    return (upper[static_cast<std::size_t>(i)] - lower[static_cast<std::size_t>(i)]) /
           cells[static_cast<std::size_t>(i)];
  }
  double min_spacing() const;
  /// Multi-index of a flat node id (row-major, last axis fastest).
  void unflatten(long id, std::span<int> idx) const;
  long flatten(std::span<const int> idx) const;
  /// Coordinates of a node; endpoints land exactly on lower/upper.
  void node(long id, std::span<double> x) const;
  std::vector<double> node(long id) const;

  bool operator==(const Grid& other) const = default;
};

struct GridFunction {
  Grid grid;
  std::vector<double> values;

  static GridFunction constant(const Grid& g, double c);
  /// Fills from a callable x -> double.
  template <typename F>
  static GridFunction sample(const Grid& g, F&& f) {
    GridFunction gf;
    gf.grid = g;
    gf.values.resize(static_cast<std::size_t>(g.node_count()));
    std::vector<double> x(static_cast<std::size_t>(g.axes()));
    for (long i = 0; i < g.node_count(); ++i) {
      g.node(i, x);
      gf.values[static_cast<std::size_t>(i)] = f(std::span<const double>(x));
    }
    return gf;
  }
};

struct SolveReport {
  int iterations = 0;
  double final_update_sup = 0.0;
  double residual_sup = 0.0;  // recomputed post-hoc, not the last estimate
  double dt = 0.0;
  double cfl_dt = 0.0;           // evolution only
  double contraction_bound = 0.0;  // e^{-dt/lambda} for the stationary sweep
  long boundary_projections = 0;   // foot points clamped to the box
  std::vector<double> sigma;       // evolution dissipation coefficients
  std::vector<double> update_history;
  std::vector<std::string> flags;
};

struct StationaryConfig {
  int velocity_cells = 3;   // tensor points per axis inside the velocity box
  double dt = 0.0;          // 0 = auto: min spacing / max velocity
  double tol = 1e-8;        // sup-norm fixed-point tolerance
  int max_iter = 100000;
  int fixed_sweeps = 0;     // > 0: run exactly this many sweeps (no tol stop)
  double p_radius = 3.0;    // momentum box for velocity bounds and transforms
  int bounds_samples = 32;  // Halton probes per node for velocity boxes
  LegendreConfig legendre{.p_radius = 3.0, .tol = 1e-9, .max_iter = 500,
                          .scan_points_per_axis = 3};
  int threads = 1;
};

/// Value-iteration realization of the discounted resolvent. The update at a
/// node x maximizes, over a per-node velocity grid V(x),
///
///   f(x) <- max_v [ (1 - e^{-dt/lambda}) (h(x) - lambda L(x,v))
///                   + e^{-dt/lambda} Interp(f)(x + dt v) ]
///
/// with multilinear interpolation and projection of the foot point onto the
/// grid box. The discount weight is the exact integral of e^{-t/lambda}/lambda
/// over the step, so the sweep is monotone, contracts with factor
/// e^{-dt/lambda} and is nonexpansive in h. Per-node velocity grids and
/// running costs are precomputed once, so repeated solves on the same grid
/// reuse them.
class SemiLagrangianSolver {
 public:
  SemiLagrangianSolver(const Hamiltonian& H, Grid grid, StationaryConfig cfg);

  std::pair<GridFunction, SolveReport> solve(const GridFunction& h,
                                             double lambda) const;

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }

 private:
  struct Arm {
    double cost;                 // L(x, v)
    std::vector<int> base;       // per-axis lower stencil index
    std::vector<double> weight;  // per-axis interpolation weight
  };
  void sweep(const std::vector<double>& h, double lambda, double beta,
             const std::vector<double>& f, std::vector<double>& out) const;

  Grid grid_;
  StationaryConfig cfg_;
  double dt_ = 0.0;
  long clamped_feet_ = 0;
  std::vector<std::vector<Arm>> arms_;  // per node
};

std::pair<GridFunction, SolveReport> solve_stationary(
    const Hamiltonian& H, const GridFunction& h, double lambda,
    const StationaryConfig& cfg = {});

struct EvolutionConfig {
  double cfl = 0.5;
  std::vector<double> sigma_override;  // empty = estimate from u0
  std::vector<double> snapshots;       // requested times, hit exactly
  double dt_override = 0.0;            // 0 = CFL-determined
  int sigma_samples = 64;
  int threads = 1;
};

struct EvolutionResult {
  std::vector<double> times;         // snapshot times, final time last
  std::vector<GridFunction> states;  // one per time
  SolveReport report;
};

/// Explicit Lax-Friedrichs scheme for du/dt = H(x, grad u):
///   u <- u + dt [ H(x, (D- + D+)/2) + sum_i (sigma_i/2)(D+_i - D-_i) ]
/// with one-sided differences at boundary nodes and
/// dt = cfl * min dx / sum sigma. sigma_i is 1.25 * max |dH/dp_i| sampled
/// over the gradient range of u0 unless overridden; if larger gradients are
/// met during the run the result is flagged non-monotone but completes.
EvolutionResult solve_evolution(const Hamiltonian& H, const GridFunction& u0,
                                double T, const EvolutionConfig& cfg = {});

/// Pointwise residual f - lambda H(x, grad f) - h with centered differences
/// at interior nodes and one-sided differences on the boundary.
GridFunction residual_check(const GridFunction& f, const GridFunction& h,
                            double lambda, const Hamiltonian& H,
                            double* sup_out = nullptr);

struct ComparisonResult {
  double sup_diff = 0.0;
  long argmax_node = 0;  // lowest index on ties
};

ComparisonResult discrete_comparison(const GridFunction& u,
                                     const GridFunction& v);

}  // namespace mshjb
