#pragma once

#include <span>
#include <string>
#include <vector>

#include "mshjb/hamiltonian.hpp"

namespace mshjb {

struct LegendreConfig {
  double p_radius = 10.0;  // search box |p_i| <= p_radius
  double tol = 1e-8;       // projected-gradient stopping norm
  int max_iter = 500;
  int scan_points_per_axis = 5;  // coarse seeding grid
};

struct LegendreResult {
  double value = 0.0;
  std::vector<double> argmax_p;
  int iterations = 0;
  bool converged = false;
  /// The argmax sits on the search box with the gradient pointing outward;
  /// the true transform may exceed the reported value.
  bool radius_limited = false;
};

/// L(x,v) = sup_p [ <p,v> - H(x,p) ] by projected gradient ascent on the
/// concave objective, seeded with a coarse grid scan (p = 0 always probed).
LegendreResult legendre(const Hamiltonian& H, std::span<const double> x,
                        std::span<const double> v,
                        const LegendreConfig& cfg = {});

/// Discretized path t_0 = 0 < ... < t_K with slow states per sample.
struct PathSample {
  std::vector<double> times;
  std::vector<std::vector<double>> points;
};

struct ActionResult {
  double value = 0.0;  // +inf when a segment is radius-limited
  bool radius_limited = false;
  std::vector<std::string> flags;
};

/// Midpoint-quadrature action sum_k dt_k * L(x_mid, dx_k/dt_k). Segments are
/// independent; the sum accumulates in segment order.
ActionResult path_action(const Hamiltonian& H, const PathSample& path,
                         const LegendreConfig& cfg = {});

struct Box {
  std::vector<double> lo, hi;
};

/// Componentwise range of grad_p H(x,p) over a low-discrepancy sample of the
/// box |p_i| <= p_radius (p = 0 always included), inflated by 10% about the
/// center.
Box velocity_bounds(const Hamiltonian& H, std::span<const double> x,
                    double p_radius, int n_samples = 64);

}  // namespace mshjb
