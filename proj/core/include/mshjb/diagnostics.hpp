#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mshjb/hamiltonian.hpp"
#include "mshjb/hjb.hpp"

namespace mshjb {

/// Candidate containment function with hard-coded gradient.
///   log_quadratic: U(x) = (1/2) log(1 + sum x_i^2),  grad = x / (1+|x|^2)
///   quadratic:     U(x) = (1/2) sum x_i^2,           grad = x
struct ContainmentSpec {
  enum class Kind { log_quadratic, quadratic };
  Kind kind = Kind::log_quadratic;

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  const char* name() const {
    return kind == Kind::log_quadratic ? "log-quadratic" : "quadratic";
  }
};

struct ContainmentReport {
  double c_estimate = 0.0;  // max over grid nodes of H(x, grad U(x))
  std::vector<double> argmax_x;
  double interior_max = 0.0;
  double shell_max = 0.0;  // over nodes within the outer 20% of some axis
  bool pass = false;       // shell max does not exceed the interior max
};

ContainmentReport check_containment(const Hamiltonian& H,
                                    const ContainmentSpec& spec,
                                    const Grid& grid, int threads = 1);

struct ConvexityZeroConfig {
  int triples_per_x = 200;
  double p_radius = 2.0;
  std::uint64_t seed = 0;
  double tol_zero = 1e-10;
  double tol_convexity = 1e-9;
};

struct ConvexityZeroReport {
  double worst_zero = 0.0;       // max |H(x,0)|
  double worst_convexity = 0.0;  // max H(x, tp1+(1-t)p2) - tH1 - (1-t)H2
  bool pass = false;
};

/// Random-segment convexity probes plus the H(x,0) = 0 normalization check.
ConvexityZeroReport check_convexity_and_zero(
    const Hamiltonian& H, const std::vector<std::vector<double>>& xs,
    const ConvexityZeroConfig& cfg = {});

struct DoublingRow {
  double eps = 0.0;
  double alpha = 0.0;
  std::vector<double> x, y;  // optimizer pair
  double phi = 0.0;          // attained value of the doubling functional
  double penalty = 0.0;      // (alpha/2) d^2(x,y)
  double h_sub = 0.0;        // H(x_a, p), p = alpha (x_a - y_a)
  double h_super = 0.0;      // H(y_a, p)
  double h_diff = 0.0;       // h_sub - h_super
};

struct DoublingConfig {
  double tol_h_diff = 1e-2;
  long pair_cap = 100000000;  // n_nodes^2 evaluations per (eps, alpha)
  int threads = 1;
};

struct DoublingReport {
  std::vector<DoublingRow> rows;  // ordered by eps then increasing alpha
  bool pass = false;
  std::vector<std::string> flags;
};

/// Exhaustive doubling-of-variables certificate. For each (eps, alpha)
/// maximizes over grid-node pairs
///   Phi(x,y) = u(x)/(1-eps) - v(y)/(1+eps) - (alpha/2) d^2(x,y)
///              - eps/(1-eps) U(x) - eps/(1+eps) U(y)
/// and records optimizers, penalty decay and the Hamiltonian difference at
/// p = alpha (x_a - y_a). Passes when, per eps, penalties are non-increasing
/// over the top half of the alpha list and the final difference is <= tol.
DoublingReport doubling_certificate(const GridFunction& u,
                                    const GridFunction& v,
                                    const ContainmentSpec& spec,
                                    std::span<const double> eps_list,
                                    std::span<const double> alpha_list,
                                    const Hamiltonian& H,
                                    const DoublingConfig& cfg = {});

struct LscSequence {
  std::vector<std::vector<double>> xs, ps;
  std::vector<ThetaMeasure> thetas;
  std::vector<double> limit_x, limit_p;
  ThetaMeasure limit_theta;
};

struct LscReport {
  bool pass = false;
  bool inconclusive = false;
  double limit_value = 0.0;            // (I - Lambda) at the limit
  std::vector<double> tail_values;     // (I - Lambda) along the tail
  std::vector<std::string> flags;
};

/// Lower-semicontinuity spot check of I - Lambda along a user-supplied
/// convergent sequence: min over the tail must not undershoot the limit
/// value by more than tol. Degenerate-support evaluations mark the result
/// inconclusive instead of failing.
LscReport lsc_spot_check(const MultiScaleNetwork& net, const FastStateSpace& fss,
                         const LscSequence& seq, double tol = 1e-4);

}  // namespace mshjb
