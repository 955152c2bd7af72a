#pragma once

#include <span>
#include <string>
#include <vector>

#include "mshjb/model.hpp"

namespace mshjb {

/// Probability vector over the fast state space.
struct ThetaMeasure {
  std::vector<double> weights;
};

/// The matrix diag(V(.;x,p)) + L_{x,p} over F_M whose principal eigenvalue
/// is H(x,p).
///
///   V[y]       = sum over slow-only and coupled reactions of
///                r(x,y,g) * (exp(<p,gx>) - 1)
///   L[y, y+gy] = sum over coupled reactions of r(x,y,g) * exp(<p,gx>)
///              + sum over fast-only reactions of r(x,y,g)
///
/// Off-diagonal entries of L are >= 0 and each row sums to zero.
struct TiltedOperator {
  int dim = 0;
  std::vector<double> V;  // potential, one entry per fast state
  std::vector<double> L;  // row-major dim x dim tilted fast generator
  std::vector<double> x;
  std::vector<double> p;

  double l(int i, int j) const {
    return L[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
             static_cast<std::size_t>(j)];
  }
};

/// Throws OverflowError if any tilt exponent |<p,gamma_x>| exceeds 700.
TiltedOperator assemble_tilted(const MultiScaleNetwork& net,
                               const FastStateSpace& fss,
                               std::span<const double> x,
                               std::span<const double> p);

struct EigenConfig {
  double tol = 1e-12;
  int max_iter = 200000;
};

struct PrincipalEigen {
  double value = 0.0;
  std::vector<double> right;  // strictly positive under irreducibility, max-entry 1
  std::vector<double> left;   // scaled so that sum(left .* right) = 1
  double residual = 0.0;      // recomputed ||Q r - value r||_inf
  int iterations = 0;
  bool positive = true;  // false when an eigenvector touches zero (reducible x)
};

/// Principal (maximal-real-part) eigenvalue of diag(V)+L by shifted power
/// iteration on Q + sI with s = 1 + max|Q_yy|; the left vector comes from
/// the transposed iteration. Throws ConvergenceError / ReducibleError.
PrincipalEigen principal_eigen(const TiltedOperator& op, double tol,
                               int max_iter);

struct HamiltonianValue {
  double value = 0.0;
  std::vector<double> right;       // max-entry 1
  std::vector<double> left;        // sum(left .* right) = 1
  std::vector<double> theta_star;  // left .* right
  std::vector<double> grad_p;
  double residual = 0.0;
  int iterations = 0;
  bool positive = true;
};

/// H(x,p) with optimizer data. grad_p uses the eigenvalue perturbation
/// identity dH/dp_i = left' (dQ/dp_i) right with left'right = 1.
HamiltonianValue eval_H(const MultiScaleNetwork& net, const FastStateSpace& fss,
                        std::span<const double> x, std::span<const double> p,
                        const EigenConfig& cfg = {});

/// Lambda(x,p,theta) = sum_y theta[y] V[y;x,p].
double eval_Lambda(const MultiScaleNetwork& net, const FastStateSpace& fss,
                   std::span<const double> x, std::span<const double> p,
                   const ThetaMeasure& theta);

/// Donsker-Varadhan cost
///   I(x,p,theta) = -inf_phi sum_y theta[y] [ sum_{y'!=y} L[y,y'] e^{phi_y'-phi_y} + L[y,y] ].
/// Convex minimization in log coordinates with gauge phi[0] = 0, Newton with
/// line search, warm-started at phi = log(right eigenvector of the tilt).
/// Requires a strictly positive theta (DegenerateSupportError otherwise).
double eval_I(const MultiScaleNetwork& net, const FastStateSpace& fss,
              std::span<const double> x, std::span<const double> p,
              const ThetaMeasure& theta, double tol = 1e-11,
              int max_iter = 200);

struct SupThetaGap {
  double hamiltonian = 0.0;  // eval_H value
  double best = 0.0;         // max sampled Lambda - I
  double gap = 0.0;          // hamiltonian - best
  std::vector<double> sampled_values;  // Lambda - I per sample, theta* last
};

/// Samples n strictly positive theta from a symmetric Dirichlet(1)
/// generator, always appending theta*, and reports the duality gap.
SupThetaGap sup_theta_gap(const MultiScaleNetwork& net,
                          const FastStateSpace& fss, std::span<const double> x,
                          std::span<const double> p, int n_samples,
                          std::uint64_t seed, const EigenConfig& cfg = {});

struct ControlEval {
  double value = 0.0;
  int argmax_index = 0;
  std::string argmax_label;
};

/// Exact maximum over the finite control list of -f(x,a).p - l(x,a);
/// ties break to the lowest control index.
ControlEval eval_H_control(const ControlHamiltonian& ch,
                           std::span<const double> x,
                           std::span<const double> p);

/// Evaluator interface shared by the Legendre transform, the PDE solvers
/// and the diagnostics. Implementations must be pure and thread-safe.
class Hamiltonian {
 public:
  virtual ~Hamiltonian() = default;
  virtual int slow_dim() const = 0;
  virtual double value(std::span<const double> x,
                       std::span<const double> p) const = 0;
  /// Returns H(x,p) and writes dH/dp into grad (length slow_dim).
  virtual double value_and_grad(std::span<const double> x,
                                std::span<const double> p,
                                std::span<double> grad) const = 0;
};

/// Eigenvalue Hamiltonian of a two-time-scale network.
class NetworkHamiltonian final : public Hamiltonian {
 public:
  NetworkHamiltonian(MultiScaleNetwork net, FastStateSpace fss,
                     EigenConfig cfg = {});

  int slow_dim() const override { return net_.slow_dim; }
  double value(std::span<const double> x,
               std::span<const double> p) const override;
  double value_and_grad(std::span<const double> x, std::span<const double> p,
                        std::span<double> grad) const override;

  const MultiScaleNetwork& network() const { return net_; }
  const FastStateSpace& fast_states() const { return fss_; }
  const EigenConfig& config() const { return cfg_; }

 private:
  MultiScaleNetwork net_;
  FastStateSpace fss_;
  EigenConfig cfg_;
};

/// Finite control-list Hamiltonian sup_a [ -f(x,a).p - l(x,a) ]; the
/// reported gradient is the envelope derivative -f(x,a*) at the argmax.
class FiniteControlHamiltonian final : public Hamiltonian {
 public:
  explicit FiniteControlHamiltonian(ControlHamiltonian ch);

  int slow_dim() const override { return ch_.slow_dim; }
  double value(std::span<const double> x,
               std::span<const double> p) const override;
  double value_and_grad(std::span<const double> x, std::span<const double> p,
                        std::span<double> grad) const override;

  const ControlHamiltonian& family() const { return ch_; }

 private:
  ControlHamiltonian ch_;
};

}  // namespace mshjb
