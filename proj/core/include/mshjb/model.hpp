#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mshjb {

/// One term k * prod x_i^{x_exp[i]} * prod y_j^{y_exp[j]}.
/// Reaction rates require k >= 0; control drifts may carry signed k.
struct Monomial {
  double k = 0.0;
  std::vector<int> x_exp;
  std::vector<int> y_exp;
};

/// Sum of monomials, evaluated at a continuous slow state x and an integer
/// fast state y. Polynomial, hence C^1 in x.
struct RateFunction {
  std::vector<Monomial> monomials;

  double eval(std::span<const double> x, std::span<const int> y) const;
  double eval_slow(std::span<const double> x) const;  // all y_exp must be 0
  bool is_single_monomial() const { return monomials.size() == 1; }
};

/// Reaction classes: slow-only jumps, coupled slow+fast jumps, fast-only
/// jumps. The partition is derived from the jump vectors.
enum class ReactionClass { slow_only, coupled, fast_only };

const char* to_string(ReactionClass c);

struct Reaction {
  std::vector<int> gamma_x;  // slow jump, per-N molecule counts
  std::vector<int> gamma_y;  // fast jump, molecule counts
  RateFunction rate;
  ReactionClass cls = ReactionClass::slow_only;
};

/// Classifies a jump pair; throws ParseError-style logic is left to
/// validate_network (the zero jump has no class).
ReactionClass classify_reaction(std::span<const int> gamma_x,
                                std::span<const int> gamma_y);

/// Two-time-scale reaction network: l slow species (density-scaled), m fast
/// species subject to the conservation law sum_i y_i = M.
struct MultiScaleNetwork {
  int slow_dim = 0;
  int fast_dim = 0;
  long conservation = 0;  // M
  std::vector<Reaction> reactions;
};

/// Structural violations, one message per problem, each carrying the
/// offending reaction index. Empty means all type invariants hold.
std::vector<std::string> validate_network(const MultiScaleNetwork& net);

/// Ordered enumeration of F_M = { n in N^m : sum n_i = M }.
class FastStateSpace {
 public:
  /// Full lexicographic enumeration; throws CapacityError if the
  /// cardinality binomial(M+m-1, m-1) exceeds cap.
  static FastStateSpace enumerate(int m, long M, long cap = 100000);

  int size() const { return static_cast<int>(states_.size()); }
  int fast_dim() const { return m_; }
  long conservation() const { return M_; }
  const std::vector<int>& state(int i) const { return states_[static_cast<std::size_t>(i)]; }
  const std::vector<std::vector<int>>& states() const { return states_; }

  /// Position of a state in the lexicographic order, or -1 if it is not a
  /// member of F_M.
  int index_of(std::span<const int> state) const;

 private:
  int m_ = 0;
  long M_ = 0;
  std::vector<std::vector<int>> states_;
};

struct ConservationReport {
  bool pass = true;
  std::vector<int> offending_reactions;
};

/// Pass iff every coupled or fast-only reaction has sum_i gamma_y[i] = 0.
ConservationReport check_conservation(const MultiScaleNetwork& net);

struct IrreducibilityReport {
  bool pass = false;
  /// Strongly connected components of the positivity graph of R_x,
  /// each a list of fast-state indices.
  std::vector<std::vector<int>> components;
};

/// Builds the directed graph on F_M with an edge y1 -> y2 whenever some
/// coupled or fast-only reaction jumps y1 to y2 at a positive rate r(x,y1),
/// and reports whether it is strongly connected.
IrreducibilityReport check_irreducibility(const MultiScaleNetwork& net,
                                          std::span<const double> x,
                                          const FastStateSpace& fss);

struct ProductFormViolation {
  int reaction = 0;
  int slow_index = 0;
  std::string message;
};

struct ProductFormReport {
  bool pass = true;
  std::vector<ProductFormViolation> violations;
  /// Informational: reactions whose rate is a single monomial, for which
  /// the product factorization is automatic.
  std::vector<bool> single_monomial;
};

/// Decidable surrogate for the rate factorization assumption: whenever a
/// reaction consumes slow species i (gamma_x[i] < 0), every monomial of its
/// rate must carry x_exp[i] >= 1 so the rate vanishes on the face x_i = 0.
ProductFormReport check_product_form(const MultiScaleNetwork& net);

/// Enzyme kinetics with substrate inflow: l=2 (substrate, product),
/// m=2 (enzyme, complex), reactions
///   inflow        gx=(1,0)  gy=(0,0)   rate k0
///   binding       gx=(-1,0) gy=(-1,1)  rate k1*x1*y1
///   unbinding     gx=(1,0)  gy=(1,-1)  rate k2*y2
///   production    gx=(0,1)  gy=(1,-1)  rate k3*y2
MultiScaleNetwork builtin_michaelis_menten(double k0, double k1, double k2,
                                           double k3, long M);

/// Finite control family: H(x,p) = max_a [ -f(x,a).p - l(x,a) ].
struct Control {
  std::string label;
  std::vector<RateFunction> drift;  // f, one (signed) polynomial per slow axis
  RateFunction cost;                // l >= 0, slow variables only
};

struct ControlHamiltonian {
  int slow_dim = 0;
  std::vector<Control> controls;
};

std::vector<std::string> validate_control_hamiltonian(
    const ControlHamiltonian& ch);

}  // namespace mshjb
