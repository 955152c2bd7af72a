#include "mshjb/model.hpp"

#include <algorithm>
#include <cmath>

#include "mshjb/errors.hpp"

namespace mshjb {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

bool all_zero(std::span<const int> v) {
  return std::all_of(v.begin(), v.end(), [](int c) { return c == 0; });
}

long binomial_capped(long n, long k, long cap) {
  // binomial(n, k) but saturating at cap+1 to avoid overflow.
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long r = 1;
  for (long i = 1; i <= k; ++i) {
    // r * (n - k + i) cannot overflow for the sizes reachable before the cap
    // saturates (cap defaults to 1e5).
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace

double RateFunction::eval(std::span<const double> x,
                          std::span<const int> y) const {
  double total = 0.0;
  for (const auto& m : monomials) {
    double term = m.k;
    for (std::size_t i = 0; i < m.x_exp.size(); ++i)
      term *= ipow(x[i], m.x_exp[i]);
    for (std::size_t j = 0; j < m.y_exp.size(); ++j)
      term *= ipow(static_cast<double>(y[j]), m.y_exp[j]);
    total += term;
  }
  return total;
}

double RateFunction::eval_slow(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& m : monomials) {
    double term = m.k;
    for (std::size_t i = 0; i < m.x_exp.size(); ++i)
      term *= ipow(x[i], m.x_exp[i]);
    total += term;
  }
  return total;
}

const char* to_string(ReactionClass c) {
  switch (c) {
    case ReactionClass::slow_only:
      return "slow_only";
    case ReactionClass::coupled:
      return "coupled";
    case ReactionClass::fast_only:
      return "fast_only";
  }
  return "?";
}

ReactionClass classify_reaction(std::span<const int> gamma_x,
                                std::span<const int> gamma_y) {
  const bool x_zero = all_zero(gamma_x);
  const bool y_zero = all_zero(gamma_y);
  if (y_zero && !x_zero) return ReactionClass::slow_only;
  if (x_zero && !y_zero) return ReactionClass::fast_only;
  return ReactionClass::coupled;  // both nonzero; the zero jump is rejected upstream
}

std::vector<std::string> validate_network(const MultiScaleNetwork& net) {
  std::vector<std::string> v;
  if (net.slow_dim < 1) v.push_back("slow_dim must be a positive integer");
  if (net.fast_dim < 1) v.push_back("fast_dim must be a positive integer");
  if (net.conservation < 0) v.push_back("conservation_M must be >= 0");
  if (net.reactions.empty()) v.push_back("at least one reaction is required");
  for (std::size_t r = 0; r < net.reactions.size(); ++r) {
    const auto& rx = net.reactions[r];
    const std::string tag = "reaction " + std::to_string(r) + ": ";
    if (static_cast<int>(rx.gamma_x.size()) != net.slow_dim)
      v.push_back(tag + "gamma_x length mismatch (dimension mismatch)");
    if (static_cast<int>(rx.gamma_y.size()) != net.fast_dim)
      v.push_back(tag + "gamma_y length mismatch (dimension mismatch)");
    if (all_zero(rx.gamma_x) && all_zero(rx.gamma_y))
      v.push_back(tag + "zero jump");
    if (rx.rate.monomials.empty())
      v.push_back(tag + "rate has no monomials");
    for (std::size_t m = 0; m < rx.rate.monomials.size(); ++m) {
      const auto& mono = rx.rate.monomials[m];
      if (mono.k < 0.0)
        v.push_back(tag + "negative coefficient in monomial " +
                    std::to_string(m));
      if (!std::isfinite(mono.k))
        v.push_back(tag + "non-finite coefficient in monomial " +
                    std::to_string(m));
      if (static_cast<int>(mono.x_exp.size()) != net.slow_dim)
        v.push_back(tag + "x_exp length mismatch (dimension mismatch)");
      if (static_cast<int>(mono.y_exp.size()) != net.fast_dim)
        v.push_back(tag + "y_exp length mismatch (dimension mismatch)");
      for (int e : mono.x_exp)
        if (e < 0) v.push_back(tag + "negative x exponent");
      for (int e : mono.y_exp)
        if (e < 0) v.push_back(tag + "negative y exponent");
    }
    // Conservation of fast molecules for reactions that move them.
    if (static_cast<int>(rx.gamma_y.size()) == net.fast_dim &&
        !(all_zero(rx.gamma_x) && all_zero(rx.gamma_y))) {
      ReactionClass cls = classify_reaction(rx.gamma_x, rx.gamma_y);
      if (cls != ReactionClass::slow_only) {
        long s = 0;
        for (int g : rx.gamma_y) s += g;
        if (s != 0) v.push_back(tag + "conservation violated (sum gamma_y = " +
                                std::to_string(s) + ")");
      }
    }
  }
  return v;
}

FastStateSpace FastStateSpace::enumerate(int m, long M, long cap) {
  if (m < 1) throw ConfigError("fast_dim must be >= 1");
  if (M < 0) throw ConfigError("conservation_M must be >= 0");
  long count = binomial_capped(M + m - 1, m - 1, cap);
  if (count > cap)
    throw CapacityError("fast state space exceeds cap of " +
                        std::to_string(cap) + " states");
  FastStateSpace fss;
  fss.m_ = m;
  fss.M_ = M;
  fss.states_.reserve(static_cast<std::size_t>(count));
  std::vector<int> cur(static_cast<std::size_t>(m), 0);
  // Lexicographic ascending enumeration of compositions of M into m parts.
  auto rec = [&](auto&& self, int pos, long rest) -> void {
    if (pos == m - 1) {
      cur[static_cast<std::size_t>(pos)] = static_cast<int>(rest);
      fss.states_.push_back(cur);
      return;
    }
    for (long v = 0; v <= rest; ++v) {
      cur[static_cast<std::size_t>(pos)] = static_cast<int>(v);
      self(self, pos + 1, rest - v);
    }
  };
  rec(rec, 0, M);
  return fss;
}

int FastStateSpace::index_of(std::span<const int> state) const {
  // States are lexicographically sorted, so binary search suffices.
  auto cmp = [](const std::vector<int>& a, std::span<const int> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  auto it = std::lower_bound(states_.begin(), states_.end(), state, cmp);
  if (it == states_.end() || it->size() != state.size() ||
      !std::equal(it->begin(), it->end(), state.begin()))
    return -1;
  return static_cast<int>(it - states_.begin());
}

ConservationReport check_conservation(const MultiScaleNetwork& net) {
  ConservationReport rep;
  for (std::size_t r = 0; r < net.reactions.size(); ++r) {
    const auto& rx = net.reactions[r];
    ReactionClass cls = classify_reaction(rx.gamma_x, rx.gamma_y);
    if (cls == ReactionClass::slow_only) continue;
    long s = 0;
    for (int g : rx.gamma_y) s += g;
    if (s != 0) {
      rep.pass = false;
      rep.offending_reactions.push_back(static_cast<int>(r));
    }
  }
  return rep;
}

IrreducibilityReport check_irreducibility(const MultiScaleNetwork& net,
                                          std::span<const double> x,
                                          const FastStateSpace& fss) {
  const int n = fss.size();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const auto& y = fss.state(a);
    for (const auto& rx : net.reactions) {
      ReactionClass cls = classify_reaction(rx.gamma_x, rx.gamma_y);
      if (cls == ReactionClass::slow_only) continue;
      std::vector<int> y2(y);
      bool ok = true;
      for (std::size_t j = 0; j < y2.size(); ++j) {
        y2[j] += rx.gamma_y[j];
        if (y2[j] < 0) ok = false;
      }
      if (!ok) continue;
      int b = fss.index_of(y2);
      if (b < 0 || b == a) continue;
      if (rx.rate.eval(x, y) > 0.0)
        adj[static_cast<std::size_t>(a)].push_back(b);
    }
  }

  // Tarjan strongly connected components, iterative.
  IrreducibilityReport rep;
  std::vector<int> index(static_cast<std::size_t>(n), -1),
      low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  int next_index = 0;
  struct Frame {
    int v;
    std::size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[static_cast<std::size_t>(root)] =
        low[static_cast<std::size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      auto& edges = adj[static_cast<std::size_t>(f.v)];
      if (f.child < edges.size()) {
        int w = edges[f.child++];
        if (index[static_cast<std::size_t>(w)] == -1) {
          index[static_cast<std::size_t>(w)] =
              low[static_cast<std::size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = true;
          frames.push_back({w, 0});
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(f.v)] = std::min(
              low[static_cast<std::size_t>(f.v)], index[static_cast<std::size_t>(w)]);
        }
      } else {
        if (low[static_cast<std::size_t>(f.v)] ==
            index[static_cast<std::size_t>(f.v)]) {
          std::vector<int> comp;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = false;
            comp.push_back(w);
          } while (w != f.v);
          std::sort(comp.begin(), comp.end());
          rep.components.push_back(std::move(comp));
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty())
          low[static_cast<std::size_t>(frames.back().v)] =
              std::min(low[static_cast<std::size_t>(frames.back().v)],
                       low[static_cast<std::size_t>(v)]);
      }
    }
  }
  std::sort(rep.components.begin(), rep.components.end());
  rep.pass = rep.components.size() == 1;
  return rep;
}

ProductFormReport check_product_form(const MultiScaleNetwork& net) {
  ProductFormReport rep;
  rep.single_monomial.resize(net.reactions.size());
  for (std::size_t r = 0; r < net.reactions.size(); ++r) {
    const auto& rx = net.reactions[r];
    rep.single_monomial[r] = rx.rate.is_single_monomial();
    for (int i = 0; i < net.slow_dim; ++i) {
      if (rx.gamma_x[static_cast<std::size_t>(i)] >= 0) continue;
      for (const auto& mono : rx.rate.monomials) {
        if (mono.x_exp[static_cast<std::size_t>(i)] < 1) {
          rep.pass = false;
          rep.violations.push_back(
              {static_cast<int>(r), i,
               "reaction " + std::to_string(r) + " consumes slow species " +
                   std::to_string(i) +
                   " but its rate does not vanish on the face x_" +
                   std::to_string(i + 1) + " = 0"});
          break;
        }
      }
    }
  }
  return rep;
}

MultiScaleNetwork builtin_michaelis_menten(double k0, double k1, double k2,
                                           double k3, long M) {
  if (k0 < 0 || k1 < 0 || k2 < 0 || k3 < 0)
    throw ConfigError("rate constants must be >= 0");
  if (M < 1) throw ConfigError("conservation_M must be >= 1");
  auto mono = [](double k, std::vector<int> xe, std::vector<int> ye) {
    return Monomial{k, std::move(xe), std::move(ye)};
  };
  MultiScaleNetwork net;
  net.slow_dim = 2;
  net.fast_dim = 2;
  net.conservation = M;
  net.reactions = {
      {{1, 0}, {0, 0}, {{{mono(k0, {0, 0}, {0, 0})}}}, ReactionClass::slow_only},
      {{-1, 0}, {-1, 1}, {{{mono(k1, {1, 0}, {1, 0})}}}, ReactionClass::coupled},
      {{1, 0}, {1, -1}, {{{mono(k2, {0, 0}, {0, 1})}}}, ReactionClass::coupled},
      {{0, 1}, {1, -1}, {{{mono(k3, {0, 0}, {0, 1})}}}, ReactionClass::coupled},
  };
  return net;
}

std::vector<std::string> validate_control_hamiltonian(
    const ControlHamiltonian& ch) {
  std::vector<std::string> v;
  if (ch.controls.empty()) v.push_back("at least one control is required");
  if (ch.slow_dim < 1) v.push_back("slow_dim must be >= 1");
  for (std::size_t c = 0; c < ch.controls.size(); ++c) {
    const auto& ctl = ch.controls[c];
    const std::string tag = "control " + std::to_string(c) + ": ";
    if (static_cast<int>(ctl.drift.size()) != ch.slow_dim)
      v.push_back(tag + "drift must have one component per slow axis");
    for (const auto& mono : ctl.cost.monomials) {
      if (mono.k < 0.0) v.push_back(tag + "cost coefficients must be >= 0");
      if (static_cast<int>(mono.x_exp.size()) != ch.slow_dim)
        v.push_back(tag + "cost x_exp length mismatch");
      for (int e : mono.y_exp)
        if (e != 0) v.push_back(tag + "cost must not depend on fast variables");
    }
    for (const auto& comp : ctl.drift)
      for (const auto& mono : comp.monomials) {
        if (static_cast<int>(mono.x_exp.size()) != ch.slow_dim)
          v.push_back(tag + "drift x_exp length mismatch");
        for (int e : mono.y_exp)
          if (e != 0)
            v.push_back(tag + "drift must not depend on fast variables");
      }
  }
  return v;
}

}  // namespace mshjb
