#include "mshjb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mshjb/errors.hpp"
#include "mshjb/parallel.hpp"
#include "mshjb/rng.hpp"

namespace mshjb {

double ContainmentSpec::value(std::span<const double> x) const {
  double q = 0.0;
  for (double xi : x) q += xi * xi;
  return kind == Kind::log_quadratic ? 0.5 * std::log1p(q) : 0.5 * q;
}

void ContainmentSpec::gradient(std::span<const double> x,
                               std::span<double> out) const {
  if (kind == Kind::log_quadratic) {
    double q = 0.0;
    for (double xi : x) q += xi * xi;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / (1.0 + q);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
  }
}

ContainmentReport check_containment(const Hamiltonian& H,
                                    const ContainmentSpec& spec,
                                    const Grid& grid, int threads) {
  const int l = grid.axes();
  if (H.slow_dim() != l)
    throw ConfigError("Hamiltonian dimension does not match the grid");
  const long n = grid.node_count();

  std::vector<double> vals(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](long id) {
    std::vector<double> x(static_cast<std::size_t>(l)),
        p(static_cast<std::size_t>(l));
    grid.node(id, x);
    spec.gradient(x, p);
    vals[static_cast<std::size_t>(id)] = H.value(x, p);
  });

  ContainmentReport rep;
  rep.interior_max = -std::numeric_limits<double>::infinity();
  rep.shell_max = -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  long best_id = 0;
  std::vector<int> idx(static_cast<std::size_t>(l));
  for (long id = 0; id < n; ++id) {
    grid.unflatten(id, idx);
    bool shell = false;
    for (int i = 0; i < l; ++i)
      if (static_cast<double>(idx[static_cast<std::size_t>(i)]) >=
          0.8 * grid.cells[static_cast<std::size_t>(i)])
        shell = true;
    double v = vals[static_cast<std::size_t>(id)];
    if (shell)
      rep.shell_max = std::max(rep.shell_max, v);
    else
      rep.interior_max = std::max(rep.interior_max, v);
    if (v > best) {
      best = v;
      best_id = id;
    }
  }
  rep.c_estimate = best;
  rep.argmax_x = grid.node(best_id);
  rep.pass = rep.shell_max <= rep.interior_max + 1e-12;
  return rep;
}

ConvexityZeroReport check_convexity_and_zero(
    const Hamiltonian& H, const std::vector<std::vector<double>>& xs,
    const ConvexityZeroConfig& cfg) {
  const int l = H.slow_dim();
  Rng rng(cfg.seed);
  ConvexityZeroReport rep;
  std::vector<double> zero(static_cast<std::size_t>(l), 0.0);
  std::vector<double> p1(static_cast<std::size_t>(l)),
      p2(static_cast<std::size_t>(l)), pm(static_cast<std::size_t>(l));
  for (const auto& x : xs) {
    rep.worst_zero = std::max(rep.worst_zero, std::abs(H.value(x, zero)));
    for (int k = 0; k < cfg.triples_per_x; ++k) {
      for (int i = 0; i < l; ++i) {
        p1[static_cast<std::size_t>(i)] =
            rng.uniform(-cfg.p_radius, cfg.p_radius);
        p2[static_cast<std::size_t>(i)] =
            rng.uniform(-cfg.p_radius, cfg.p_radius);
      }
      double t = rng.uniform();
      for (int i = 0; i < l; ++i)
        pm[static_cast<std::size_t>(i)] =
            t * p1[static_cast<std::size_t>(i)] +
            (1.0 - t) * p2[static_cast<std::size_t>(i)];
      double viol = H.value(x, pm) -
                    (t * H.value(x, p1) + (1.0 - t) * H.value(x, p2));
      rep.worst_convexity = std::max(rep.worst_convexity, viol);
    }
  }
  rep.pass = rep.worst_zero <= cfg.tol_zero &&
             rep.worst_convexity <= cfg.tol_convexity;
  return rep;
}

DoublingReport doubling_certificate(const GridFunction& u,
                                    const GridFunction& v,
                                    const ContainmentSpec& spec,
                                    std::span<const double> eps_list,
                                    std::span<const double> alpha_list,
                                    const Hamiltonian& H,
                                    const DoublingConfig& cfg) {
  if (!(u.grid == v.grid)) throw ConfigError("u and v live on different grids");
  const Grid& g = u.grid;
  const int l = g.axes();
  const long n = g.node_count();
  if (n * n > cfg.pair_cap)
    throw CapacityError("doubling certificate needs " + std::to_string(n * n) +
                        " pair evaluations, above the cap of " +
                        std::to_string(cfg.pair_cap));

  // Node coordinates and containment values, computed once.
  std::vector<double> coords(static_cast<std::size_t>(n) *
                             static_cast<std::size_t>(l));
  std::vector<double> ups(static_cast<std::size_t>(n));
  {
    std::vector<double> x(static_cast<std::size_t>(l));
    for (long id = 0; id < n; ++id) {
      g.node(id, x);
      for (int i = 0; i < l; ++i)
        coords[static_cast<std::size_t>(id) * l + static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)];
      ups[static_cast<std::size_t>(id)] = spec.value(x);
    }
  }

  DoublingReport rep;
  rep.pass = true;
  for (double eps : eps_list) {
    if (!(eps > 0.0 && eps < 1.0))
      throw ConfigError("eps must lie in (0,1)");
    const double cu = 1.0 / (1.0 - eps);
    const double cv = 1.0 / (1.0 + eps);
    const double ku = eps / (1.0 - eps);
    const double kv = eps / (1.0 + eps);

    std::vector<double> penalties;
    double final_h_diff = 0.0;
    for (double alpha : alpha_list) {
      // Best pair per x-node, then a serial reduction with the lowest-index
      // tie break, so the result does not depend on the thread count.
      std::vector<double> best_val(static_cast<std::size_t>(n),
                                   -std::numeric_limits<double>::infinity());
      std::vector<long> best_j(static_cast<std::size_t>(n), 0);
      parallel_for(n, cfg.threads, [&](long i) {
        const double ui = cu * u.values[static_cast<std::size_t>(i)] -
                          ku * ups[static_cast<std::size_t>(i)];
        const double* xi = coords.data() + static_cast<std::size_t>(i) * l;
        double local_best = -std::numeric_limits<double>::infinity();
        long local_j = 0;
        for (long j = 0; j < n; ++j) {
          const double* yj = coords.data() + static_cast<std::size_t>(j) * l;
          double d2 = 0.0;
          for (int a = 0; a < l; ++a) {
            double d = xi[a] - yj[a];
            d2 += d * d;
          }
          double phi = ui - cv * v.values[static_cast<std::size_t>(j)] -
                       0.5 * alpha * d2 - kv * ups[static_cast<std::size_t>(j)];
          if (phi > local_best) {
            local_best = phi;
            local_j = j;
          }
        }
        best_val[static_cast<std::size_t>(i)] = local_best;
        best_j[static_cast<std::size_t>(i)] = local_j;
      });
      long bi = 0, bj = 0;
      double bphi = -std::numeric_limits<double>::infinity();
      for (long i = 0; i < n; ++i)
        if (best_val[static_cast<std::size_t>(i)] > bphi) {
          bphi = best_val[static_cast<std::size_t>(i)];
          bi = i;
          bj = best_j[static_cast<std::size_t>(i)];
        }

      DoublingRow row;
      row.eps = eps;
      row.alpha = alpha;
      row.x.assign(coords.begin() + bi * l, coords.begin() + (bi + 1) * l);
      row.y.assign(coords.begin() + bj * l, coords.begin() + (bj + 1) * l);
      row.phi = bphi;
      double d2 = 0.0;
      std::vector<double> p(static_cast<std::size_t>(l));
      for (int a = 0; a < l; ++a) {
        double d = row.x[static_cast<std::size_t>(a)] -
                   row.y[static_cast<std::size_t>(a)];
        d2 += d * d;
        p[static_cast<std::size_t>(a)] = alpha * d;
      }
      row.penalty = 0.5 * alpha * d2;
      row.h_sub = H.value(row.x, p);
      row.h_super = bi == bj ? row.h_sub : H.value(row.y, p);
      row.h_diff = row.h_sub - row.h_super;
      penalties.push_back(row.penalty);
      final_h_diff = row.h_diff;
      rep.rows.push_back(std::move(row));
    }

    // Penalty decay over the top half of the alpha ladder.
    bool eps_ok = true;
    std::size_t half = penalties.size() / 2;
    for (std::size_t k = half; k + 1 < penalties.size(); ++k)
      if (penalties[k + 1] > penalties[k] + 1e-15) eps_ok = false;
    if (!(final_h_diff <= cfg.tol_h_diff)) eps_ok = false;
    if (!eps_ok) {
      rep.pass = false;
      rep.flags.push_back("eps=" + std::to_string(eps) +
                          ": penalty growth or final H-difference above tol");
    }
  }
  return rep;
}

LscReport lsc_spot_check(const MultiScaleNetwork& net, const FastStateSpace& fss,
                         const LscSequence& seq, double tol) {
  const std::size_t n = seq.xs.size();
  if (n == 0 || seq.ps.size() != n || seq.thetas.size() != n)
    throw ConfigError("sequence arrays must have equal nonzero length");

  LscReport rep;
  auto delta = [&](std::size_t k) {
    double d = 0.0;
    for (std::size_t i = 0; i < seq.limit_x.size(); ++i)
      d = std::max(d, std::abs(seq.xs[k][i] - seq.limit_x[i]));
    for (std::size_t i = 0; i < seq.limit_p.size(); ++i)
      d = std::max(d, std::abs(seq.ps[k][i] - seq.limit_p[i]));
    for (std::size_t i = 0; i < seq.limit_theta.weights.size(); ++i)
      d = std::max(d, std::abs(seq.thetas[k].weights[i] -
                               seq.limit_theta.weights[i]));
    return d;
  };
  if (delta(n - 1) >= 1e-6) {
    rep.inconclusive = true;
    rep.flags.push_back("sequence has not numerically converged (last delta >= 1e-6)");
    return rep;
  }

  auto cost = [&](std::span<const double> x, std::span<const double> p,
                  const ThetaMeasure& th) {
    return eval_I(net, fss, x, p, th) - eval_Lambda(net, fss, x, p, th);
  };

  try {
    rep.limit_value = cost(seq.limit_x, seq.limit_p, seq.limit_theta);
  } catch (const DegenerateSupportError& e) {
    rep.inconclusive = true;
    rep.flags.push_back(std::string("limit point: ") + e.what());
    return rep;
  }

  const std::size_t tail_begin = n / 2;
  double tail_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = tail_begin; k < n; ++k) {
    try {
      double v = cost(seq.xs[k], seq.ps[k], seq.thetas[k]);
      rep.tail_values.push_back(v);
      tail_min = std::min(tail_min, v);
    } catch (const DegenerateSupportError& e) {
      rep.inconclusive = true;
      rep.flags.push_back("tail element " + std::to_string(k) + ": " + e.what());
      return rep;
    }
  }
  rep.pass = tail_min >= rep.limit_value - tol;
  return rep;
}

}  // namespace mshjb
