#include "mshjb/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dense_detail.hpp"
#include "mshjb/errors.hpp"
#include "mshjb/quasirandom.hpp"

namespace mshjb {

namespace {

double psi(const Hamiltonian& H, std::span<const double> x,
           std::span<const double> v, std::span<const double> p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * v[i];
  return s - H.value(x, p);
}

}  // namespace

LegendreResult legendre(const Hamiltonian& H, std::span<const double> x,
                        std::span<const double> v, const LegendreConfig& cfg) {
  const int l = H.slow_dim();
  const double R = cfg.p_radius;

  // Coarse scan seeds the ascent; p = 0 is always a candidate so the value
  // never drops below -H(x,0).
  std::vector<double> best_p(static_cast<std::size_t>(l), 0.0);
  double best_val = psi(H, x, v, best_p);
  if (R > 0.0 && cfg.scan_points_per_axis > 1) {
    const int k = cfg.scan_points_per_axis;
    std::vector<double> p(static_cast<std::size_t>(l));
    long total = 1;
    for (int i = 0; i < l; ++i) total *= k;
    for (long idx = 0; idx < total; ++idx) {
      long rem = idx;
      for (int i = 0; i < l; ++i) {
        int c = static_cast<int>(rem % k);
        rem /= k;
        p[static_cast<std::size_t>(i)] = -R + 2.0 * R * c / (k - 1);
      }
      double val = psi(H, x, v, p);
      if (val > best_val) {
        best_val = val;
        best_p = p;
      }
    }
  }

  LegendreResult out;
  std::vector<double> p = best_p;
  std::vector<double> grad_h(static_cast<std::size_t>(l));
  std::vector<double> g(static_cast<std::size_t>(l));
  std::vector<double> trial(static_cast<std::size_t>(l)),
      gh_shift(static_cast<std::size_t>(l));
  std::vector<double> hess(static_cast<std::size_t>(l) *
                           static_cast<std::size_t>(l));
  std::vector<double> newton(static_cast<std::size_t>(l));
  double val = best_val;
  double step = 1.0;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    double hv = H.value_and_grad(x, p, grad_h);
    val = 0.0;
    for (int i = 0; i < l; ++i)
      val += p[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    val -= hv;

    // Ascent direction and its projection onto the box faces.
    bool outward = false;
    double proj_norm = 0.0;
    for (int i = 0; i < l; ++i) {
      g[static_cast<std::size_t>(i)] =
          v[static_cast<std::size_t>(i)] - grad_h[static_cast<std::size_t>(i)];
      double gi = g[static_cast<std::size_t>(i)];
      bool at_hi = p[static_cast<std::size_t>(i)] >= R && gi > 0.0;
      bool at_lo = p[static_cast<std::size_t>(i)] <= -R && gi < 0.0;
      if (at_hi || at_lo) {
        outward = true;
        continue;  // active face, outward pull does not count
      }
      proj_norm = std::max(proj_norm, std::abs(gi));
    }
    if (proj_norm <= cfg.tol) {
      out.converged = true;
      out.radius_limited = outward;
      break;
    }

    // Projected Newton on the free coordinates (active box faces drop out)
    // from a finite-difference Hessian of H. The eigenvalue Hamiltonians
    // are smooth and strictly convex in p so this is the fast path;
    // piecewise-linear families fail the factorization or the line search
    // and drop to plain gradient steps.
    bool accepted = false;
    std::vector<int> free_idx;
    for (int i = 0; i < l; ++i) {
      double gi = g[static_cast<std::size_t>(i)];
      bool active = (p[static_cast<std::size_t>(i)] >= R && gi > 0.0) ||
                    (p[static_cast<std::size_t>(i)] <= -R && gi < 0.0);
      if (!active) free_idx.push_back(i);
    }
    const int m = static_cast<int>(free_idx.size());
    double p_scale = 1.0;
    for (int i = 0; i < l; ++i)
      p_scale = std::max(p_scale, std::abs(p[static_cast<std::size_t>(i)]));

    if (m > 0 && l <= 8) {
      const double fd = 1e-6;
      for (int cj = 0; cj < m; ++cj) {
        trial = p;
        trial[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(cj)])] += fd;
        H.value_and_grad(x, trial, gh_shift);
        for (int ci = 0; ci < m; ++ci) {
          int i = free_idx[static_cast<std::size_t>(ci)];
          hess[static_cast<std::size_t>(ci) * m + static_cast<std::size_t>(cj)] =
              (gh_shift[static_cast<std::size_t>(i)] -
               grad_h[static_cast<std::size_t>(i)]) /
              fd;
        }
      }
      for (int ci = 0; ci < m; ++ci)
        for (int cj = ci + 1; cj < m; ++cj) {
          double sym = 0.5 * (hess[static_cast<std::size_t>(ci) * m + cj] +
                              hess[static_cast<std::size_t>(cj) * m + ci]);
          hess[static_cast<std::size_t>(ci) * m + cj] = sym;
          hess[static_cast<std::size_t>(cj) * m + ci] = sym;
        }
      std::vector<double> neg_g(static_cast<std::size_t>(m));
      for (int ci = 0; ci < m; ++ci)
        neg_g[static_cast<std::size_t>(ci)] =
            -g[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(ci)])];
      if (detail::cholesky_solve(hess, m, 1e-12 * (1.0 + proj_norm), neg_g,
                                 newton)) {
        double dir = 0.0;
        for (int ci = 0; ci < m; ++ci)
          dir = std::max(dir, std::abs(newton[static_cast<std::size_t>(ci)]));
        // keep early steps at a sane scale on strongly curved landscapes
        const double cap = 2.0 * (1.0 + p_scale);
        double scale = dir > cap ? cap / dir : 1.0;
        double t = scale;
        for (int ls = 0; ls < 40 && !accepted; ++ls) {
          if (t * dir < 1e-15 * p_scale) break;  // step below resolution
          trial = p;
          for (int ci = 0; ci < m; ++ci) {
            int i = free_idx[static_cast<std::size_t>(ci)];
            trial[static_cast<std::size_t>(i)] =
                std::clamp(p[static_cast<std::size_t>(i)] +
                               t * newton[static_cast<std::size_t>(ci)],
                           -R, R);
          }
          double tval = psi(H, x, v, trial);
          if (tval > val) {
            p = trial;
            val = tval;
            accepted = true;
          }
          t *= 0.5;
        }
      }
    }

    if (!accepted) {
      // Backtracking gradient step with a growing initial guess.
      double t = step * 2.0;
      for (int ls = 0; ls < 50; ++ls) {
        if (t * proj_norm < 1e-15 * p_scale) break;  // step below resolution
        for (int i = 0; i < l; ++i)
          trial[static_cast<std::size_t>(i)] =
              std::clamp(p[static_cast<std::size_t>(i)] +
                             t * g[static_cast<std::size_t>(i)],
                         -R, R);
        double tval = psi(H, x, v, trial);
        if (tval > val + 1e-4 * t * proj_norm * proj_norm) {
          p = trial;
          val = tval;
          step = t;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
    }
    if (!accepted) {
      // No ascent possible at the numerical floor (kinks of piecewise-linear
      // Hamiltonians land here); report the best point found.
      out.converged = true;
      out.radius_limited = outward;
      break;
    }
  }
  if (it == cfg.max_iter)
    throw ConvergenceError("Legendre ascent did not converge in " +
                           std::to_string(cfg.max_iter) + " iterations");
  out.value = val;
  out.argmax_p = std::move(p);
  out.iterations = it;
  return out;
}

ActionResult path_action(const Hamiltonian& H, const PathSample& path,
                         const LegendreConfig& cfg) {
  const std::size_t K = path.times.size();
  if (K < 2 || path.points.size() != K)
    throw ConfigError("path needs K >= 1 segments with matching lengths");
  for (std::size_t k = 0; k + 1 < K; ++k)
    if (!(path.times[k + 1] > path.times[k]))
      throw ConfigError("path times must be strictly increasing");

  ActionResult out;
  const int l = H.slow_dim();
  std::vector<double> mid(static_cast<std::size_t>(l)),
      vel(static_cast<std::size_t>(l));
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    for (int i = 0; i < l; ++i) {
      mid[static_cast<std::size_t>(i)] =
          0.5 * (path.points[k][static_cast<std::size_t>(i)] +
                 path.points[k + 1][static_cast<std::size_t>(i)]);
      vel[static_cast<std::size_t>(i)] =
          (path.points[k + 1][static_cast<std::size_t>(i)] -
           path.points[k][static_cast<std::size_t>(i)]) /
          dt;
    }
    LegendreResult seg = legendre(H, mid, vel, cfg);
    if (seg.radius_limited) {
      out.radius_limited = true;
      out.flags.push_back("segment " + std::to_string(k) +
                          " radius-limited; action unbounded at p_radius");
    }
    total += dt * seg.value;
  }
  out.value = out.radius_limited ? std::numeric_limits<double>::infinity()
                                 : total;
  return out;
}

Box velocity_bounds(const Hamiltonian& H, std::span<const double> x,
                    double p_radius, int n_samples) {
  const int l = H.slow_dim();
  Box box;
  box.lo.assign(static_cast<std::size_t>(l),
                std::numeric_limits<double>::infinity());
  box.hi.assign(static_cast<std::size_t>(l),
                -std::numeric_limits<double>::infinity());

  std::vector<double> p(static_cast<std::size_t>(l), 0.0),
      u(static_cast<std::size_t>(l)), grad(static_cast<std::size_t>(l));
  auto probe = [&](std::span<const double> pt) {
    H.value_and_grad(x, pt, grad);
    for (int i = 0; i < l; ++i) {
      box.lo[static_cast<std::size_t>(i)] =
          std::min(box.lo[static_cast<std::size_t>(i)],
                   grad[static_cast<std::size_t>(i)]);
      box.hi[static_cast<std::size_t>(i)] =
          std::max(box.hi[static_cast<std::size_t>(i)],
                   grad[static_cast<std::size_t>(i)]);
    }
  };

  probe(p);  // p = 0 first, so grad_p H(x,0) is always covered
  for (int k = 1; k <= n_samples && p_radius > 0.0; ++k) {
    halton_point(static_cast<std::uint64_t>(k), u);
    for (int i = 0; i < l; ++i)
      p[static_cast<std::size_t>(i)] =
          -p_radius + 2.0 * p_radius * u[static_cast<std::size_t>(i)];
    probe(p);
  }

  for (int i = 0; i < l; ++i) {
    double lo = box.lo[static_cast<std::size_t>(i)];
    double hi = box.hi[static_cast<std::size_t>(i)];
    double c = 0.5 * (lo + hi);
    double w = 0.55 * (hi - lo);
    double lo2 = c - w, hi2 = c + w;
    // Inflation must not invent velocities of a sign the samples exclude:
    // one-signed gradient ranges (e.g. production-only species on their
    // zero face) keep their sign.
    if (lo >= 0.0) lo2 = std::max(lo2, 0.0);
    if (hi <= 0.0) hi2 = std::min(hi2, 0.0);
    box.lo[static_cast<std::size_t>(i)] = lo2;
    box.hi[static_cast<std::size_t>(i)] = hi2;
  }
  return box;
}

}  // namespace mshjb
