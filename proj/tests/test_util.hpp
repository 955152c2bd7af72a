#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mshjb/hamiltonian.hpp"
#include "mshjb/model.hpp"

namespace mshjb::testutil {

inline MultiScaleNetwork mm_unit(long M = 1) {
  return builtin_michaelis_menten(1.0, 1.0, 1.0, 1.0, M);
}

inline RateFunction poly1(double k, std::vector<int> x_exp,
                          std::vector<int> y_exp) {
  return RateFunction{{Monomial{k, std::move(x_exp), std::move(y_exp)}}};
}

/// Controls {+e1, -e1, ..., +el, -el} with drift f(x,a) = -a and unit cost:
/// H(x,p) = max_i |p_i| - 1.
inline ControlHamiltonian eikonal_family(int l) {
  ControlHamiltonian ch;
  ch.slow_dim = l;
  for (int axis = 0; axis < l; ++axis) {
    for (int sign : {+1, -1}) {
      Control c;
      c.label = (sign > 0 ? std::string("+e") : std::string("-e")) +
                std::to_string(axis + 1);
      for (int i = 0; i < l; ++i) {
        double fi = i == axis ? -static_cast<double>(sign) : 0.0;
        c.drift.push_back(poly1(fi, std::vector<int>(l, 0), {}));
      }
      c.cost = poly1(1.0, std::vector<int>(l, 0), {});
      ch.controls.push_back(std::move(c));
    }
  }
  return ch;
}

/// Drift grid v in [-vmax, vmax] with cost v^2/2 approximates H(p) = p^2/2
/// in one slow dimension (f = -v so that -f.p = v p).
inline ControlHamiltonian quadratic_family_1d(double vmax, int n_controls) {
  ControlHamiltonian ch;
  ch.slow_dim = 1;
  for (int k = 0; k < n_controls; ++k) {
    double v = -vmax + 2.0 * vmax * k / (n_controls - 1);
    Control c;
    c.label = "v" + std::to_string(k);
    c.drift.push_back(poly1(-v, {0}, {}));
    c.cost = poly1(0.5 * v * v, {0}, {});
    ch.controls.push_back(std::move(c));
  }
  return ch;
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace mshjb::testutil
