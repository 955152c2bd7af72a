#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mshjb {

/// Deterministic random source. All distributions are derived from the raw
/// mt19937_64 stream by hand so that identical seeds give identical doubles
/// on every platform (std:: distribution objects do not guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Strictly positive Exp(1) variate.
  double exponential() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return -std::log1p(-u);
  }

  /// Symmetric Dirichlet(1) sample: normalized i.i.d. exponentials.
  /// Every entry is strictly positive.
  std::vector<double> dirichlet_uniform(int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& x : w) {
      x = exponential();
      total += x;
    }
    for (auto& x : w) x /= total;
    return w;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mshjb
