#pragma once

#include <cstdint>
#include <span>

namespace mshjb {

/// Van der Corput radical inverse in the given base.
inline double radical_inverse(std::uint64_t i, int base) {
  double inv_base = 1.0 / base;
  double scale = inv_base;
  double x = 0.0;
  while (i > 0) {
    x += static_cast<double>(i % static_cast<std::uint64_t>(base)) * scale;
    i /= static_cast<std::uint64_t>(base);
    scale *= inv_base;
  }
  return x;
}

/// Halton point i in [0,1)^d, d <= 8. Index 0 maps to the origin.
inline void halton_point(std::uint64_t i, std::span<double> out) {
  static constexpr int bases[8] = {2, 3, 5, 7, 11, 13, 17, 19};
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = radical_inverse(i, bases[k]);
}

}  // namespace mshjb
