#include "slapath/fixed_point.hpp"

#include <cmath>
#include <stdexcept>

namespace slapath {

ShiftPair decompose_factor(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("decompose_factor: alpha must be in (0, 1]");

  ShiftPair best;
  double best_err = -1.0;

  auto consider = [&](ShiftPair cand) {
    double err = std::fabs(cand.factor() - alpha);
    if (best_err < 0.0 || err < best_err) {
      best = cand;
      best_err = err;
    }
  };

  for (int a = 0; a <= kMaxShift; ++a)
    consider(ShiftPair{static_cast<uint8_t>(a), false, 0});
  // Pairs with a = 0 would exceed 1 and are excluded.
  for (int a = 1; a <= kMaxShift; ++a)
    for (int b = a + 1; b <= kMaxShift; ++b)
      consider(ShiftPair{static_cast<uint8_t>(a), true, static_cast<uint8_t>(b)});
  return best;
}

FixedPoint shift_mul(FixedPoint x, double alpha) {
  return apply_shifts(x, decompose_factor(alpha));
}

}  // namespace slapath
