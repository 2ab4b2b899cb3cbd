#ifndef SLAPATH_FIXED_POINT_HPP
#define SLAPATH_FIXED_POINT_HPP

#include <cmath>
#include <cstdint>

namespace slapath {

// Q16.16 unsigned fixed point, the register representation used by the
// constrained arithmetic backend. value = raw / 2^16. Probability-valued
// quantities keep raw <= kOne.
struct FixedPoint {
  uint32_t raw = 0;

  static constexpr uint32_t kFracBits = 16;
  static constexpr uint32_t kOne = 1u << kFracBits;

  static FixedPoint from_raw(uint32_t r) { return FixedPoint{r}; }

  // Round-to-nearest conversion, saturating at the representable range.
  static FixedPoint from_real(double v) {
    if (v <= 0.0) return FixedPoint{0};
    double scaled = v * static_cast<double>(kOne);
    double max_raw = 4294967295.0;
    if (scaled >= max_raw) return FixedPoint{0xffffffffu};
    return FixedPoint{static_cast<uint32_t>(std::llround(scaled))};
  }

  // Like from_real but clamped to [0, 1] (probability values).
  static FixedPoint from_unit(double v) {
    if (v <= 0.0) return FixedPoint{0};
    if (v >= 1.0) return FixedPoint{kOne};
    return FixedPoint{static_cast<uint32_t>(std::llround(v * static_cast<double>(kOne)))};
  }

  double to_real() const { return static_cast<double>(raw) / static_cast<double>(kOne); }

  friend bool operator==(FixedPoint a, FixedPoint b) { return a.raw == b.raw; }
};

// Decomposition of a multiplier alpha in (0, 1] into at most two right
// shifts: factor = 2^-a (+ 2^-b), chosen to minimize |factor - alpha| with
// factor <= 1 so the product never exceeds the multiplicand. Ties prefer a
// single shift, then smaller shift amounts, keeping the choice deterministic.
struct ShiftPair {
  uint8_t a = 0;
  bool has_b = false;
  uint8_t b = 0;

  double factor() const {
    double f = std::ldexp(1.0, -static_cast<int>(a));
    if (has_b) f += std::ldexp(1.0, -static_cast<int>(b));
    return f;
  }
};

// Largest shift considered. 2^-16 is the Q16.16 ulp; finer terms cannot
// change a probability register.
inline constexpr int kMaxShift = 16;

ShiftPair decompose_factor(double alpha);

// x * alpha via the shift decomposition (truncating shifts, as a data-plane
// register pipeline would). Requires alpha in (0, 1]; result never exceeds x.
FixedPoint shift_mul(FixedPoint x, double alpha);

// Applies an already-chosen decomposition.
inline FixedPoint apply_shifts(FixedPoint x, ShiftPair s) {
  uint32_t r = x.raw >> s.a;
  if (s.has_b) r += x.raw >> s.b;
  return FixedPoint{r};
}

}  // namespace slapath

#endif  // SLAPATH_FIXED_POINT_HPP
