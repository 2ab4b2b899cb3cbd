#ifndef SLAPATH_SIGMOID_TABLE_HPP
#define SLAPATH_SIGMOID_TABLE_HPP

#include <string>
#include <vector>

#include "slapath/fixed_point.hpp"

namespace slapath {

// f(m) = 1 - 1/(1 + e^{-c(m - tau)}). Decreasing in m; 0.5 at m = tau.
// Rejects non-positive steepness.
double sigmoid_exact(double m, double tau, double c);

// Precomputed sigmoid, the match-action-table stand-in used by the
// constrained backend. Buckets partition [tau - 8/c, tau + 8/c] uniformly;
// inputs outside that span clamp to the first/last bucket, where the exact
// sigmoid is within 3.4e-4 of its asymptote (invisible at Q16.16 resolution).
// Each bucket holds sigmoid_exact at the bucket midpoint rounded to the
// nearest Q16.16 value, so outputs are monotonically non-increasing.
class SigmoidTable {
 public:
  static constexpr int kDefaultBuckets = 64;
  static constexpr double kHalfSpanSteepness = 8.0;  // domain half-width = 8/c

  static SigmoidTable build(double tau, double c, int bucket_count);

  FixedPoint lookup(double m) const;

  double tau() const { return tau_; }
  double steepness() const { return c_; }
  int bucket_count() const { return static_cast<int>(outputs_.size()); }
  double domain_low() const { return lo_; }
  double bucket_width() const { return width_; }
  const std::vector<FixedPoint>& outputs() const { return outputs_; }

  // Upper bound of bucket i's range (the last bucket extends to infinity).
  double range_upper(int i) const { return lo_ + width_ * (i + 1); }

  // Two-column text form (range upper bound, Q16.16 raw output), one bucket
  // per line, "inf" for the final bound. This is the content that would
  // populate the data-plane table, kept inspectable.
  std::string to_text() const;

 private:
  double tau_ = 0.0;
  double c_ = 0.0;
  double lo_ = 0.0;
  double width_ = 0.0;
  std::vector<FixedPoint> outputs_;
};

}  // namespace slapath

#endif  // SLAPATH_SIGMOID_TABLE_HPP
