#include "slapath/sigmoid_table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace slapath {

double sigmoid_exact(double m, double tau, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("sigmoid_exact: steepness must be positive");
  return 1.0 - 1.0 / (1.0 + std::exp(-c * (m - tau)));
}

SigmoidTable SigmoidTable::build(double tau, double c, int bucket_count) {
  if (!(c > 0.0)) throw std::invalid_argument("SigmoidTable: steepness must be positive");
  if (bucket_count < 2) throw std::invalid_argument("SigmoidTable: bucket_count must be >= 2");

  SigmoidTable t;
  t.tau_ = tau;
  t.c_ = c;
  double half_span = kHalfSpanSteepness / c;
  t.lo_ = tau - half_span;
  t.width_ = 2.0 * half_span / bucket_count;
  t.outputs_.reserve(bucket_count);
  for (int i = 0; i < bucket_count; ++i) {
    double mid = t.lo_ + (i + 0.5) * t.width_;
    t.outputs_.push_back(FixedPoint::from_unit(sigmoid_exact(mid, tau, c)));
  }
  return t;
}

FixedPoint SigmoidTable::lookup(double m) const {
  double pos = (m - lo_) / width_;
  int idx;
  if (pos <= 0.0) {
    idx = 0;
  } else if (pos >= static_cast<double>(outputs_.size())) {
    idx = static_cast<int>(outputs_.size()) - 1;
  } else {
    idx = static_cast<int>(pos);
  }
  return outputs_[static_cast<size_t>(idx)];
}

std::string SigmoidTable::to_text() const {
  std::string out;
  char line[64];
  for (int i = 0; i < bucket_count(); ++i) {
    if (i + 1 == bucket_count()) {
      std::snprintf(line, sizeof line, "inf %u\n", outputs_[static_cast<size_t>(i)].raw);
    } else {
      std::snprintf(line, sizeof line, "%.9g %u\n", range_upper(i), outputs_[static_cast<size_t>(i)].raw);
    }
    out += line;
  }
  return out;
}

}  // namespace slapath
