#include "slapath/arith_backend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slapath {

const char* backend_name(BackendKind k) {
  return k == BackendKind::Exact ? "exact" : "constrained";
}

bool parse_backend(const std::string& s, BackendKind& out) {
  if (s == "exact") {
    out = BackendKind::Exact;
    return true;
  }
  if (s == "constrained") {
    out = BackendKind::Constrained;
    return true;
  }
  return false;
}

void RewardParams::validate() const {
  if (!(beta1 >= 0.0) || !(beta2 >= 0.0)) {
    throw std::invalid_argument("reward weights must be non-negative");
  }
  if (beta1 + beta2 != 1.0) {
    throw std::invalid_argument("reward weights must sum to 1");
  }
  if (!(c_queue > 0.0) || !(c_delay > 0.0)) {
    throw std::invalid_argument("sigmoid steepness must be positive");
  }
  if (!std::isfinite(tau_queue) || !std::isfinite(tau_delay)) {
    throw std::invalid_argument("sigmoid thresholds must be finite");
  }
}

namespace {

class ExactBackend final : public ArithBackend {
 public:
  explicit ExactBackend(const RewardParams& params) : params_(params) { params_.validate(); }

  BackendKind kind() const override { return BackendKind::Exact; }

  double quantize_unit(double v) const override { return std::clamp(v, 0.0, 1.0); }

  double sigmoid_queue(double m) const override {
    return sigmoid_exact(m, params_.tau_queue, params_.c_queue);
  }

  double sigmoid_delay(double m) const override {
    return sigmoid_exact(m, params_.tau_delay, params_.c_delay);
  }

  double combine_reward(double fq, double fd) const override {
    return params_.beta1 * fq + params_.beta2 * fd;
  }

  double multiply(double x, double factor) const override { return x * factor; }

  void sla_update(std::vector<double>& p, size_t selected, double reward,
                  double alpha) const override {
    if (selected >= p.size()) throw std::out_of_range("selected index");
    if (reward == 0.0) return;  // reward-inaction
    const double f = alpha * reward;
    for (size_t j = 0; j < p.size(); ++j) {
      if (j == selected) {
        p[j] += f * (1.0 - p[j]);
      } else {
        p[j] -= f * p[j];
      }
    }
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (std::fabs(sum - 1.0) > sum_tolerance() && sum > 0.0) {
      for (double& v : p) v /= sum;
    }
  }

  double ema_step(double ema, double reward, double gamma) const override {
    return gamma * reward + (1.0 - gamma) * ema;
  }

  void init_uniform(std::vector<double>& p, size_t n) const override {
    p.assign(n, 1.0 / static_cast<double>(n));
  }

  double sum_tolerance() const override { return 1e-9; }

 private:
  RewardParams params_;
};

// All values cross this backend as doubles that sit exactly on the Q16.16
// grid, so converting back to raw form is lossless.
class ConstrainedBackend final : public ArithBackend {
 public:
  ConstrainedBackend(const RewardParams& params, int sigmoid_buckets)
      : params_(params),
        queue_table_(SigmoidTable::build(params.tau_queue, params.c_queue, sigmoid_buckets)),
        delay_table_(SigmoidTable::build(params.tau_delay, params.c_delay, sigmoid_buckets)) {
    params_.validate();
    if (params_.beta1 > 0.0) beta1_shifts_ = decompose_factor(params_.beta1);
    if (params_.beta2 > 0.0) beta2_shifts_ = decompose_factor(params_.beta2);
  }

  BackendKind kind() const override { return BackendKind::Constrained; }

  double quantize_unit(double v) const override { return FixedPoint::from_unit(v).to_real(); }

  double sigmoid_queue(double m) const override { return queue_table_.lookup(m).to_real(); }

  double sigmoid_delay(double m) const override { return delay_table_.lookup(m).to_real(); }

  double combine_reward(double fq, double fd) const override {
    uint32_t raw = 0;
    if (params_.beta1 > 0.0) raw += apply_shifts(FixedPoint::from_unit(fq), beta1_shifts_).raw;
    if (params_.beta2 > 0.0) raw += apply_shifts(FixedPoint::from_unit(fd), beta2_shifts_).raw;
    return FixedPoint::from_raw(std::min(raw, FixedPoint::kOne)).to_real();
  }

  double multiply(double x, double factor) const override {
    return shift_mul(FixedPoint::from_unit(x), factor).to_real();
  }

  void sla_update(std::vector<double>& p, size_t selected, double reward,
                  double alpha) const override {
    if (selected >= p.size()) throw std::out_of_range("selected index");
    if (reward == 0.0) return;  // reward-inaction
    const ShiftPair s = decompose_factor(alpha * reward);
    std::vector<uint32_t> raw(p.size());
    for (size_t j = 0; j < p.size(); ++j) raw[j] = FixedPoint::from_unit(p[j]).raw;
    uint64_t sum = 0;
    for (size_t j = 0; j < p.size(); ++j) {
      if (j == selected) {
        raw[j] += apply_shifts(FixedPoint::from_raw(FixedPoint::kOne - raw[j]), s).raw;
      } else {
        raw[j] -= apply_shifts(FixedPoint::from_raw(raw[j]), s).raw;
      }
      sum += raw[j];
    }
    const uint64_t tol = static_cast<uint64_t>(sum_tolerance() * FixedPoint::kOne);
    const uint64_t drift = sum > FixedPoint::kOne ? sum - FixedPoint::kOne : FixedPoint::kOne - sum;
    if (drift > tol) renormalize(raw, sum);
    for (size_t j = 0; j < p.size(); ++j) p[j] = FixedPoint::from_raw(raw[j]).to_real();
  }

  double ema_step(double ema, double reward, double gamma) const override {
    const ShiftPair s = decompose_factor(gamma);
    const uint32_t e = FixedPoint::from_unit(ema).raw;
    const uint32_t r = FixedPoint::from_unit(reward).raw;
    uint32_t next;
    if (r >= e) {
      next = e + apply_shifts(FixedPoint::from_raw(r - e), s).raw;
    } else {
      next = e - apply_shifts(FixedPoint::from_raw(e - r), s).raw;
    }
    return FixedPoint::from_raw(next).to_real();
  }

  void init_uniform(std::vector<double>& p, size_t n) const override {
    if (n == 0) {
      p.clear();
      return;
    }
    const uint32_t base = FixedPoint::kOne / static_cast<uint32_t>(n);
    uint32_t residual = FixedPoint::kOne - base * static_cast<uint32_t>(n);
    p.assign(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
      uint32_t raw = base;
      if (residual > 0) {
        ++raw;
        --residual;
      }
      p[j] = FixedPoint::from_raw(raw).to_real();
    }
  }

  double sum_tolerance() const override {
    return 16.0 / static_cast<double>(FixedPoint::kOne);  // 2^-12
  }

 private:
  static void renormalize(std::vector<uint32_t>& raw, uint64_t sum) {
    if (sum == 0) {
      // Degenerate; fall back to uniform mass.
      const uint32_t base = FixedPoint::kOne / static_cast<uint32_t>(raw.size());
      for (uint32_t& v : raw) v = base;
      raw[0] += FixedPoint::kOne - base * static_cast<uint32_t>(raw.size());
      return;
    }
    uint64_t rescaled = 0;
    size_t argmax = 0;
    for (size_t j = 0; j < raw.size(); ++j) {
      if (raw[j] > raw[argmax]) argmax = j;
      raw[j] = static_cast<uint32_t>(static_cast<uint64_t>(raw[j]) * FixedPoint::kOne / sum);
      rescaled += raw[j];
    }
    raw[argmax] += static_cast<uint32_t>(FixedPoint::kOne - rescaled);
  }

  RewardParams params_;
  SigmoidTable queue_table_;
  SigmoidTable delay_table_;
  ShiftPair beta1_shifts_;
  ShiftPair beta2_shifts_;
};

}  // namespace

std::unique_ptr<ArithBackend> ArithBackend::make(BackendKind kind, const RewardParams& params,
                                                 int sigmoid_buckets) {
  params.validate();
  if (kind == BackendKind::Exact) return std::make_unique<ExactBackend>(params);
  return std::make_unique<ConstrainedBackend>(params, sigmoid_buckets);
}

BackendGap backend_gap(const ArithBackend& a, const ArithBackend& b, const BackendGapInputs& in) {
  BackendGap gap;
  for (double m : in.queue_metrics) {
    gap.sigmoid_queue = std::max(gap.sigmoid_queue, std::fabs(a.sigmoid_queue(m) - b.sigmoid_queue(m)));
  }
  for (double m : in.delay_metrics) {
    gap.sigmoid_delay = std::max(gap.sigmoid_delay, std::fabs(a.sigmoid_delay(m) - b.sigmoid_delay(m)));
  }
  for (double x : in.unit_values) {
    for (double f : in.factors) {
      gap.multiply = std::max(gap.multiply, std::fabs(a.multiply(x, f) - b.multiply(x, f)));
    }
    for (double r : in.unit_values) {
      gap.ema = std::max(gap.ema, std::fabs(a.ema_step(x, r, in.ema_gamma) - b.ema_step(x, r, in.ema_gamma)));
    }
  }
  return gap;
}

}  // namespace slapath
