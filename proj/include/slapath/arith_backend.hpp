#ifndef SLAPATH_ARITH_BACKEND_HPP
#define SLAPATH_ARITH_BACKEND_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "slapath/fixed_point.hpp"
#include "slapath/sigmoid_table.hpp"

namespace slapath {

enum class BackendKind : uint8_t { Exact, Constrained };

const char* backend_name(BackendKind k);
bool parse_backend(const std::string& s, BackendKind& out);

// Reward weights and sigmoid shape parameters. beta1 weighs the
// queue-length term, beta2 the dequeue-delay term.
struct RewardParams {
  double beta1 = 0.5;
  double beta2 = 0.5;
  double tau_queue = 20.0;    // packets
  double tau_delay = 500.0;   // microseconds
  double c_queue = 0.3;
  double c_delay = 0.01;

  void validate() const;  // throws std::invalid_argument
};

// One arithmetic flavor for every computation the learning agent performs.
// The exact backend is plain floating point. The constrained backend mirrors
// the data-plane implementation constraints: probabilities live on the
// Q16.16 grid, multiplications go through the two-shift decomposition, and
// the sigmoid is a table lookup. Under the constrained backend every value
// returned lies exactly on the Q16.16 grid (and is therefore exactly
// representable in a double), so trajectories stay bit-reproducible.
class ArithBackend {
 public:
  virtual ~ArithBackend() = default;

  virtual BackendKind kind() const = 0;

  // Snaps a value in [0,1] onto the backend's representable grid.
  virtual double quantize_unit(double v) const = 0;

  // Decreasing sigmoid of the queue-length / dequeue-delay metric.
  virtual double sigmoid_queue(double m) const = 0;
  virtual double sigmoid_delay(double m) const = 0;

  // beta1 * fq + beta2 * fd.
  virtual double combine_reward(double fq, double fd) const = 0;

  // x * factor for x in [0,1], factor in (0,1]. The constrained flavor is the
  // two-shift approximation.
  virtual double multiply(double x, double factor) const = 0;

  // Reward-inaction step over the whole vector: the selected entry gains
  // alpha * reward * (1 - p), every other entry loses alpha * reward * p.
  // reward in [0,1], alpha in (0,1]. Restores the simplex when drift
  // exceeds sum_tolerance().
  virtual void sla_update(std::vector<double>& p, size_t selected, double reward,
                          double alpha) const = 0;

  // ema' = gamma * reward + (1 - gamma) * ema.
  virtual double ema_step(double ema, double reward, double gamma) const = 0;

  // Uniform distribution over n entries (sums to 1 exactly on the grid).
  virtual void init_uniform(std::vector<double>& p, size_t n) const = 0;

  virtual double sum_tolerance() const = 0;

  static std::unique_ptr<ArithBackend> make(BackendKind kind, const RewardParams& params,
                                            int sigmoid_buckets = SigmoidTable::kDefaultBuckets);
};

// Per-primitive maximum absolute deviation between two backends over the
// supplied probe inputs, used to keep the approximation gap measurable.
struct BackendGap {
  double sigmoid_queue = 0.0;
  double sigmoid_delay = 0.0;
  double multiply = 0.0;
  double ema = 0.0;
};

struct BackendGapInputs {
  std::vector<double> queue_metrics;
  std::vector<double> delay_metrics;
  std::vector<double> unit_values;  // probability-like operands
  std::vector<double> factors;      // alpha-like multipliers in (0,1]
  double ema_gamma = 0.125;
};

BackendGap backend_gap(const ArithBackend& a, const ArithBackend& b, const BackendGapInputs& in);

}  // namespace slapath

#endif  // SLAPATH_ARITH_BACKEND_HPP
