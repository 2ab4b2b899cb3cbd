#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "slapath/agent.hpp"
#include "slapath/rng.hpp"
#include "slapath/telemetry.hpp"

using namespace slapath;

namespace {

// Single-hop report; queue/delay land directly in the aggregate totals.
TelemetryReport make_report(uint8_t path, bool probe, uint32_t queue, uint32_t delay) {
  TelemetryReport r;
  r.domain_id = 0;
  r.path_index = path;
  r.is_probe = probe;
  r.packet_seq = 0;
  r.records.push_back({2, queue, delay});
  return r;
}

// Queue 20 and delay 500 sit on the sigmoid midpoints under the default
// reward parameters, so the combined reward is exactly 0.5.
TelemetryReport midpoint_report(uint8_t path) { return make_report(path, false, 20, 500); }

AgentConfig exact_config(double alpha) {
  AgentConfig cfg;
  cfg.alpha = alpha;
  cfg.backend = BackendKind::Exact;
  return cfg;
}

}  // namespace

TEST_CASE("learning trajectory follows the closed form for two segments") {
  // Reinforcing one path with constant reward R gives
  //   p(t) = 1 - (1 - 1/2) * (1 - alpha * R)^t.
  // With midpoint metrics R = 0.5 exactly, so the full report path
  // (aggregate, sigmoids, combine, update) must reproduce that curve.
  for (double alpha : {0.1, 0.25, 0.5, 0.9}) {
    CAPTURE(alpha);
    AgentConfig cfg = exact_config(alpha);
    cfg.p_conv = 0.9999999;  // keep it learning long enough to see the tail
    SlaAgent agent(cfg, 0, 2, Rng(1));
    const int steps = alpha < 0.9 ? 50 : 25;  // alpha 0.9 crosses p_conv near t = 26
    for (int t = 1; t <= steps; ++t) {
      const auto d = agent.on_report(midpoint_report(0));
      REQUIRE(d.has_value());
      REQUIRE(agent.state().phase == AgentPhase::Learning);
      const double expected = 1.0 - 0.5 * std::pow(1.0 - alpha * 0.5, t);
      CHECK(agent.state().probs[0] == doctest::Approx(expected).epsilon(1e-9));
      CHECK(agent.state().probs[1] == doctest::Approx(1.0 - expected).epsilon(1e-9));
      CHECK(agent.updates_applied() == static_cast<uint64_t>(t));
    }
  }
}

TEST_CASE("convergence step count matches the analytic crossing") {
  // Smallest t with 1 - 0.5 * (1 - alpha/2)^t >= 0.9.
  const std::vector<std::pair<double, int>> expected = {
      {0.1, 32}, {0.25, 13}, {0.5, 6}, {0.9, 3}};
  for (const auto& [alpha, t_star] : expected) {
    CAPTURE(alpha);
    SlaAgent agent(exact_config(alpha), 0, 2, Rng(1));
    int t = 0;
    while (agent.state().phase == AgentPhase::Learning) {
      REQUIRE(t < 100);
      const auto d = agent.on_report(midpoint_report(0));
      ++t;
      REQUIRE(d.has_value());
      CHECK_FALSE(d->is_probe);
    }
    CHECK(t == t_star);
    CHECK(agent.state().phase == AgentPhase::OptimizedSteering);
    REQUIRE(agent.state().learned_path.has_value());
    CHECK(*agent.state().learned_path == 0);
    CHECK(agent.phase_transitions() == 1);
    // The transition step itself announces the learned path.
    SlaAgent again(exact_config(alpha), 0, 2, Rng(1));
    std::optional<ControlDirective> last;
    for (int i = 0; i < t_star; ++i) last = again.on_report(midpoint_report(0));
    REQUIRE(last.has_value());
    CHECK(last->path_index == 0);
  }
}

TEST_CASE("steering repeats the learned path and keeps updating the ema") {
  AgentConfig cfg = exact_config(0.5);
  cfg.p_conv = 0.55;  // one midpoint update reaches 0.625
  SlaAgent agent(cfg, 9, 2, Rng(3));
  const auto first = agent.on_report(midpoint_report(0));
  REQUIRE(first.has_value());
  CHECK(first->path_index == 0);
  CHECK(first->domain_id == 9);
  REQUIRE(agent.state().phase == AgentPhase::OptimizedSteering);
  CHECK(agent.updates_applied() == 1);

  const std::vector<double> frozen = agent.state().probs;
  const double ema1_before = agent.state().ema[1];
  for (int i = 0; i < 3; ++i) {
    const auto d = agent.on_report(make_report(1, false, 0, 0));
    REQUIRE(d.has_value());
    CHECK(d->path_index == 0);  // still the learned path, not the reported one
    CHECK(d->domain_id == 9);
    CHECK_FALSE(d->is_probe);
  }
  CHECK(agent.updates_applied() == 1);  // probability vector is frozen in steering
  CHECK(agent.state().probs == frozen);
  CHECK(agent.state().ema[1] > ema1_before);  // good reports lift the alternate's ema
}

TEST_CASE("re-exploration needs a full window of consecutive degraded probes") {
  // Steering on path 0 with both emas at 0.5. Great probes on path 1 push
  // ema[1] past ema[0] + delta_improve; one terrible probe drops it back
  // below the bar and must reset the streak, so the phase only flips after
  // three degraded probes in a row.
  AgentConfig cfg = exact_config(0.5);
  cfg.p_conv = 0.55;
  SlaAgent agent(cfg, 0, 2, Rng(3));
  agent.on_report(midpoint_report(0));
  REQUIRE(agent.state().phase == AgentPhase::OptimizedSteering);
  CHECK(agent.state().ema[0] == 0.5);  // midpoint reward leaves the prior in place
  CHECK(agent.state().ema[1] == 0.5);

  const ArithBackend& b = agent.backend();
  const TelemetryReport great = make_report(1, true, 0, 0);
  const TelemetryReport terrible = make_report(1, true, 1000, 1000000);
  const double r_great = compute_reward(aggregate(great), b);
  const double r_terrible = compute_reward(aggregate(terrible), b);
  const double bar = 0.5 + cfg.delta_improve;

  double ema1 = 0.5;
  const auto feed = [&](const TelemetryReport& rep, double reward) {
    const auto d = agent.on_report(rep);
    CHECK_FALSE(d.has_value());  // probes never produce directives
    ema1 = b.ema_step(ema1, reward, cfg.ema_gamma);
    CHECK(agent.state().ema[1] == ema1);
  };

  feed(great, r_great);  // 0.5619, below the bar
  REQUIRE(ema1 < bar);
  CHECK(agent.state().degradation_streak == 0);
  feed(great, r_great);  // 0.6161
  REQUIRE(ema1 > bar);
  CHECK(agent.state().degradation_streak == 1);
  feed(great, r_great);  // 0.6635
  REQUIRE(ema1 > bar);
  CHECK(agent.state().degradation_streak == 2);
  CHECK(agent.state().phase == AgentPhase::OptimizedSteering);

  feed(terrible, r_terrible);  // 0.5806, streak resets
  REQUIRE(ema1 < bar);
  CHECK(agent.state().degradation_streak == 0);
  CHECK(agent.state().phase == AgentPhase::OptimizedSteering);

  feed(great, r_great);  // 0.6324
  REQUIRE(ema1 > bar);
  feed(great, r_great);  // 0.6778
  REQUIRE(ema1 > bar);
  CHECK(agent.state().degradation_streak == 2);
  CHECK(agent.state().phase == AgentPhase::OptimizedSteering);
  feed(great, r_great);  // 0.7175, third in a row
  REQUIRE(ema1 > bar);

  CHECK(agent.state().phase == AgentPhase::Learning);
  CHECK(agent.phase_transitions() == 2);
  CHECK_FALSE(agent.state().learned_path.has_value());
  CHECK(agent.state().degradation_streak == 0);
  CHECK(agent.state().probes_since_switch == 0);
  CHECK(agent.state().probs == std::vector<double>{0.5, 0.5});
}

TEST_CASE("a collapsed learned-path ema alone triggers re-exploration") {
  AgentConfig cfg = exact_config(0.5);
  cfg.p_conv = 0.55;
  SlaAgent agent(cfg, 0, 2, Rng(3));
  agent.on_report(midpoint_report(0));
  REQUIRE(agent.state().phase == AgentPhase::OptimizedSteering);

  // Terrible probes on the learned path decay ema[0] by 1 - gamma per step:
  // 0.4375, 0.3828, 0.3350, 0.2931. The first sits above theta_low, the next
  // three sit below it, so the flip lands on the fourth probe.
  const TelemetryReport terrible = make_report(0, true, 1000, 1000000);
  agent.on_report(terrible);
  REQUIRE(agent.state().ema[0] >= cfg.theta_low);
  CHECK(agent.state().degradation_streak == 0);
  agent.on_report(terrible);
  REQUIRE(agent.state().ema[0] < cfg.theta_low);
  CHECK(agent.state().degradation_streak == 1);
  agent.on_report(terrible);
  CHECK(agent.state().degradation_streak == 2);
  CHECK(agent.state().phase == AgentPhase::OptimizedSteering);
  agent.on_report(terrible);
  CHECK(agent.state().phase == AgentPhase::Learning);
}

TEST_CASE("probes in the learning phase only feed the ema") {
  SlaAgent agent(exact_config(0.5), 0, 2, Rng(5));
  const auto d = agent.on_report(make_report(1, true, 0, 0));
  CHECK_FALSE(d.has_value());
  CHECK(agent.updates_applied() == 0);
  CHECK(agent.state().probs == std::vector<double>{0.5, 0.5});
  CHECK(agent.state().ema[1] > 0.5);
  CHECK(agent.state().probes_since_switch == 1);
}

TEST_CASE("reports naming an unknown path are counted and ignored") {
  SlaAgent agent(exact_config(0.5), 0, 2, Rng(5));
  const std::vector<double> probs = agent.state().probs;
  const std::vector<double> ema = agent.state().ema;
  for (bool probe : {false, true}) {
    const auto d = agent.on_report(make_report(2, probe, 20, 500));
    CHECK_FALSE(d.has_value());
  }
  CHECK(agent.rejected_reports() == 2);
  CHECK(agent.updates_applied() == 0);
  CHECK(agent.state().probs == probs);
  CHECK(agent.state().ema == ema);
  CHECK(agent.state().phase == AgentPhase::Learning);
}

TEST_CASE("initial state is uniform with a neutral ema prior") {
  SUBCASE("exact") {
    SlaAgent agent(exact_config(0.5), 0, 2, Rng(1));
    CHECK(agent.state().probs == std::vector<double>{0.5, 0.5});
    CHECK(agent.state().ema == std::vector<double>{0.5, 0.5});
    CHECK(agent.state().phase == AgentPhase::Learning);
    CHECK_FALSE(agent.state().learned_path.has_value());
  }
  SUBCASE("constrained, three segments") {
    AgentConfig cfg = exact_config(0.5);
    cfg.backend = BackendKind::Constrained;
    SlaAgent agent(cfg, 0, 3, Rng(1));
    double sum = 0.0;
    for (double p : agent.state().probs) {
      CHECK(std::abs(p - 1.0 / 3.0) <= 1.0 / 65536.0);
      sum += p;
    }
    CHECK(sum == 1.0);  // residual spreading makes the raw masses sum to one
    for (double e : agent.state().ema) CHECK(e == 0.5);
  }
}

TEST_CASE("select_path draws with the stated probabilities") {
  SUBCASE("degenerate vectors") {
    Rng rng(11);
    std::vector<double> sure_first = {1.0, 0.0};
    std::vector<double> sure_last = {0.0, 1.0};
    for (int i = 0; i < 100; ++i) {
      CHECK(select_path(sure_first, rng) == 0);
      CHECK(select_path(sure_last, rng) == 1);
    }
  }
  SUBCASE("uniform frequencies") {
    Rng rng(42);
    std::vector<double> probs = {0.5, 0.5};
    int zeros = 0;
    for (int i = 0; i < 10000; ++i) {
      if (select_path(probs, rng) == 0) ++zeros;
    }
    CHECK(zeros >= 4800);
    CHECK(zeros <= 5200);
  }
  SUBCASE("weighted frequencies") {
    Rng rng(7);
    std::vector<double> probs = {0.2, 0.3, 0.5};
    std::vector<int> counts(3, 0);
    for (int i = 0; i < 10000; ++i) ++counts[select_path(probs, rng)];
    CHECK(counts[0] >= 1800);
    CHECK(counts[0] <= 2200);
    CHECK(counts[1] >= 2700);
    CHECK(counts[1] <= 3300);
    CHECK(counts[2] >= 4700);
    CHECK(counts[2] <= 5300);
  }
  SUBCASE("empty vector is rejected") {
    Rng rng(1);
    std::vector<double> empty;
    CHECK_THROWS_AS(select_path(empty, rng), std::invalid_argument);
  }
}

TEST_CASE("directive wire format round trips") {
  for (const ControlDirective d : {ControlDirective{0, 0, false},
                                   ControlDirective{7, 3, false},
                                   ControlDirective{0xaabbccdd, 255, true}}) {
    const std::vector<uint8_t> wire = serialize_directive(d);
    REQUIRE(wire.size() == 6);
    CHECK(wire[4] == d.path_index);
    CHECK(wire[5] == (d.is_probe ? 0x01 : 0x00));
    const DirectiveParseResult r = parse_directive(wire);
    REQUIRE(r.ok);
    CHECK(r.directive == d);
  }
}

TEST_CASE("directive parse rejects short buffers and unknown flags") {
  std::vector<uint8_t> wire = serialize_directive({1, 2, false});
  wire.pop_back();
  CHECK_FALSE(parse_directive(wire).ok);
  wire.push_back(0x02);  // only bit 0 is defined
  CHECK_FALSE(parse_directive(wire).ok);
}

TEST_CASE("config validation rejects out-of-range parameters") {
  const AgentConfig good;
  CHECK_NOTHROW(good.validate(2));
  CHECK_THROWS_AS(good.validate(1), std::invalid_argument);

  auto expect_throw = [](auto mutate) {
    AgentConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(2), std::invalid_argument);
  };
  expect_throw([](AgentConfig& c) { c.alpha = 0.0; });
  expect_throw([](AgentConfig& c) { c.alpha = 1.5; });
  expect_throw([](AgentConfig& c) { c.p_conv = 0.5; });  // not above uniform mass
  expect_throw([](AgentConfig& c) { c.p_conv = 1.0; });
  expect_throw([](AgentConfig& c) { c.probe_interval = 0; });
  expect_throw([](AgentConfig& c) { c.ema_gamma = 0.0; });
  expect_throw([](AgentConfig& c) { c.ema_gamma = 1.0; });
  expect_throw([](AgentConfig& c) { c.theta_low = -0.1; });
  expect_throw([](AgentConfig& c) { c.theta_low = 1.1; });
  expect_throw([](AgentConfig& c) { c.delta_improve = -1.0; });
  expect_throw([](AgentConfig& c) { c.window = 0; });
  expect_throw([](AgentConfig& c) { c.reward.beta1 = 0.7; });  // weights must sum to one
}
