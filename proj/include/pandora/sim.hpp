#pragma once

// Seeded Monte Carlo execution of policies against sampled prize vectors.
// Prize draws come from a counter-based generator keyed by (seed, sample,
// box), so parallel workers reproduce the sequential sample set exactly and
// results are bit-identical for any job count. Sampled values are exact
// support atoms chosen by CDF inversion; floating point enters only in the
// accumulators.

#include "pandora/exact.hpp"
#include "pandora/model.hpp"
#include "pandora/twophase.hpp"

#include <functional>
#include <memory>

namespace pandora {

struct PerBoxStats {
  double inspected_freq = 0;
  double selected_freq = 0;
  // E[A_i v_i - I_i c_i] - E[A_i kappa_i], with standard error: zero for
  // non-exposed policies (per-box utility identity).
  double net_minus_kappa_mean = 0;
  double net_minus_kappa_se = 0;
  // E[(I_i - A_i)(v_i - sigma_i)^+], with standard error: a positive mean
  // witnesses an exposed policy.
  double exposure_gap_mean = 0;
  double exposure_gap_se = 0;
};

struct SimStats {
  std::uint64_t samples = 0;
  double mean = 0;
  double std_error = 0;
  std::vector<PerBoxStats> per_box;

  bool operator==(const SimStats& o) const;
};

// A policy instance owning per-trajectory state. `next` sees the current
// state (uninspected set, best observed value); `observe` reports the prize
// revealed by the open the policy just requested.
class TrajectoryPolicy {
 public:
  virtual ~TrajectoryPolicy() = default;
  virtual Action next(const State& s) = 0;
  virtual void observe(int box, const Rat& value) { (void)box; (void)value; }
};

using PolicyFactory = std::function<std::unique_ptr<TrajectoryPolicy>()>;

// Runs n_samples trajectories. Utility per sample is the exact
// sum(A_i v_i - I_i c_i) with Stop counted as selecting the best inspected
// box. Throws on invalid policy actions (reopening, closing an unavailable
// box). jobs <= 0 means hardware concurrency.
SimStats simulate(const Instance& inst, const PolicyFactory& policy, std::uint64_t n_samples,
                  std::uint64_t seed, int jobs = 1);

// Ready-made policies.
PolicyFactory weitzman_policy(const Instance& inst);
PolicyFactory optimal_policy(const Instance& inst, const ValueTable& table);
PolicyFactory two_phase_sim_policy(const Instance& inst, const TwoPhasePolicy& pol);

std::string sim_stats_to_json(const SimStats& stats);

// Deterministic atom draw for (seed, sample, box); exposed for tests.
int sample_atom(const DiscreteDistribution& d, std::uint64_t seed, std::uint64_t sample,
                int box);

}  // namespace pandora
