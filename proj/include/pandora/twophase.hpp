#pragma once

// Two-phase policies: open a fixed order while observed values stay below
// per-step thresholds, claim the final box (the backup) closed if the order
// is exhausted, and switch permanently to Weitzman's policy once a value
// exceeds its threshold (strict comparison; ties stay in phase one).

#include "pandora/exact.hpp"
#include "pandora/model.hpp"

#include <utility>

namespace pandora {

struct TwoPhasePolicy {
  bool pure_weitzman = false;
  std::vector<int> order;                   // pi(1..k); order.back() is the backup
  std::vector<ThresholdValue> thresholds;   // size k-1; NEG = transition on any value

  static TwoPhasePolicy weitzman() { return TwoPhasePolicy{true, {}, {}}; }
};

// Shared parameterization of two-phase, TP, DTP and ST policies:
// ord = (i_1..i_k, tau_1..tau_k) plus a backup box excluded from the order.
struct IndexThresholdSequence {
  int backup = 0;
  std::vector<int> order;
  std::vector<Rat> thresholds;  // same length as order, all >= 0
};

// Validates distinctness/lengths; throws ValidationError.
void validate_sequence(const Instance& inst, const IndexThresholdSequence& ord);

// The two-phase policy whose order.back() is the backup; ord thresholds
// carry over unchanged.
TwoPhasePolicy to_two_phase(const IndexThresholdSequence& ord);

// tau(j) = threshold_of_set on the boxes still uninspected after step j.
TwoPhasePolicy compute_thresholds(const Instance& inst, const ValueTable& table,
                                  const std::vector<int>& order);

// Exact expected utility of the policy by the backward recurrence
//   U_{>=k} = E[v_{pi(k)}]
//   U_{>=j} = -c_{pi(j)} + P[v <= tau_j] U_{>=j+1}
//             + E[ weitz(remaining after j, v) 1{v > tau_j} ].
Rat eval_two_phase(const Instance& inst, const TwoPhasePolicy& pol);

// The suffix values U_{>=1..k} of the recurrence above (for structure tests).
std::vector<Rat> two_phase_suffix_values(const Instance& inst, const TwoPhasePolicy& pol);

// Next action during execution. phase_two tracks whether a transition has
// occurred; in phase one the step is the first order box still uninspected.
Action two_phase_action(const Instance& inst, const TwoPhasePolicy& pol, const State& s,
                        bool phase_two);

// Cost-free utility formula for stage-non-exposed sequences
// (tau_j <= sigma_{i_j} for all j):
//   sum_j E[X_j (E_{v>tau_j}[kappa_{i_j}]
//                + E_{v>tau_j}[(Weitz_{after j} - v)^+])]
//   + E[(1 - sum_j X_j) v_{i*}]
// where X_j indicates the phase transition happening at step j. Must equal
// eval_two_phase on the same parameters.
Rat stage_non_exposed_utility(const Instance& inst, const IndexThresholdSequence& ord);

// Exhaustive search over pure Weitzman and all ordered subsets (the optimal
// phase-one prefix may omit boxes; they stay available to phase-two
// Weitzman), thresholds from compute_thresholds. Canonical argmax: pure
// Weitzman first, then lexicographically smallest order. n <= 8.
std::pair<TwoPhasePolicy, Rat> best_two_phase(const Instance& inst);

// Policy JSON: {"pure_weitzman":false,"order":[0,1],"thresholds":["5/9"]}
// (thresholds may be "NEG").
std::string policy_to_json(const TwoPhasePolicy& pol);
TwoPhasePolicy policy_from_json(const std::string& text);

}  // namespace pandora
