#pragma once

// Brute-force optimal-policy oracle. Memoizes OPT(U, alpha) over all box
// subsets and outside options on the grid {0} ∪ Θ; reachable outside
// options are maxima of observed support values, so the table is exact
// rather than a discretization.
//
// Bellman recurrence:
//   OPT(U, a) = max( a,
//                    max_{i in U} E[v_i],
//                    max_{i in U} -c_i + E[OPT(U \ {i}, max(a, v_i))] )
// Tie-break order Stop < Close < Open, lowest box index within a branch.

#include "pandora/model.hpp"

#include <optional>

namespace pandora {

class ValueTable {
 public:
  struct Entry {
    Rat value;
    Action action;
    bool uses_backup = false;
  };

  const Entry& at(BoxSet U, const Rat& alpha) const;
  const Rat& opt() const { return at(full_, Rat(0)).value; }
  const std::vector<Rat>& grid() const { return grid_; }
  BoxSet full_set() const { return full_; }
  int num_boxes() const { return n_; }

  // Grid index of alpha; throws for off-grid values.
  int grid_index(const Rat& alpha) const;

 private:
  friend ValueTable solve(const Instance&);
  int n_ = 0;
  BoxSet full_;
  std::vector<Rat> grid_;                   // {0} ∪ Θ, sorted
  std::vector<std::vector<Entry>> table_;   // [mask][grid index]
};

// Solves the full table. n <= 20.
ValueTable solve(const Instance& inst);

// Table lookup; s.outside must be on the grid.
Action optimal_action(const ValueTable& table, const State& s);

// Either NEG (no canonical optimal policy uses a backup box at outside 0)
// or the exact real threshold tau(U) >= 0.
struct ThresholdValue {
  bool neg = true;
  Rat tau;

  static ThresholdValue make_neg() { return ThresholdValue{}; }
  static ThresholdValue of(Rat t) { return ThresholdValue{false, std::move(t)}; }
  bool operator==(const ThresholdValue& o) const {
    return neg == o.neg && (neg || tau == o.tau);
  }
};

std::string threshold_to_string(const ThresholdValue& t);

// NEG when uses_backup(U, 0) is false; otherwise the largest alpha with
// OPT(U, alpha) = OPT(U, 0), i.e. the top solution of
// weitz_value(inst, U, alpha) = OPT(U, 0) on the piecewise-linear Weitz
// function.
ThresholdValue threshold_of_set(const Instance& inst, const ValueTable& table, BoxSet U);

struct CertificateResult {
  Rat utility;
  bool accepted = false;
};

// Appendix-style NP verification: for each cutoff k the phase-one prefix
// pi(1..k-1) is opened with grid thresholds
//   tau(j) = min{ theta in {0} ∪ Θ : W_j(theta) >= OPT_j }   (∞ if none),
// where W_j(theta) is the Weitzman value of the boxes still uninspected
// after step j with outside option theta, and
//   OPT_{j-1} = -c_{pi(j)} + E_theta[ W_j(theta) 1{theta >= tau(j)}
//                                     + OPT_j   1{theta <  tau(j)} ],
// seeded with OPT_{k-1} = E[v_{pi(k)}]. k = 0 is pure Weitzman. Returns the
// max over cutoffs, compared against target.
CertificateResult verify_certificate(const Instance& inst, const std::vector<int>& order,
                                     const Rat& target);

}  // namespace pandora
