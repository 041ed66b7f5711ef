#pragma once

// The n+1 committing policies: pure Weitzman, or Weitzman over all boxes
// but i with box i available only as a closed claim, modeled as an outside
// option worth E[v_i]. The best of them is a 0.8-approximation.

#include "pandora/model.hpp"

#include <utility>

namespace pandora {

struct CommittingChoice {
  bool weitzman = true;
  int backup = -1;

  static CommittingChoice pure() { return {}; }
  static CommittingChoice with_backup(int i) { return {false, i}; }
  bool operator==(const CommittingChoice& o) const {
    return weitzman == o.weitzman && (weitzman || backup == o.backup);
  }
};

// Weitzman -> weitz_value(M, 0); Backup(i) -> weitz_value(M \ {i}, E[v_i]).
Rat eval_committing(const Instance& inst, const CommittingChoice& choice);

// Argmax over the n+1 choices, ties broken Weitzman < Backup(0) < ...
std::pair<CommittingChoice, Rat> best_committing(const Instance& inst);

}  // namespace pandora
