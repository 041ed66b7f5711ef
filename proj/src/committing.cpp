#include "pandora/committing.hpp"

#include "pandora/weitzman.hpp"

namespace pandora {

Rat eval_committing(const Instance& inst, const CommittingChoice& choice) {
  if (choice.weitzman) return weitz_value(inst, inst.full_set(), Rat(0));
  if (choice.backup < 0 || choice.backup >= inst.size())
    throw std::invalid_argument("committing backup box out of range");
  Rat outside = inst.box(choice.backup).dist.expected_value();
  return weitz_value(inst, inst.full_set().without(choice.backup), outside);
}

std::pair<CommittingChoice, Rat> best_committing(const Instance& inst) {
  CommittingChoice best = CommittingChoice::pure();
  Rat best_val = eval_committing(inst, best);
  for (int i = 0; i < inst.size(); ++i) {
    CommittingChoice c = CommittingChoice::with_backup(i);
    Rat val = eval_committing(inst, c);
    if (val > best_val) {
      best = c;
      best_val = val;
    }
  }
  return {best, best_val};
}

}  // namespace pandora
