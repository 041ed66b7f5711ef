#pragma once

// Deterministic random instance generator for test suites and the `gen`
// subcommand. Probabilities come from a bounded-denominator sampler (a
// random composition of a small denominator), values and costs are small
// nonnegative rationals.

#include "pandora/model.hpp"

namespace pandora {

struct GenParams {
  int n = 3;
  int max_atoms = 3;
  std::uint64_t seed = 0;
  int max_value = 12;        // atom values drawn from [0, max_value]
  int max_cost_num = 4;      // cost numerators from [0, max_cost_num]
  bool allow_zero_cost = true;
};

Instance gen_instance(const GenParams& params);

}  // namespace pandora
