#include "pandora/gen.hpp"

#include <set>

namespace pandora {

namespace {

struct Rng {
  std::uint64_t state;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, bound)
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }
};

}  // namespace

Instance gen_instance(const GenParams& params) {
  if (params.n < 1 || params.n > 63)
    throw ValidationError("gen: n must be in [1, 63]");
  if (params.max_atoms < 1) throw ValidationError("gen: max_atoms must be >= 1");
  Rng rng{params.seed ^ 0xD1B54A32D192ED03ull};

  std::vector<BoxSpec> boxes;
  for (int i = 0; i < params.n; ++i) {
    const int atoms = 1 + static_cast<int>(rng.below(params.max_atoms));
    // distinct values with small denominators
    std::set<Rat> values;
    while (static_cast<int>(values.size()) < atoms) {
      std::uint64_t den = 1 + rng.below(3);  // 1..3
      std::uint64_t num = rng.below(params.max_value * den + 1);
      values.insert(Rat(BigInt(num), BigInt(den)));
    }
    // probabilities: composition of a bounded denominator
    const std::uint64_t den = atoms + rng.below(9);  // atoms .. atoms+8
    std::vector<std::uint64_t> parts(atoms, 1);
    for (std::uint64_t rest = den - atoms; rest > 0; --rest) parts[rng.below(atoms)] += 1;
    std::vector<Atom> dist;
    auto it = values.begin();
    for (int k = 0; k < atoms; ++k, ++it)
      dist.push_back(Atom{*it, Rat(BigInt(parts[k]), BigInt(den))});

    Rat cost;
    if (params.allow_zero_cost && rng.below(6) == 0) {
      cost = 0;
    } else {
      std::uint64_t cden = 1 + rng.below(4);
      std::uint64_t cnum = rng.below(params.max_cost_num * cden) + 1;
      cost = Rat(BigInt(cnum), BigInt(cden));
    }
    boxes.push_back(BoxSpec{DiscreteDistribution::from_atoms(std::move(dist), i), cost});
  }
  return Instance(std::move(boxes));
}

}  // namespace pandora
