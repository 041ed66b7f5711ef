#include "pandora/weitzman.hpp"

#include <algorithm>
#include <map>

namespace pandora {

Rat reservation_value(const BoxSpec& box) {
  const auto& atoms = box.dist.atoms();
  if (box.cost == 0) return box.dist.max_value();
  // d(s) = E[(v - s)^+] is convex piecewise linear, decreasing where positive,
  // with breakpoints at the atoms; below the minimum support d(s) = E[v] - s.
  Rat d_min = box.dist.expected_minus_plus(box.dist.min_value());
  if (box.cost >= d_min) return box.dist.min_value() - (box.cost - d_min);
  // Walk segments [t_j, t_{j+1}] from the top; slope is -P[v > t_j].
  for (int j = static_cast<int>(atoms.size()) - 2; j >= 0; --j) {
    Rat d_j = box.dist.expected_minus_plus(atoms[j].value);
    if (d_j >= box.cost) {
      Rat tail = 0;
      for (std::size_t l = j + 1; l < atoms.size(); ++l) tail += atoms[l].prob;
      return atoms[j].value + (d_j - box.cost) / tail;
    }
  }
  throw std::logic_error("reservation_value: no segment found");
}

DiscreteDistribution kappa_distribution(const BoxSpec& box) {
  Rat sigma = reservation_value(box);
  // Clipped atoms may collide at sigma; from_raw merges them, and allows a
  // negative sigma (c > E[v]).
  std::vector<Atom> atoms;
  for (const auto& a : box.dist.atoms())
    atoms.push_back(Atom{rat_min(a.value, sigma), a.prob});
  return DiscreteDistribution::from_raw(std::move(atoms));
}

ReservationIndex reservation_index(const BoxSpec& box) {
  return ReservationIndex{reservation_value(box), kappa_distribution(box)};
}

DiscreteDistribution max_kappa_distribution(const Instance& inst, BoxSet U) {
  std::vector<DiscreteDistribution> parts;
  for (int i = 0; i < inst.size(); ++i)
    if (U.contains(i)) parts.push_back(kappa_distribution(inst.box(i)));
  if (parts.empty()) throw std::invalid_argument("max_kappa_distribution: empty set");
  return max_distribution(parts);
}

Rat weitz_value(const Instance& inst, BoxSet U, const Rat& alpha) {
  if (U.empty()) return alpha;
  return max_kappa_distribution(inst, U).expected_max_with(alpha);
}

Action weitzman_action(const Instance& inst, const State& s) {
  int best = -1;
  Rat best_sigma;
  for (int i = 0; i < inst.size(); ++i) {
    if (!s.uninspected.contains(i)) continue;
    Rat sigma = reservation_value(inst.box(i));
    if (best < 0 || sigma > best_sigma) {
      best = i;
      best_sigma = sigma;
    }
  }
  if (best >= 0 && best_sigma > s.outside) return Action::open(best);
  return Action::stop();
}

namespace {

Rat obligatory_opt_rec(const Instance& inst, BoxSet U, const Rat& alpha,
                       std::map<std::pair<std::uint64_t, Rat>, Rat>& memo) {
  if (U.empty()) return alpha;
  auto key = std::make_pair(U.mask, alpha);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  Rat best = alpha;  // Stop
  for (int i = 0; i < inst.size(); ++i) {
    if (!U.contains(i)) continue;
    Rat val = -inst.box(i).cost;
    for (const auto& a : inst.box(i).dist.atoms())
      val += a.prob * obligatory_opt_rec(inst, U.without(i), rat_max(alpha, a.value), memo);
    if (val > best) best = val;
  }
  memo.emplace(key, best);
  return best;
}

}  // namespace

Rat obligatory_opt(const Instance& inst, BoxSet U, const Rat& alpha) {
  if (U.count() > 20)
    throw BudgetError("obligatory_opt: |U| = " + std::to_string(U.count()) + " exceeds 20");
  std::map<std::pair<std::uint64_t, Rat>, Rat> memo;
  return obligatory_opt_rec(inst, U, alpha, memo);
}

Rat solve_weitz_equation(const DiscreteDistribution& W, const Rat& target) {
  // Breakpoints of g(a) = E[max(W, a)] restricted to a >= 0.
  std::vector<Rat> brk{Rat(0)};
  for (const auto& a : W.atoms())
    if (a.value > 0) brk.push_back(a.value);
  // Above the last breakpoint g(a) = a exactly (all mass below).
  Rat g_top = W.expected_max_with(brk.back());
  if (target >= g_top) return brk.back() + (target - g_top);
  for (int j = static_cast<int>(brk.size()) - 2; j >= 0; --j) {
    Rat g_j = W.expected_max_with(brk[j]);
    if (g_j <= target) {
      Rat slope = W.cdf(brk[j]);  // positive here, or g would be flat = g_{j+1}
      return brk[j] + (target - g_j) / slope;
    }
  }
  throw std::logic_error("solve_weitz_equation: target below E[max(W, 0)]");
}

Rat solve_minus_plus_inverse(const DiscreteDistribution& W, const Rat& target) {
  if (W.expected_minus_plus(Rat(0)) <= target) return Rat(0);
  // d(w) = E[(W - w)^+] decreases with slope -P[W > t_j] on [t_j, t_{j+1}].
  Rat lo = 0;
  for (const auto& a : W.atoms()) {
    Rat t = rat_max(a.value, Rat(0));
    if (W.expected_minus_plus(t) <= target) {
      Rat d_lo = W.expected_minus_plus(lo);
      Rat tail = 1 - W.cdf(lo);
      return lo + (d_lo - target) / tail;
    }
    lo = t;
  }
  throw std::logic_error("solve_minus_plus_inverse: unreachable");
}

WeitzCache::WeitzCache(const Instance& inst) : inst_(&inst) {
  res_.reserve(inst.size());
  for (int i = 0; i < inst.size(); ++i) res_.push_back(reservation_index(inst.box(i)));
}

const DiscreteDistribution& WeitzCache::max_kappa(BoxSet U) {
  auto it = max_dist_.find(U.mask);
  if (it != max_dist_.end()) return it->second;
  DiscreteDistribution d = max_kappa_distribution(*inst_, U);
  return max_dist_.emplace(U.mask, std::move(d)).first->second;
}

Rat WeitzCache::weitz(BoxSet U, const Rat& alpha) {
  if (U.empty()) return alpha;
  return max_kappa(U).expected_max_with(alpha);
}

Rat WeitzCache::weitz_minus_plus(BoxSet U, const Rat& x) {
  if (U.empty()) return Rat(0);
  return max_kappa(U).expected_minus_plus(x);
}

}  // namespace pandora
