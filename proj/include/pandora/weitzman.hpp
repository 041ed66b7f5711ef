#pragma once

// Reservation values, kappa variables and Weitzman's obligatory-inspection
// policy. These are the building blocks every other module calls.
//
// sigma_i solves E[(v_i - sigma)^+] = c_i exactly on the piecewise-linear
// inverse; kappa_i = min(v_i, sigma_i). E[max_{i in U} kappa_i, alpha] is
// the utility of Weitzman's policy with outside option alpha.

#include "pandora/model.hpp"

#include <unordered_map>

namespace pandora {

struct ReservationIndex {
  Rat sigma;
  DiscreteDistribution kappa;
};

// Unique sigma with E[(v - sigma)^+] = c when c > 0; may be negative when
// c > E[v]. For c = 0 returns the maximum support value (deterministic
// selection from the solution ray), which keeps kappa = v pointwise.
Rat reservation_value(const BoxSpec& box);

// Distribution of min(v, sigma); a point mass at sigma when sigma is below
// the whole support.
DiscreteDistribution kappa_distribution(const BoxSpec& box);

ReservationIndex reservation_index(const BoxSpec& box);

// Distribution of max_{w in U} kappa_w for independent boxes, computed from
// CDF products on the combined support (no joint enumeration). U nonempty.
DiscreteDistribution max_kappa_distribution(const Instance& inst, BoxSet U);

// E[max(max_{w in U} kappa_w, alpha)]; equals alpha when U is empty.
Rat weitz_value(const Instance& inst, BoxSet U, const Rat& alpha);

// Open the argmax-sigma box while max sigma > alpha (strict; ties stop),
// lowest index on sigma ties. Never returns Close.
Action weitzman_action(const Instance& inst, const State& s);

// Brute-force optimal utility with Close disallowed; independent
// cross-check of weitz_value. |U| <= 20.
Rat obligatory_opt(const Instance& inst, BoxSet U, const Rat& alpha);

// Largest alpha >= 0 with E[max(W, alpha)] = target, on the piecewise-linear
// Weitz function. Requires target >= E[max(W, 0)].
Rat solve_weitz_equation(const DiscreteDistribution& W, const Rat& target);

// Smallest w >= 0 with E[(W - w)^+] <= target (the map is nonincreasing).
Rat solve_minus_plus_inverse(const DiscreteDistribution& W, const Rat& target);

// Per-instance cache of reservation indices and max-kappa distributions by
// mask. Read-only after construction apart from the memo tables; intended
// for single-threaded use inside solvers.
class WeitzCache {
 public:
  explicit WeitzCache(const Instance& inst);

  const Instance& instance() const { return *inst_; }
  const ReservationIndex& reservation(int box) const { return res_[box]; }
  const DiscreteDistribution& max_kappa(BoxSet U);  // U nonempty

  Rat weitz(BoxSet U, const Rat& alpha);
  // E[(max_{w in U} kappa_w - x)^+]; 0 when U is empty.
  Rat weitz_minus_plus(BoxSet U, const Rat& x);

 private:
  const Instance* inst_;
  std::vector<ReservationIndex> res_;
  std::unordered_map<std::uint64_t, DiscreteDistribution> max_dist_;
};

}  // namespace pandora
