#include "pandora/ptas.hpp"

#include "pandora/committing.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace pandora {

using nlohmann::json;

std::string extrat_to_string(const ExtRat& x) {
  return x.inf ? "inf" : rat_to_string(x.v);
}

namespace {

// (a - b)^+ with b possibly infinite.
Rat minus_plus_ext(const Rat& a, const ExtRat& b) {
  if (b.inf) return Rat(0);
  return rat_plus(a - b.v);
}

void check_epsilon(const Rat& epsilon) {
  if (!(epsilon > 0) || epsilon > Rat(1, 4))
    throw ValidationError("epsilon " + rat_to_string(epsilon) + " outside (0, 1/4]");
}

Rat expected_max_value(const Instance& inst) {
  std::vector<DiscreteDistribution> parts;
  for (const auto& b : inst.boxes()) parts.push_back(b.dist);
  return max_distribution(parts).expected_value();
}

std::vector<Rat> make_threshold_grid(const Rat& epsilon, const Rat& opt_ref) {
  std::vector<Rat> grid;
  Rat step = epsilon * opt_ref;
  for (Rat t = 0; t <= opt_ref; t += step) grid.push_back(t);
  if (grid.back() != opt_ref) grid.push_back(opt_ref);
  return grid;
}

// Shared core of build_scheme/enumerate_supports; wc memoizes max-kappa
// distributions across orders.
DiscretizationScheme build_scheme_impl(const Instance& inst, const std::vector<int>& order,
                                       const Rat& epsilon, const Rat& opt_ref,
                                       WeitzCache& wc) {
  check_epsilon(epsilon);
  if (opt_ref <= 0) throw ValidationError("opt_ref must be positive");

  DiscretizationScheme scheme;
  scheme.epsilon = epsilon;
  scheme.opt_ref = opt_ref;
  scheme.v_upper = expected_max_value(inst) / epsilon;
  scheme.threshold_grid = make_threshold_grid(epsilon, opt_ref);

  const Rat g2 = scheme.kappa_grid();
  const Rat bucket_gap = g2;                                  // eps^2 opt_ref
  const Rat step_gap = epsilon * (1 - 3 * epsilon) * opt_ref;  // eps(1-3eps) opt_ref

  const int k = static_cast<int>(order.size());
  // E[Weitz] at each position; U_j is everything not yet opened.
  std::vector<Rat> eweitz(k);
  {
    BoxSet u = inst.full_set();
    for (int j = 0; j < k; ++j) {
      eweitz[j] = wc.max_kappa(u).expected_value();
      u = u.without(order[j]);
    }
  }

  // Maximal consecutive buckets with E[Weitz_first] - E[Weitz_last] small.
  int f = 0;
  for (int j = 0; j < k; ++j) {
    if (j + 1 == k || eweitz[f] - eweitz[j + 1] > bucket_gap) {
      scheme.buckets.push_back(Bucket{f + 1, j + 1, {}});
      f = j + 1;
    }
  }

  // Per-bucket value supports, built top-down on the first-position Weitz.
  BoxSet u = inst.full_set();
  int pos = 0;
  for (auto& bucket : scheme.buckets) {
    while (pos < bucket.first_pos - 1) u = u.without(order[pos++]);
    const DiscreteDistribution& w = wc.max_kappa(u);
    std::vector<Rat> sup;
    Rat cur = floor_to_multiple(scheme.v_upper, g2);
    sup.push_back(cur);
    while (cur > 0) {
      Rat target = w.expected_minus_plus(cur) + step_gap;
      Rat next = ceil_to_multiple(solve_minus_plus_inverse(w, target), g2);
      if (next >= cur) next = cur - g2;  // one grid step is always admissible
      if (next < 0) next = 0;
      sup.push_back(next);
      cur = next;
    }
    std::reverse(sup.begin(), sup.end());
    bucket.supports = std::move(sup);
  }

  // W = union of bucket supports ∪ W_L (∞ implicit).
  std::set<Rat> values{Rat(0)};
  for (const auto& b : scheme.buckets) values.insert(b.supports.begin(), b.supports.end());
  for (const auto& t : scheme.threshold_grid)
    if (t <= scheme.v_upper) values.insert(t);
  scheme.value_support.assign(values.begin(), values.end());
  return scheme;
}

}  // namespace

DiscretizationScheme build_scheme(const Instance& inst, int backup,
                                  const IndexThresholdSequence& ord_hint, const Rat& epsilon,
                                  const Rat& opt_ref) {
  (void)backup;  // the support construction depends on the order only
  std::vector<bool> seen(inst.size(), false);
  for (int b : ord_hint.order) {
    if (b < 0 || b >= inst.size())
      throw ValidationError("order names box " + std::to_string(b));
    if (seen[b]) throw ValidationError("box " + std::to_string(b) + " repeated in order");
    seen[b] = true;
  }
  WeitzCache wc(inst);
  return build_scheme_impl(inst, ord_hint.order, epsilon, opt_ref, wc);
}

DiscretizationScheme scheme_from_support(const Instance& inst, std::vector<Rat> support,
                                         const Rat& epsilon, const Rat& opt_ref) {
  check_epsilon(epsilon);
  if (opt_ref <= 0) throw ValidationError("opt_ref must be positive");
  DiscretizationScheme scheme;
  scheme.epsilon = epsilon;
  scheme.opt_ref = opt_ref;
  scheme.v_upper = expected_max_value(inst) / epsilon;
  scheme.threshold_grid = make_threshold_grid(epsilon, opt_ref);
  std::set<Rat> values{Rat(0)};
  for (auto& v : support)
    if (v >= 0 && v <= scheme.v_upper) values.insert(std::move(v));
  scheme.value_support.assign(values.begin(), values.end());
  return scheme;
}

std::vector<std::vector<Rat>> enumerate_supports(const Instance& inst, const Rat& epsilon,
                                                 const Rat& opt_ref, bool prune,
                                                 std::uint64_t budget) {
  check_epsilon(epsilon);
  if (opt_ref <= 0) throw ValidationError("opt_ref must be positive");
  const int n = inst.size();

  if (prune) {
    // Ordered subsets of the boxes; the scheme of the unknown optimal order
    // is among them.
    BigInt count = 0;
    {
      BigInt perms = 1;
      for (int k = 1; k <= n; ++k) {
        perms *= (n - k + 1);
        count += perms;
      }
    }
    if (count > budget)
      throw BudgetError("enumerate_supports: " + count.str() +
                        " order candidates exceed budget " + std::to_string(budget));
    WeitzCache wc(inst);
    std::set<std::vector<Rat>> outs;
    std::vector<int> order;
    auto rec = [&](auto&& self) -> void {
      if (!order.empty())
        outs.insert(build_scheme_impl(inst, order, epsilon, opt_ref, wc).value_support);
      if (static_cast<int>(order.size()) == n) return;
      for (int b = 0; b < n; ++b) {
        if (std::find(order.begin(), order.end(), b) != order.end()) continue;
        order.push_back(b);
        self(self);
        order.pop_back();
      }
    };
    rec(rec);
    return {outs.begin(), outs.end()};
  }

  // Unpruned: every sorted subset of the grid multiples below V_U that
  // contains 0, within the constructive size bound.
  const Rat g2 = epsilon * epsilon * opt_ref;
  const Rat v_upper = expected_max_value(inst) / epsilon;
  const Rat ratio = v_upper / g2;
  BigInt top = numerator(ratio) / denominator(ratio);
  if (top < 0) top = 0;
  std::uint64_t positives =
      top > 1'000'000 ? 1'000'001 : top.convert_to<std::uint64_t>();

  std::uint64_t size_bound;
  if (epsilon < Rat(1, 4)) {
    Rat per = 1 / (epsilon * (1 - 4 * epsilon));
    std::uint64_t per_bucket =
        (numerator(per) / denominator(per)).convert_to<std::uint64_t>() + 2;
    Rat lb = 1 / (epsilon * epsilon);
    std::uint64_t buckets =
        (numerator(lb) / denominator(lb)).convert_to<std::uint64_t>() + 1;
    size_bound = buckets * per_bucket + make_threshold_grid(epsilon, opt_ref).size() + 1;
  } else {
    size_bound = positives;  // degenerate bound at eps = 1/4
  }
  size_bound = std::min<std::uint64_t>(size_bound, positives);

  BigInt count = 0;
  {
    BigInt c = 1;
    for (std::uint64_t t = 0; t <= size_bound; ++t) {
      count += c;
      c = c * (positives - t) / (t + 1);
    }
  }
  if (count > budget)
    throw BudgetError("enumerate_supports: " + count.str() +
                      " subset candidates exceed budget " + std::to_string(budget));

  std::vector<std::vector<Rat>> outs;
  std::vector<Rat> cur{Rat(0)};
  auto rec = [&](auto&& self, std::uint64_t next) -> void {
    outs.push_back(cur);
    if (cur.size() - 1 >= size_bound) return;
    for (std::uint64_t m = next; m <= positives; ++m) {
      cur.push_back(Rat(m) * g2);
      self(self, m + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return outs;
}

Rat round_kappa(const Rat& x, const DiscretizationScheme& scheme) {
  return floor_to_multiple(x, scheme.kappa_grid());
}

ExtRat round_value(const Rat& x, const DiscretizationScheme& scheme) {
  if (x > scheme.v_upper) return ExtRat::infinity();
  auto it = std::lower_bound(scheme.value_support.begin(), scheme.value_support.end(), x);
  if (it == scheme.value_support.end()) return ExtRat::infinity();
  return ExtRat::of(*it);
}

namespace {

void check_stage_non_exposed(const IndexThresholdSequence& ord, const WeitzCache& wc) {
  for (std::size_t j = 0; j < ord.order.size(); ++j)
    if (ord.thresholds[j] > wc.reservation(ord.order[j]).sigma)
      throw ValidationError("tau_" + std::to_string(j + 1) + " = " +
                            rat_to_string(ord.thresholds[j]) + " > sigma of box " +
                            std::to_string(ord.order[j]));
}

}  // namespace

Rat eval_TP(const Instance& inst, int backup, const IndexThresholdSequence& ord) {
  IndexThresholdSequence full = ord;
  full.backup = backup;
  validate_sequence(inst, full);
  WeitzCache wc(inst);
  check_stage_non_exposed(full, wc);

  Rat total = 0;
  Rat stay = 1;
  BoxSet remaining = inst.full_set();
  for (std::size_t j = 0; j < full.order.size(); ++j) {
    const int b = full.order[j];
    const Rat& sigma = wc.reservation(b).sigma;
    remaining = remaining.without(b);
    Rat step = 0;
    Rat p_stay = 0;
    for (const auto& a : inst.box(b).dist.atoms()) {
      if (a.value > full.thresholds[j])
        step += a.prob * (rat_min(a.value, sigma) + wc.weitz_minus_plus(remaining, a.value));
      else
        p_stay += a.prob;
    }
    total += stay * step;
    stay *= p_stay;
  }
  return total + stay * inst.box(backup).dist.expected_value();
}

namespace {

// Discretized kappa machinery shared by eval_DTP and the ST program.
class DiscretizedKappa {
 public:
  DiscretizedKappa(const Instance& inst, const DiscretizationScheme& scheme)
      : inst_(&inst), scheme_(&scheme) {
    for (int i = 0; i < inst.size(); ++i) {
      ReservationIndex r = reservation_index(inst.box(i));
      sigmas_.push_back(r.sigma);
      std::vector<Atom> atoms;
      for (const auto& a : r.kappa.atoms())
        atoms.push_back(Atom{round_kappa(a.value, scheme), a.prob});
      tilde_.push_back(DiscreteDistribution::from_raw(std::move(atoms)));
    }
  }

  const Rat& sigma(int i) const { return sigmas_[i]; }
  Rat kappa_tilde(int i, const Rat& v) const {
    return round_kappa(rat_min(v, sigmas_[i]), *scheme_);
  }

  // Max of the discretized kappas over U.
  const DiscreteDistribution& max_tilde(BoxSet U) {
    auto it = memo_.find(U.mask);
    if (it != memo_.end()) return it->second;
    std::vector<DiscreteDistribution> parts;
    for (int i = 0; i < inst_->size(); ++i)
      if (U.contains(i)) parts.push_back(tilde_[i]);
    return memo_.emplace(U.mask, max_distribution(parts)).first->second;
  }

  // E[(Weitz-tilde over U - x)^+], 0 for empty U or infinite x.
  Rat weitz_tilde_minus_plus(BoxSet U, const ExtRat& x) {
    if (x.inf || U.empty()) return Rat(0);
    return max_tilde(U).expected_minus_plus(x.v);
  }

 private:
  const Instance* inst_;
  const DiscretizationScheme* scheme_;
  std::vector<Rat> sigmas_;
  std::vector<DiscreteDistribution> tilde_;
  std::map<std::uint64_t, DiscreteDistribution> memo_;
};

}  // namespace

Rat eval_DTP(const Instance& inst, int backup, const IndexThresholdSequence& ord,
             const DiscretizationScheme& scheme) {
  IndexThresholdSequence full = ord;
  full.backup = backup;
  validate_sequence(inst, full);
  DiscretizedKappa dk(inst, scheme);
  for (std::size_t j = 0; j < full.order.size(); ++j) {
    const Rat& tau = full.thresholds[j];
    if (!std::binary_search(scheme.threshold_grid.begin(), scheme.threshold_grid.end(), tau))
      throw ValidationError("tau_" + std::to_string(j + 1) + " = " + rat_to_string(tau) +
                            " is off the threshold grid");
    if (tau > dk.sigma(full.order[j]))
      throw ValidationError("tau_" + std::to_string(j + 1) + " = " + rat_to_string(tau) +
                            " > sigma of box " + std::to_string(full.order[j]));
  }

  Rat total = 0;
  Rat stay = 1;
  BoxSet remaining = inst.full_set();
  for (std::size_t j = 0; j < full.order.size(); ++j) {
    const int b = full.order[j];
    remaining = remaining.without(b);
    Rat step = 0;
    Rat p_stay = 0;
    for (const auto& a : inst.box(b).dist.atoms()) {
      if (a.value > full.thresholds[j])
        step += a.prob * (dk.kappa_tilde(b, a.value) +
                          dk.weitz_tilde_minus_plus(remaining, round_value(a.value, scheme)));
      else
        p_stay += a.prob;
    }
    total += stay * step;
    stay *= p_stay;
  }
  return total + stay * inst.box(backup).dist.expected_value();
}

StochasticDynamicProgram::StochasticDynamicProgram(const Instance& inst, int backup,
                                                   DiscretizationScheme scheme)
    : inst_(&inst), backup_(backup), scheme_(std::move(scheme)) {
  if (backup < 0 || backup >= inst.size())
    throw std::invalid_argument("backup box out of range");
  for (int i = 0; i < inst.size(); ++i) sigmas_.push_back(reservation_value(inst.box(i)));
  actions_.resize(inst.size());
  for (int i = 0; i < inst.size(); ++i) {
    if (i == backup_) continue;  // single thresholdless open, encoded as nullopt
    for (const auto& t : scheme_.threshold_grid)
      if (t <= sigmas_[i]) actions_[i].push_back(t);
  }
}

std::vector<ExtRat> StochasticDynamicProgram::value_space() const {
  std::vector<ExtRat> v{ExtRat::of(Rat(0))};
  for (const auto& w : scheme_.value_support)
    if (w != 0) v.push_back(ExtRat::of(w));
  v.push_back(ExtRat::infinity());
  return v;
}

ExtRat StochasticDynamicProgram::transition(const ExtRat& value, int box,
                                            const std::optional<Rat>& tau,
                                            const Rat& v) const {
  if (value.inf) return value;
  if (value.v > 0) {
    Rat kt = floor_to_multiple(rat_min(v, sigmas_[box]), scheme_.kappa_grid());
    return ExtRat::of(rat_max(kt, value.v));
  }
  // phase one
  if (box == backup_ || !tau.has_value() || v <= *tau) return ExtRat::of(Rat(0));
  return round_value(v, scheme_);
}

Rat StochasticDynamicProgram::reward(const ExtRat& value, int box,
                                     const std::optional<Rat>& tau, const Rat& v) const {
  if (value.inf) return Rat(0);  // (kappa - inf)^+
  Rat kt = floor_to_multiple(rat_min(v, sigmas_[box]), scheme_.kappa_grid());
  if (value.v > 0) return rat_plus(kt - value.v);
  if (box == backup_ || !tau.has_value() || v <= *tau) return Rat(0);
  return rat_plus(kt);
}

Rat StochasticDynamicProgram::final_reward(const ExtRat& value) const {
  if (!value.inf && value.v == 0) return inst_->box(backup_).dist.expected_value();
  return Rat(0);
}

StochasticDynamicProgram build_ST(const Instance& inst, int backup,
                                  const DiscretizationScheme& scheme) {
  return StochasticDynamicProgram(inst, backup, scheme);
}

namespace {

class StEvaluator {
 public:
  explicit StEvaluator(const StochasticDynamicProgram& prog) : prog_(&prog) {}

  // Expected g-sum plus final reward from opening every box in `remaining`
  // (ascending index) starting from internal value V.
  Rat open_all(BoxSet remaining, const ExtRat& value) {
    if (remaining.empty()) return prog_->final_reward(value);
    auto key = std::make_pair(remaining.mask, value);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const int b = remaining.lowest();
    Rat total = 0;
    for (const auto& a : prog_->instance().box(b).dist.atoms()) {
      Rat g = prog_->reward(value, b, std::nullopt, a.value);
      ExtRat next = prog_->transition(value, b, std::nullopt, a.value);
      total += a.prob * (g + open_all(remaining.without(b), next));
    }
    memo_.emplace(key, total);
    return total;
  }

  Rat utility(const IndexThresholdSequence& ord) {
    const Instance& inst = prog_->instance();
    Rat total = 0;
    Rat stay = 1;
    BoxSet remaining = inst.full_set();
    const ExtRat zero = ExtRat::of(Rat(0));
    for (std::size_t j = 0; j < ord.order.size(); ++j) {
      const int b = ord.order[j];
      const Rat& tau = ord.thresholds[j];
      remaining = remaining.without(b);
      Rat p_stay = 0;
      for (const auto& a : inst.box(b).dist.atoms()) {
        if (a.value <= tau) {
          p_stay += a.prob;
          continue;
        }
        Rat g = prog_->reward(zero, b, tau, a.value);
        ExtRat next = prog_->transition(zero, b, tau, a.value);
        total += stay * a.prob * (g + open_all(remaining, next));
      }
      stay *= p_stay;
    }
    return total + stay * prog_->final_reward(zero);
  }

 private:
  const StochasticDynamicProgram* prog_;
  std::map<std::pair<std::uint64_t, ExtRat>, Rat> memo_;
};

}  // namespace

Rat st_utility(const StochasticDynamicProgram& prog, const IndexThresholdSequence& ord) {
  IndexThresholdSequence full = ord;
  full.backup = prog.backup();
  validate_sequence(prog.instance(), full);
  for (std::size_t j = 0; j < full.order.size(); ++j) {
    const auto& acts = prog.actions(full.order[j]);
    if (std::find(acts.begin(), acts.end(), full.thresholds[j]) == acts.end())
      throw ValidationError("tau_" + std::to_string(j + 1) +
                            " is not a valid action for box " +
                            std::to_string(full.order[j]));
  }
  StEvaluator ev(prog);
  return ev.utility(full);
}

std::pair<IndexThresholdSequence, Rat> solve_ST_exhaustive(
    const StochasticDynamicProgram& prog) {
  const Instance& inst = prog.instance();
  const int n = inst.size();
  if (n > 6) throw BudgetError("solve_ST_exhaustive: n = " + std::to_string(n) + " exceeds 6");

  StEvaluator ev(prog);
  const ExtRat zero = ExtRat::of(Rat(0));
  IndexThresholdSequence cur;
  cur.backup = prog.backup();
  IndexThresholdSequence best = cur;
  Rat best_val;
  bool have_best = false;
  std::uint64_t nodes = 0;

  auto rec = [&](auto&& self, BoxSet opened, const Rat& stay, const Rat& acc) -> void {
    if (++nodes > 5'000'000)
      throw BudgetError("solve_ST_exhaustive: search exceeds 5e6 nodes");
    Rat val = acc + stay * prog.final_reward(zero);  // stop with this prefix
    if (!have_best || val > best_val) {
      have_best = true;
      best = cur;
      best_val = val;
    }
    for (int b = 0; b < n; ++b) {
      if (b == prog.backup() || opened.contains(b)) continue;
      BoxSet rest = inst.full_set();
      rest.mask &= ~(opened.mask | (std::uint64_t(1) << b));
      for (const auto& tau : prog.actions(b)) {
        Rat p_stay = 0;
        Rat trans = 0;
        for (const auto& a : inst.box(b).dist.atoms()) {
          if (a.value <= tau) {
            p_stay += a.prob;
            continue;
          }
          Rat g = prog.reward(zero, b, tau, a.value);
          ExtRat next = prog.transition(zero, b, tau, a.value);
          trans += a.prob * (g + ev.open_all(rest, next));
        }
        cur.order.push_back(b);
        cur.thresholds.push_back(tau);
        self(self, opened.with(b), stay * p_stay, acc + stay * trans);
        cur.order.pop_back();
        cur.thresholds.pop_back();
      }
    }
  };
  rec(rec, BoxSet::empty_set(), Rat(1), Rat(0));
  return {best, best_val};
}

PtasReport ptas_pipeline(const Instance& inst, const Rat& epsilon, const PtasOptions& options) {
  check_epsilon(epsilon);
  if (inst.size() > 6)
    throw BudgetError("ptas_pipeline: n = " + std::to_string(inst.size()) + " exceeds 6");

  PtasReport report;
  report.epsilon = epsilon;
  if (options.opt_ref.has_value()) {
    report.opt_ref = *options.opt_ref;
  } else if (options.committing_ref) {
    report.opt_ref = best_committing(inst).second;
  } else {
    report.opt_ref = solve(inst).opt();
  }

  report.best = TwoPhasePolicy::weitzman();
  report.utility = weitz_value(inst, inst.full_set(), Rat(0));
  if (report.opt_ref <= 0) return report;  // OPT = 0; pure Weitzman suffices

  std::vector<std::vector<Rat>> candidates =
      enumerate_supports(inst, epsilon, report.opt_ref, /*prune=*/true, options.budget);
  for (const auto& extra : options.extra_supports) {
    auto sorted = extra;
    std::sort(sorted.begin(), sorted.end());
    if (std::find(candidates.begin(), candidates.end(), sorted) == candidates.end())
      candidates.push_back(std::move(sorted));
  }

  for (int backup = 0; backup < inst.size(); ++backup) {
    for (const auto& support : candidates) {
      DiscretizationScheme scheme =
          scheme_from_support(inst, support, epsilon, report.opt_ref);
      StochasticDynamicProgram prog = build_ST(inst, backup, scheme);
      auto [ord, st_val] = solve_ST_exhaustive(prog);
      ++report.candidates_tried;
      TwoPhasePolicy pol = to_two_phase(ord);
      Rat val = eval_two_phase(inst, pol);
      if (val > report.utility) {
        report.utility = val;
        report.best = std::move(pol);
      }
    }
  }
  return report;
}

std::string ptas_report_to_json(const PtasReport& report) {
  json j;
  j["opt_ref"] = rat_to_string(report.opt_ref);
  j["epsilon"] = rat_to_string(report.epsilon);
  j["candidates_tried"] = report.candidates_tried;
  j["best_policy"] = json::parse(policy_to_json(report.best));
  j["utility"] = rat_to_string(report.utility);
  j["utility_decimal"] = rat_to_double(report.utility);
  return j.dump();
}

}  // namespace pandora
