#include "pandora/twophase.hpp"

#include "pandora/weitzman.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace pandora {

using nlohmann::json;

void validate_sequence(const Instance& inst, const IndexThresholdSequence& ord) {
  if (ord.backup < 0 || ord.backup >= inst.size())
    throw ValidationError("backup box " + std::to_string(ord.backup) + " out of range");
  if (ord.order.size() != ord.thresholds.size())
    throw ValidationError("order and threshold lengths differ");
  std::vector<bool> seen(inst.size(), false);
  seen[ord.backup] = true;
  for (int b : ord.order) {
    if (b < 0 || b >= inst.size())
      throw ValidationError("order names box " + std::to_string(b));
    if (seen[b])
      throw ValidationError("box " + std::to_string(b) + " repeated in sequence");
    seen[b] = true;
  }
  for (const auto& t : ord.thresholds)
    if (t < 0) throw ValidationError("negative threshold " + rat_to_string(t));
}

TwoPhasePolicy to_two_phase(const IndexThresholdSequence& ord) {
  TwoPhasePolicy pol;
  pol.order = ord.order;
  pol.order.push_back(ord.backup);
  for (const auto& t : ord.thresholds) pol.thresholds.push_back(ThresholdValue::of(t));
  return pol;
}

namespace {

void check_policy(const Instance& inst, const TwoPhasePolicy& pol) {
  if (pol.pure_weitzman) {
    if (!pol.order.empty() || !pol.thresholds.empty())
      throw ValidationError("pure Weitzman policy must have empty order");
    return;
  }
  if (pol.order.empty()) throw ValidationError("two-phase order is empty");
  if (pol.thresholds.size() + 1 != pol.order.size())
    throw ValidationError("two-phase policy needs k-1 thresholds");
  std::vector<bool> seen(inst.size(), false);
  for (int b : pol.order) {
    if (b < 0 || b >= inst.size())
      throw ValidationError("order names box " + std::to_string(b));
    if (seen[b]) throw ValidationError("box " + std::to_string(b) + " repeated in order");
    seen[b] = true;
  }
}

}  // namespace

TwoPhasePolicy compute_thresholds(const Instance& inst, const ValueTable& table,
                                  const std::vector<int>& order) {
  TwoPhasePolicy pol;
  pol.order = order;
  check_policy(inst, pol);
  BoxSet remaining = inst.full_set();
  for (std::size_t j = 0; j + 1 < order.size(); ++j) {
    remaining = remaining.without(order[j]);
    pol.thresholds.push_back(threshold_of_set(inst, table, remaining));
  }
  return pol;
}

std::vector<Rat> two_phase_suffix_values(const Instance& inst, const TwoPhasePolicy& pol) {
  check_policy(inst, pol);
  if (pol.pure_weitzman) return {weitz_value(inst, inst.full_set(), Rat(0))};
  WeitzCache wc(inst);
  const int k = static_cast<int>(pol.order.size());
  std::vector<Rat> u(k);
  u[k - 1] = inst.box(pol.order[k - 1]).dist.expected_value();
  BoxSet remaining = inst.full_set();
  for (int j = 0; j < k - 1; ++j) remaining = remaining.without(pol.order[j]);
  for (int j = k - 2; j >= 0; --j) {
    const int b = pol.order[j];
    const auto& tau = pol.thresholds[j];
    Rat val = -inst.box(b).cost;
    for (const auto& a : inst.box(b).dist.atoms()) {
      if (!tau.neg && a.value <= tau.tau)
        val += a.prob * u[j + 1];
      else
        val += a.prob * wc.weitz(remaining, a.value);
    }
    u[j] = val;
    remaining = remaining.with(b);  // walking backwards, box b is unopened at step j
  }
  return u;
}

Rat eval_two_phase(const Instance& inst, const TwoPhasePolicy& pol) {
  return two_phase_suffix_values(inst, pol).front();
}

Action two_phase_action(const Instance& inst, const TwoPhasePolicy& pol, const State& s,
                        bool phase_two) {
  if (pol.pure_weitzman || phase_two) return weitzman_action(inst, s);
  for (std::size_t j = 0; j < pol.order.size(); ++j) {
    if (!s.uninspected.contains(pol.order[j])) continue;
    return j + 1 == pol.order.size() ? Action::close(pol.order[j])
                                     : Action::open(pol.order[j]);
  }
  throw std::invalid_argument("two_phase_action: phase-one order exhausted");
}

Rat stage_non_exposed_utility(const Instance& inst, const IndexThresholdSequence& ord) {
  validate_sequence(inst, ord);
  WeitzCache wc(inst);
  for (std::size_t j = 0; j < ord.order.size(); ++j) {
    const Rat& sigma = wc.reservation(ord.order[j]).sigma;
    if (ord.thresholds[j] > sigma)
      throw ValidationError("not stage-non-exposed: tau_" + std::to_string(j + 1) + " = " +
                            rat_to_string(ord.thresholds[j]) + " > sigma of box " +
                            std::to_string(ord.order[j]));
  }
  Rat total = 0;
  Rat stay = 1;  // P[no transition before step j]
  BoxSet remaining = inst.full_set();
  for (std::size_t j = 0; j < ord.order.size(); ++j) {
    const int b = ord.order[j];
    const Rat& sigma = wc.reservation(b).sigma;
    remaining = remaining.without(b);
    Rat step = 0;  // E[1{v > tau_j} (kappa + E[(Weitz - v)^+])]
    Rat p_stay = 0;
    for (const auto& a : inst.box(b).dist.atoms()) {
      if (a.value > ord.thresholds[j])
        step += a.prob * (rat_min(a.value, sigma) + wc.weitz_minus_plus(remaining, a.value));
      else
        p_stay += a.prob;
    }
    total += stay * step;
    stay *= p_stay;
  }
  total += stay * inst.box(ord.backup).dist.expected_value();
  return total;
}

std::pair<TwoPhasePolicy, Rat> best_two_phase(const Instance& inst) {
  const int n = inst.size();
  if (n > 8) throw BudgetError("best_two_phase: n = " + std::to_string(n) + " exceeds 8");
  ValueTable table = solve(inst);
  WeitzCache wc(inst);

  TwoPhasePolicy best = TwoPhasePolicy::weitzman();
  Rat best_val = wc.weitz(inst.full_set(), Rat(0));

  // Depth-first over ordered subsets in lexicographic order; at each node the
  // next box is first tried as the closing backup, then opened with the
  // threshold of the set left behind. Strict improvement keeps the canonical
  // (lex-smallest) argmax.
  std::vector<int> prefix;
  std::vector<ThresholdValue> taus;
  auto rec = [&](auto&& self, BoxSet remaining, const Rat& stay, const Rat& acc) -> void {
    for (int b = 0; b < n; ++b) {
      if (!remaining.contains(b)) continue;
      prefix.push_back(b);
      Rat close_val = acc + stay * inst.box(b).dist.expected_value();
      if (close_val > best_val) {
        best_val = close_val;
        best = TwoPhasePolicy{false, prefix, taus};
      }
      BoxSet rest = remaining.without(b);
      if (!rest.empty()) {
        ThresholdValue tau = threshold_of_set(inst, table, rest);
        Rat open_acc = acc - stay * inst.box(b).cost;
        Rat p_stay = 0;
        for (const auto& a : inst.box(b).dist.atoms()) {
          if (!tau.neg && a.value <= tau.tau)
            p_stay += a.prob;
          else
            open_acc += stay * a.prob * wc.weitz(rest, a.value);
        }
        taus.push_back(tau);
        self(self, rest, stay * p_stay, open_acc);
        taus.pop_back();
      }
      prefix.pop_back();
    }
  };
  rec(rec, inst.full_set(), Rat(1), Rat(0));
  return {best, best_val};
}

std::string policy_to_json(const TwoPhasePolicy& pol) {
  json j;
  j["pure_weitzman"] = pol.pure_weitzman;
  j["order"] = pol.order;
  json taus = json::array();
  for (const auto& t : pol.thresholds) taus.push_back(threshold_to_string(t));
  j["thresholds"] = taus;
  return j.dump();
}

TwoPhasePolicy policy_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed policy JSON: ") + e.what());
  }
  TwoPhasePolicy pol;
  if (j.contains("pure_weitzman")) pol.pure_weitzman = j["pure_weitzman"].get<bool>();
  if (j.contains("order"))
    for (const auto& b : j["order"]) pol.order.push_back(b.get<int>());
  if (j.contains("thresholds")) {
    for (const auto& t : j["thresholds"]) {
      std::string s = t.get<std::string>();
      pol.thresholds.push_back(s == "NEG" ? ThresholdValue::make_neg()
                                          : ThresholdValue::of(parse_rat(s)));
    }
  }
  return pol;
}

}  // namespace pandora
