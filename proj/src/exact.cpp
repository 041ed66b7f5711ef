#include "pandora/exact.hpp"

#include "pandora/weitzman.hpp"

#include <algorithm>

namespace pandora {

const ValueTable::Entry& ValueTable::at(BoxSet U, const Rat& alpha) const {
  return table_[U.mask][grid_index(alpha)];
}

int ValueTable::grid_index(const Rat& alpha) const {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), alpha);
  if (it == grid_.end() || *it != alpha)
    throw std::invalid_argument("outside option " + rat_to_string(alpha) +
                                " is not on the value grid");
  return static_cast<int>(it - grid_.begin());
}

ValueTable solve(const Instance& inst) {
  const int n = inst.size();
  if (n > 20) throw BudgetError("solve: n = " + std::to_string(n) + " exceeds 20");

  ValueTable vt;
  vt.n_ = n;
  vt.full_ = inst.full_set();
  vt.grid_ = inst.support();
  if (vt.grid_.empty() || vt.grid_.front() != 0)
    vt.grid_.insert(vt.grid_.begin(), Rat(0));
  const int g = static_cast<int>(vt.grid_.size());

  // Grid index of each atom of each box, and of max(alpha, v) via index max.
  std::vector<std::vector<int>> atom_idx(n);
  std::vector<Rat> close_value(n);
  for (int i = 0; i < n; ++i) {
    close_value[i] = inst.box(i).dist.expected_value();
    for (const auto& a : inst.box(i).dist.atoms()) {
      auto it = std::lower_bound(vt.grid_.begin(), vt.grid_.end(), a.value);
      atom_idx[i].push_back(static_cast<int>(it - vt.grid_.begin()));
    }
  }

  vt.table_.resize(std::size_t(1) << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    auto& row = vt.table_[mask];
    row.resize(g);
    for (int ai = 0; ai < g; ++ai) {
      ValueTable::Entry best{vt.grid_[ai], Action::stop(), false};
      for (int i = 0; i < n; ++i) {
        if (!((mask >> i) & 1u)) continue;
        if (close_value[i] > best.value) best = ValueTable::Entry{close_value[i], Action::close(i), true};
      }
      for (int i = 0; i < n; ++i) {
        if (!((mask >> i) & 1u)) continue;
        const auto& atoms = inst.box(i).dist.atoms();
        const auto& sub = vt.table_[mask & ~(std::uint64_t(1) << i)];
        Rat val = -inst.box(i).cost;
        bool backup = false;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
          const auto& e = sub[std::max(ai, atom_idx[i][k])];
          val += atoms[k].prob * e.value;
          backup = backup || e.uses_backup;
        }
        if (val > best.value) best = ValueTable::Entry{val, Action::open(i), backup};
      }
      row[ai] = std::move(best);
    }
  }
  return vt;
}

Action optimal_action(const ValueTable& table, const State& s) {
  return table.at(s.uninspected, s.outside).action;
}

std::string threshold_to_string(const ThresholdValue& t) {
  return t.neg ? "NEG" : rat_to_string(t.tau);
}

ThresholdValue threshold_of_set(const Instance& inst, const ValueTable& table, BoxSet U) {
  if (U.empty()) return ThresholdValue::make_neg();
  const auto& at0 = table.at(U, Rat(0));
  if (!at0.uses_backup) return ThresholdValue::make_neg();
  DiscreteDistribution W = max_kappa_distribution(inst, U);
  return ThresholdValue::of(solve_weitz_equation(W, at0.value));
}

CertificateResult verify_certificate(const Instance& inst, const std::vector<int>& order,
                                     const Rat& target) {
  const int m = static_cast<int>(order.size());
  std::vector<bool> seen(inst.size(), false);
  for (int b : order) {
    if (b < 0 || b >= inst.size())
      throw std::invalid_argument("certificate order names box " + std::to_string(b));
    if (seen[b]) throw std::invalid_argument("duplicate box " + std::to_string(b) +
                                             " in certificate order");
    seen[b] = true;
  }

  WeitzCache wc(inst);
  std::vector<Rat> grid = inst.support();
  if (grid.empty() || grid.front() != 0) grid.insert(grid.begin(), Rat(0));

  // Uninspected set after step j and the Weitzman values W_j(theta).
  std::vector<BoxSet> after(m + 1);
  after[0] = inst.full_set();
  for (int j = 1; j <= m; ++j) after[j] = after[j - 1].without(order[j - 1]);

  Rat best = wc.weitz(inst.full_set(), Rat(0));  // k = 0, pure Weitzman
  for (int k = 1; k <= m; ++k) {
    Rat opt_j = inst.box(order[k - 1]).dist.expected_value();  // OPT_{k-1}
    for (int j = k - 1; j >= 1; --j) {
      // Grid threshold: smallest theta with W_j(theta) >= OPT_j (∞ if none,
      // represented by transitioning on no atom).
      const Rat* tau = nullptr;
      for (const auto& theta : grid) {
        if (wc.weitz(after[j], theta) >= opt_j) {
          tau = &theta;
          break;
        }
      }
      Rat next = -inst.box(order[j - 1]).cost;
      for (const auto& a : inst.box(order[j - 1]).dist.atoms()) {
        if (tau != nullptr && a.value >= *tau)
          next += a.prob * wc.weitz(after[j], a.value);
        else
          next += a.prob * opt_j;
      }
      opt_j = next;
    }
    if (opt_j > best) best = opt_j;
  }
  return CertificateResult{best, best >= target};
}

}  // namespace pandora
