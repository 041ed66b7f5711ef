#include "pandora/sim.hpp"

#include "pandora/weitzman.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <thread>

namespace pandora {

using nlohmann::json;

namespace {

constexpr std::uint64_t kBlockSize = 1024;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t draw_u64(std::uint64_t seed, std::uint64_t sample, int box) {
  std::uint64_t h = splitmix64(seed ^ 0xA0761D6478BD642Full);
  h = splitmix64(h ^ sample);
  h = splitmix64(h ^ (0x8EBC6AF09C88C6E3ull + static_cast<std::uint64_t>(box)));
  return h;
}

struct BoxAcc {
  std::uint64_t inspected = 0;
  std::uint64_t selected = 0;
  double nmk = 0, nmk_sq = 0;       // (A v - I c) - A kappa
  double expo = 0, expo_sq = 0;     // (I - A)(v - sigma)^+

  void merge(const BoxAcc& o) {
    inspected += o.inspected;
    selected += o.selected;
    nmk += o.nmk;
    nmk_sq += o.nmk_sq;
    expo += o.expo;
    expo_sq += o.expo_sq;
  }
};

struct BlockAcc {
  double sum = 0, sum_sq = 0;
  std::vector<BoxAcc> boxes;

  void merge(const BlockAcc& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    for (std::size_t i = 0; i < boxes.size(); ++i) boxes[i].merge(o.boxes[i]);
  }
};

double se_of_mean(double sum, double sum_sq, std::uint64_t n) {
  if (n < 2) return 0;
  double var = (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
  if (var < 0) var = 0;  // rounding noise on deterministic data
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace

bool SimStats::operator==(const SimStats& o) const {
  if (samples != o.samples || mean != o.mean || std_error != o.std_error ||
      per_box.size() != o.per_box.size())
    return false;
  for (std::size_t i = 0; i < per_box.size(); ++i) {
    const auto& a = per_box[i];
    const auto& b = o.per_box[i];
    if (a.inspected_freq != b.inspected_freq || a.selected_freq != b.selected_freq ||
        a.net_minus_kappa_mean != b.net_minus_kappa_mean ||
        a.net_minus_kappa_se != b.net_minus_kappa_se ||
        a.exposure_gap_mean != b.exposure_gap_mean || a.exposure_gap_se != b.exposure_gap_se)
      return false;
  }
  return true;
}

int sample_atom(const DiscreteDistribution& d, std::uint64_t seed, std::uint64_t sample,
                int box) {
  const std::uint64_t r = draw_u64(seed, sample, box);
  // Smallest k with r < cdf_k * 2^64, compared exactly.
  const BigInt r_big = r;
  const BigInt two64 = BigInt(1) << 64;
  Rat cum = 0;
  const auto& atoms = d.atoms();
  for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
    cum += atoms[k].prob;
    if (r_big * denominator(cum) < numerator(cum) * two64) return static_cast<int>(k);
  }
  return static_cast<int>(atoms.size()) - 1;
}

SimStats simulate(const Instance& inst, const PolicyFactory& policy, std::uint64_t n_samples,
                  std::uint64_t seed, int jobs) {
  if (n_samples == 0) throw std::invalid_argument("simulate: n_samples must be >= 1");
  const int n = inst.size();
  std::vector<Rat> sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = reservation_value(inst.box(i));

  const std::uint64_t n_blocks = (n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<BlockAcc> blocks(n_blocks);

  auto run_block = [&](std::uint64_t bi) {
    BlockAcc acc;
    acc.boxes.resize(n);
    const std::uint64_t lo = bi * kBlockSize;
    const std::uint64_t hi = std::min(n_samples, lo + kBlockSize);
    for (std::uint64_t s = lo; s < hi; ++s) {
      auto pol = policy();
      State st{inst.full_set(), Rat(0)};
      std::vector<int> drawn(n, -1);
      std::vector<bool> inspected(n, false);
      int selected = -1;  // A_i = 1 for this box, if any
      int best_box = -1;  // best inspected so far (lowest index on ties)
      Rat cost_paid = 0;
      bool done = false;
      while (!done) {
        Action a = pol->next(st);
        switch (a.kind) {
          case ActionKind::Open: {
            if (a.box < 0 || a.box >= n || !st.uninspected.contains(a.box))
              throw std::invalid_argument("policy opened unavailable box " +
                                          std::to_string(a.box));
            const int k = sample_atom(inst.box(a.box).dist, seed, s, a.box);
            drawn[a.box] = k;
            inspected[a.box] = true;
            cost_paid += inst.box(a.box).cost;
            st.uninspected = st.uninspected.without(a.box);
            const Rat& v = inst.box(a.box).dist.atoms()[k].value;
            if (best_box < 0 || v > st.outside) {
              st.outside = v;
              best_box = a.box;
            }
            pol->observe(a.box, v);
            break;
          }
          case ActionKind::Close: {
            if (a.box < 0 || a.box >= n || !st.uninspected.contains(a.box))
              throw std::invalid_argument("policy closed unavailable box " +
                                          std::to_string(a.box));
            drawn[a.box] = sample_atom(inst.box(a.box).dist, seed, s, a.box);
            selected = a.box;
            done = true;
            break;
          }
          case ActionKind::Stop: {
            selected = best_box;  // outside option = best inspected box
            done = true;
            break;
          }
        }
      }

      Rat utility = -cost_paid;
      if (selected >= 0) utility += inst.box(selected).dist.atoms()[drawn[selected]].value;
      const double u = rat_to_double(utility);
      acc.sum += u;
      acc.sum_sq += u * u;

      for (int i = 0; i < n; ++i) {
        const bool a_i = (selected == i);
        const bool i_i = inspected[i];
        if (a_i) acc.boxes[i].selected += 1;
        if (i_i) acc.boxes[i].inspected += 1;
        if (!a_i && !i_i) continue;
        const Rat& v = inst.box(i).dist.atoms()[drawn[i]].value;
        Rat nmk = 0;  // A v - I c - A kappa
        if (a_i) nmk += v - rat_min(v, sigma[i]);
        if (i_i) nmk -= inst.box(i).cost;
        if (nmk != 0) {
          const double x = rat_to_double(nmk);
          acc.boxes[i].nmk += x;
          acc.boxes[i].nmk_sq += x * x;
        }
        if (i_i && !a_i) {
          Rat gap = rat_plus(v - sigma[i]);
          if (gap != 0) {
            const double x = rat_to_double(gap);
            acc.boxes[i].expo += x;
            acc.boxes[i].expo_sq += x * x;
          }
        }
      }
    }
    blocks[bi] = std::move(acc);
  };

  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 1 || n_blocks == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
      for (std::uint64_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
        run_block(b);
    };
    std::vector<std::thread> pool;
    const int nt = static_cast<int>(std::min<std::uint64_t>(jobs, n_blocks));
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Pairwise reduction in block order keeps the result independent of the
  // thread count.
  std::size_t width = blocks.size();
  while (width > 1) {
    std::size_t half = (width + 1) / 2;
    for (std::size_t i = 0; i + half < width; ++i) blocks[i].merge(blocks[i + half]);
    width = half;
  }
  const BlockAcc& total = blocks[0];

  SimStats stats;
  stats.samples = n_samples;
  const double dn = static_cast<double>(n_samples);
  stats.mean = total.sum / dn;
  stats.std_error = se_of_mean(total.sum, total.sum_sq, n_samples);
  stats.per_box.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& b = total.boxes[i];
    auto& p = stats.per_box[i];
    p.inspected_freq = static_cast<double>(b.inspected) / dn;
    p.selected_freq = static_cast<double>(b.selected) / dn;
    p.net_minus_kappa_mean = b.nmk / dn;
    p.net_minus_kappa_se = se_of_mean(b.nmk, b.nmk_sq, n_samples);
    p.exposure_gap_mean = b.expo / dn;
    p.exposure_gap_se = se_of_mean(b.expo, b.expo_sq, n_samples);
  }
  return stats;
}

namespace {

class WeitzmanSimPolicy : public TrajectoryPolicy {
 public:
  WeitzmanSimPolicy(const Instance* inst, const std::vector<Rat>* sigma)
      : inst_(inst), sigma_(sigma) {}

  Action next(const State& s) override {
    int best = -1;
    for (int i = 0; i < inst_->size(); ++i) {
      if (!s.uninspected.contains(i)) continue;
      if (best < 0 || (*sigma_)[i] > (*sigma_)[best]) best = i;
    }
    if (best >= 0 && (*sigma_)[best] > s.outside) return Action::open(best);
    return Action::stop();
  }

 private:
  const Instance* inst_;
  const std::vector<Rat>* sigma_;
};

class OptimalSimPolicy : public TrajectoryPolicy {
 public:
  OptimalSimPolicy(const ValueTable* table) : table_(table) {}
  Action next(const State& s) override { return table_->at(s.uninspected, s.outside).action; }

 private:
  const ValueTable* table_;
};

// Two-phase execution with the recurrence semantics: values below their
// thresholds are forgotten; the phase-two outside option starts at the
// triggering value.
class TwoPhaseSimPolicy : public TrajectoryPolicy {
 public:
  TwoPhaseSimPolicy(const Instance* inst, const TwoPhasePolicy* pol,
                    const std::vector<Rat>* sigma)
      : inst_(inst), pol_(pol), sigma_(sigma), phase_two_(pol->pure_weitzman) {}

  Action next(const State& s) override {
    if (phase_two_) {
      int best = -1;
      for (int i = 0; i < inst_->size(); ++i) {
        if (!s.uninspected.contains(i)) continue;
        if (best < 0 || (*sigma_)[i] > (*sigma_)[best]) best = i;
      }
      if (best >= 0 && (*sigma_)[best] > alpha_) return Action::open(best);
      return Action::stop();
    }
    for (std::size_t j = 0; j < pol_->order.size(); ++j) {
      if (!s.uninspected.contains(pol_->order[j])) continue;
      if (j + 1 == pol_->order.size()) return Action::close(pol_->order[j]);
      step_ = j;
      return Action::open(pol_->order[j]);
    }
    throw std::invalid_argument("two-phase policy ran out of boxes");
  }

  void observe(int box, const Rat& value) override {
    if (phase_two_) {
      alpha_ = rat_max(alpha_, value);
      return;
    }
    const auto& tau = pol_->thresholds[step_];
    if (tau.neg || value > tau.tau) {
      phase_two_ = true;
      alpha_ = value;
    }
    (void)box;
  }

 private:
  const Instance* inst_;
  const TwoPhasePolicy* pol_;
  const std::vector<Rat>* sigma_;
  bool phase_two_ = false;
  std::size_t step_ = 0;
  Rat alpha_ = 0;
};

}  // namespace

PolicyFactory weitzman_policy(const Instance& inst) {
  auto sigma = std::make_shared<std::vector<Rat>>();
  for (int i = 0; i < inst.size(); ++i) sigma->push_back(reservation_value(inst.box(i)));
  const Instance* ip = &inst;
  return [ip, sigma] { return std::make_unique<WeitzmanSimPolicy>(ip, sigma.get()); };
}

PolicyFactory optimal_policy(const Instance& inst, const ValueTable& table) {
  (void)inst;
  const ValueTable* tp = &table;
  return [tp] { return std::make_unique<OptimalSimPolicy>(tp); };
}

PolicyFactory two_phase_sim_policy(const Instance& inst, const TwoPhasePolicy& pol) {
  auto sigma = std::make_shared<std::vector<Rat>>();
  for (int i = 0; i < inst.size(); ++i) sigma->push_back(reservation_value(inst.box(i)));
  auto pol_copy = std::make_shared<TwoPhasePolicy>(pol);
  const Instance* ip = &inst;
  return [ip, pol_copy, sigma] {
    return std::make_unique<TwoPhaseSimPolicy>(ip, pol_copy.get(), sigma.get());
  };
}

std::string sim_stats_to_json(const SimStats& stats) {
  json per_box = json::array();
  for (const auto& p : stats.per_box) {
    per_box.push_back({{"inspected_freq", p.inspected_freq},
                       {"selected_freq", p.selected_freq},
                       {"net_minus_kappa_mean", p.net_minus_kappa_mean},
                       {"net_minus_kappa_se", p.net_minus_kappa_se},
                       {"exposure_gap_mean", p.exposure_gap_mean},
                       {"exposure_gap_se", p.exposure_gap_se}});
  }
  return json{{"samples", stats.samples},
              {"mean", stats.mean},
              {"std_error", stats.std_error},
              {"per_box", per_box}}
      .dump();
}

}  // namespace pandora
