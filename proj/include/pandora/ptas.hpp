#pragma once

// The approximation-scheme reduction chain. A two-phase policy search is
// reduced step by step to a stochastic dynamic program over a constant-size
// value space: thresholds are restricted to the grid W_L, per-step rewards
// are rewritten cost-free through kappa (TP), observed values and kappas are
// rounded onto a finite support W (DTP), and the result is expressed as a
// value/transition/reward program (ST) solved exactly at desk scale.

#include "pandora/model.hpp"
#include "pandora/twophase.hpp"
#include "pandora/weitzman.hpp"

#include <optional>

namespace pandora {

// Rational extended with +infinity (the rounding target for values above
// the truncation bound V_U). (x - Infinity)^+ is 0 by convention.
struct ExtRat {
  bool inf = false;
  Rat v;

  static ExtRat infinity() { return ExtRat{true, Rat(0)}; }
  static ExtRat of(Rat x) { return ExtRat{false, std::move(x)}; }

  bool operator==(const ExtRat& o) const { return inf == o.inf && (inf || v == o.v); }
  bool operator<(const ExtRat& o) const {
    if (inf != o.inf) return !inf;
    return !inf && v < o.v;
  }
};

std::string extrat_to_string(const ExtRat& x);

struct Bucket {
  int first_pos = 0;           // 1-based positions in the hint order
  int last_pos = 0;
  std::vector<Rat> supports;   // 0 = w_0 < w_1 < ... <= V_U, grid multiples
};

// Grids shared by DTP and ST:
//   W_L = {0, eps·opt_ref, 2 eps·opt_ref, ..., opt_ref}   (threshold grid)
//   W   = union of per-bucket value supports ∪ W_L ∪ {Infinity}
//   kappa rounds down to multiples of eps^2·opt_ref, values round up into W.
struct DiscretizationScheme {
  Rat epsilon;
  Rat opt_ref;
  Rat v_upper;                      // V_U = E[max_i v_i] / eps
  std::vector<Rat> threshold_grid;  // W_L, sorted
  std::vector<Rat> value_support;   // finite part of W, sorted; Infinity implicit
  std::vector<Bucket> buckets;      // filled by build_scheme

  Rat kappa_grid() const { return epsilon * epsilon * opt_ref; }
};

// Buckets are maximal consecutive runs of the hint order with
// E[Weitz_first] - E[Weitz_last] <= eps^2 opt_ref; per bucket the supports
// are built top-down from the largest grid multiple <= V_U, each step taking
// the smallest multiple whose E[(Weitz_first - w)^+] gap stays within
// eps(1-3eps) opt_ref. 0 < eps <= 1/4, opt_ref > 0.
DiscretizationScheme build_scheme(const Instance& inst, int backup,
                                  const IndexThresholdSequence& ord_hint, const Rat& epsilon,
                                  const Rat& opt_ref);

// A value-support candidate list (finite parts; Infinity is implicit).
// Pruned mode (the default): the deduplicated build_scheme outputs over all
// nonempty ordered subsets of the boxes. Unpruned mode: every sorted subset
// of the grid multiples below V_U (0 always included) within the
// constructive size bound. Errors with the candidate count when it exceeds
// the budget.
std::vector<std::vector<Rat>> enumerate_supports(const Instance& inst, const Rat& epsilon,
                                                 const Rat& opt_ref, bool prune = true,
                                                 std::uint64_t budget = 2'000'000);

// Assembles a scheme around an externally chosen value support (used for the
// enumerated candidates; no bucket information).
DiscretizationScheme scheme_from_support(const Instance& inst, std::vector<Rat> support,
                                         const Rat& epsilon, const Rat& opt_ref);

Rat round_kappa(const Rat& x, const DiscretizationScheme& scheme);
ExtRat round_value(const Rat& x, const DiscretizationScheme& scheme);

// Cost-free nonadaptive evaluation (TP): per-step reward
// E_{v>tau}[kappa] + E_{v>tau}[(Weitz_after - v)^+], final reward E[v_i*].
// Requires tau_j <= sigma_{i_j}.
Rat eval_TP(const Instance& inst, int backup, const IndexThresholdSequence& ord);

// Discretized variant: kappa-tilde, v-tilde and Weitz-tilde substituted;
// thresholds must lie on W_L (and <= sigma).
Rat eval_DTP(const Instance& inst, int backup, const IndexThresholdSequence& ord,
             const DiscretizationScheme& scheme);

// The stochastic dynamic program: value space W ∪ {0} where 0 encodes
// "phase one, no threshold crossed"; actions open a box with a grid
// threshold (the backup box has a single thresholdless open); crossing sets
// the value to v-tilde; later opens pay (kappa-tilde - V)^+ and raise V;
// the final reward pays E[v_i*] iff V = 0.
class StochasticDynamicProgram {
 public:
  StochasticDynamicProgram(const Instance& inst, int backup, DiscretizationScheme scheme);

  const Instance& instance() const { return *inst_; }
  int backup() const { return backup_; }
  int horizon() const { return inst_->size(); }
  const DiscretizationScheme& scheme() const { return scheme_; }
  // Valid thresholds for opening box i in phase one (empty for the backup).
  const std::vector<Rat>& actions(int box) const { return actions_[box]; }
  std::vector<ExtRat> value_space() const;
  const Rat& sigma(int box) const { return sigmas_[box]; }

  // Transition f(V, a) given the realized prize v; tau is ignored once V > 0
  // and absent for the backup action.
  ExtRat transition(const ExtRat& value, int box, const std::optional<Rat>& tau,
                    const Rat& v) const;
  // Reward g(V, a) given the realized prize v.
  Rat reward(const ExtRat& value, int box, const std::optional<Rat>& tau, const Rat& v) const;
  // Final reward h.
  Rat final_reward(const ExtRat& value) const;

 private:
  const Instance* inst_;
  int backup_;
  DiscretizationScheme scheme_;
  std::vector<Rat> sigmas_;
  std::vector<std::vector<Rat>> actions_;
};

StochasticDynamicProgram build_ST(const Instance& inst, int backup,
                                  const DiscretizationScheme& scheme);

// Forward execution value of the ST policy for ord: probe the order with its
// thresholds while V = 0, open everything remaining once V > 0, collect g
// along the way and h at the end.
Rat st_utility(const StochasticDynamicProgram& prog, const IndexThresholdSequence& ord);

// Exact maximizer of st_utility over all ordered subsets of the non-backup
// boxes with thresholds from the per-box action sets. Ties prefer stopping
// earlier, then lower box index, then lower threshold. Desk scale: n <= 6.
std::pair<IndexThresholdSequence, Rat> solve_ST_exhaustive(const StochasticDynamicProgram& prog);

struct PtasOptions {
  std::optional<Rat> opt_ref;          // default: exact-DP OPT
  bool committing_ref = false;         // use best_committing as opt_ref instead
  std::vector<std::vector<Rat>> extra_supports;  // appended to the candidates
  std::uint64_t budget = 2'000'000;
};

struct PtasReport {
  Rat opt_ref;
  Rat epsilon;
  std::uint64_t candidates_tried = 0;
  TwoPhasePolicy best;
  Rat utility;
};

// Full pipeline: for each backup box and each enumerated support, solve the
// ST program exactly, lift the best sequences back to two-phase policies and
// return the best of them and pure Weitzman by exact two-phase utility.
PtasReport ptas_pipeline(const Instance& inst, const Rat& epsilon,
                         const PtasOptions& options = {});

std::string ptas_report_to_json(const PtasReport& report);

}  // namespace pandora
