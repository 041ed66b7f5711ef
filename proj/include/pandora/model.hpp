#pragma once

// Domain types for finite-support Pandora's box instances: prize
// distributions, boxes with inspection costs, bitmask box sets and
// search states. Everything is immutable after construction.

#include "pandora/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pandora {

// Input/validation failures (malformed JSON, bad probabilities, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance or search size beyond a documented limit.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Atom {
  Rat value;
  Rat prob;
};

// Finite prize distribution. Atoms are kept sorted strictly increasing by
// value, probabilities are positive and sum to one exactly.
class DiscreteDistribution {
 public:
  // Merges duplicate values, sorts, and validates. box_index is used only
  // to name the offending box in error messages (-1 = unknown).
  static DiscreteDistribution from_atoms(std::vector<Atom> atoms, int box_index = -1);

  // Point mass at v.
  static DiscreteDistribution point(const Rat& v);

  // For derived distributions (kappa clips, max distributions): sorts and
  // merges, requires positive probabilities summing to one, but allows
  // negative values. Prize distributions should go through from_atoms.
  static DiscreteDistribution from_raw(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Rat& min_value() const { return atoms_.front().value; }
  const Rat& max_value() const { return atoms_.back().value; }

  Rat expected_value() const;

  // P[X <= t]
  Rat cdf(const Rat& t) const;

  // E[(X - t)^+]
  Rat expected_minus_plus(const Rat& t) const;

  // E[max(X, t)]
  Rat expected_max_with(const Rat& t) const;

  bool operator==(const DiscreteDistribution& o) const { return atoms_raw_equal(o); }

 private:
  DiscreteDistribution() = default;
  bool atoms_raw_equal(const DiscreteDistribution& o) const;
  std::vector<Atom> atoms_;
};

// Σ value · probability, exact.
Rat expected_value(const DiscreteDistribution& d);

// Distribution of the max of independent variables, from CDF products on
// the combined support.
DiscreteDistribution max_distribution(const std::vector<DiscreteDistribution>& parts);

struct BoxSpec {
  DiscreteDistribution dist;
  Rat cost;
};

// Subset of box indices as a 64-bit mask.
struct BoxSet {
  std::uint64_t mask = 0;

  static BoxSet full(int n) { return BoxSet{n == 64 ? ~0ull : ((1ull << n) - 1)}; }
  static BoxSet empty_set() { return BoxSet{0}; }
  static BoxSet single(int i) { return BoxSet{1ull << i}; }

  bool contains(int i) const { return (mask >> i) & 1u; }
  BoxSet without(int i) const { return BoxSet{mask & ~(1ull << i)}; }
  BoxSet with(int i) const { return BoxSet{mask | (1ull << i)}; }
  bool empty() const { return mask == 0; }
  int count() const;
  int lowest() const;  // index of lowest set bit; -1 when empty

  bool operator==(const BoxSet& o) const { return mask == o.mask; }
};

// The box set M with its global support union Θ (deduplicated, sorted).
class Instance {
 public:
  explicit Instance(std::vector<BoxSpec> boxes);

  int size() const { return static_cast<int>(boxes_.size()); }
  const BoxSpec& box(int i) const { return boxes_[i]; }
  const std::vector<BoxSpec>& boxes() const { return boxes_; }
  const std::vector<Rat>& support() const { return support_; }
  BoxSet full_set() const { return BoxSet::full(size()); }

 private:
  std::vector<BoxSpec> boxes_;
  std::vector<Rat> support_;
};

struct State {
  BoxSet uninspected;
  Rat outside;
};

enum class ActionKind { Stop, Close, Open };

struct Action {
  ActionKind kind = ActionKind::Stop;
  int box = -1;

  static Action stop() { return {ActionKind::Stop, -1}; }
  static Action close(int i) { return {ActionKind::Close, i}; }
  static Action open(int i) { return {ActionKind::Open, i}; }

  bool operator==(const Action& o) const { return kind == o.kind && box == o.box; }
};

std::string action_to_string(const Action& a);

// JSON instance format:
//   {"boxes":[{"cost":"1/10","values":[["0","1/2"],["2","1/2"]]},...]}
// Rationals are "p" or "p/q" strings. Duplicate values are merged.
Instance parse_instance(const std::string& text);
std::string instance_to_json(const Instance& inst);

// FNV-1a over the canonical serialization, as a stable hex digest.
std::string instance_digest(const Instance& inst);

}  // namespace pandora
