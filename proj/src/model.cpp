#include "pandora/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <set>

namespace pandora {

using nlohmann::json;

DiscreteDistribution DiscreteDistribution::from_atoms(std::vector<Atom> atoms, int box_index) {
  const std::string where =
      box_index >= 0 ? " in box " + std::to_string(box_index) : "";
  if (atoms.empty()) throw ValidationError("distribution has no atoms" + where);
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  for (auto& a : atoms) {
    if (a.value < 0)
      throw ValidationError("negative prize value " + rat_to_string(a.value) + where);
    if (a.prob < 0)
      throw ValidationError("negative probability " + rat_to_string(a.prob) + where);
    if (a.prob == 0) continue;
    if (!merged.empty() && merged.back().value == a.value)
      merged.back().prob += a.prob;
    else
      merged.push_back(a);
  }
  if (merged.empty()) throw ValidationError("distribution has no positive-probability atoms" + where);
  Rat total = 0;
  for (const auto& a : merged) total += a.prob;
  if (total != 1)
    throw ValidationError("probabilities sum to " + rat_to_string(total) + " != 1" + where);
  DiscreteDistribution d;
  d.atoms_ = std::move(merged);
  return d;
}

DiscreteDistribution DiscreteDistribution::point(const Rat& v) {
  return from_atoms({Atom{v, Rat(1)}});
}

DiscreteDistribution DiscreteDistribution::from_raw(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ValidationError("distribution has no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  for (auto& a : atoms) {
    if (a.prob <= 0)
      throw ValidationError("nonpositive probability " + rat_to_string(a.prob));
    if (!merged.empty() && merged.back().value == a.value)
      merged.back().prob += a.prob;
    else
      merged.push_back(a);
  }
  Rat total = 0;
  for (const auto& a : merged) total += a.prob;
  if (total != 1)
    throw ValidationError("probabilities sum to " + rat_to_string(total) + " != 1");
  DiscreteDistribution d;
  d.atoms_ = std::move(merged);
  return d;
}

Rat DiscreteDistribution::expected_value() const {
  Rat s = 0;
  for (const auto& a : atoms_) s += a.value * a.prob;
  return s;
}

Rat DiscreteDistribution::cdf(const Rat& t) const {
  Rat s = 0;
  for (const auto& a : atoms_) {
    if (a.value > t) break;
    s += a.prob;
  }
  return s;
}

Rat DiscreteDistribution::expected_minus_plus(const Rat& t) const {
  Rat s = 0;
  for (const auto& a : atoms_)
    if (a.value > t) s += a.prob * (a.value - t);
  return s;
}

Rat DiscreteDistribution::expected_max_with(const Rat& t) const {
  Rat s = 0;
  for (const auto& a : atoms_) s += a.prob * rat_max(a.value, t);
  return s;
}

bool DiscreteDistribution::atoms_raw_equal(const DiscreteDistribution& o) const {
  if (atoms_.size() != o.atoms_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].value != o.atoms_[i].value || atoms_[i].prob != o.atoms_[i].prob)
      return false;
  return true;
}

Rat expected_value(const DiscreteDistribution& d) { return d.expected_value(); }

DiscreteDistribution max_distribution(const std::vector<DiscreteDistribution>& parts) {
  if (parts.empty()) throw std::invalid_argument("max_distribution: no parts");
  std::set<Rat> sup;
  for (const auto& p : parts)
    for (const auto& a : p.atoms()) sup.insert(a.value);
  std::vector<Atom> atoms;
  Rat prev = 0;
  for (const auto& t : sup) {
    Rat c = 1;
    for (const auto& p : parts) c *= p.cdf(t);
    if (c > prev) atoms.push_back(Atom{t, c - prev});
    prev = c;
  }
  return DiscreteDistribution::from_raw(std::move(atoms));
}

int BoxSet::count() const { return std::popcount(mask); }

int BoxSet::lowest() const { return mask == 0 ? -1 : std::countr_zero(mask); }

Instance::Instance(std::vector<BoxSpec> boxes) : boxes_(std::move(boxes)) {
  if (boxes_.empty()) throw ValidationError("instance has no boxes (n = 0)");
  if (boxes_.size() > 63)
    throw ValidationError("instance has " + std::to_string(boxes_.size()) +
                          " boxes, limit is 63");
  for (std::size_t i = 0; i < boxes_.size(); ++i)
    if (boxes_[i].cost < 0)
      throw ValidationError("negative cost " + rat_to_string(boxes_[i].cost) +
                            " in box " + std::to_string(i));
  std::set<Rat> sup;
  for (const auto& b : boxes_)
    for (const auto& a : b.dist.atoms()) sup.insert(a.value);
  support_.assign(sup.begin(), sup.end());
}

std::string action_to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::Stop:
      return "Stop";
    case ActionKind::Close:
      return "Close(" + std::to_string(a.box) + ")";
    case ActionKind::Open:
      return "Open(" + std::to_string(a.box) + ")";
  }
  return "?";
}

namespace {

Rat rat_from_json(const json& j, const std::string& what) {
  if (!j.is_string()) throw ValidationError(what + " must be a rational string");
  try {
    return parse_rat(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

}  // namespace

Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("boxes") || !j["boxes"].is_array())
    throw ValidationError("instance JSON must be an object with a \"boxes\" array");
  std::vector<BoxSpec> boxes;
  int idx = 0;
  for (const auto& jb : j["boxes"]) {
    const std::string where = "box " + std::to_string(idx);
    if (!jb.is_object() || !jb.contains("cost") || !jb.contains("values"))
      throw ValidationError(where + " must have \"cost\" and \"values\"");
    Rat cost = rat_from_json(jb["cost"], "cost of " + where);
    if (cost < 0)
      throw ValidationError("negative cost " + rat_to_string(cost) + " in " + where);
    if (!jb["values"].is_array())
      throw ValidationError("\"values\" of " + where + " must be an array");
    std::vector<Atom> atoms;
    for (const auto& jv : jb["values"]) {
      if (!jv.is_array() || jv.size() != 2)
        throw ValidationError("each value of " + where + " must be a [value, prob] pair");
      atoms.push_back(Atom{rat_from_json(jv[0], "value in " + where),
                           rat_from_json(jv[1], "probability in " + where)});
    }
    boxes.push_back(BoxSpec{DiscreteDistribution::from_atoms(std::move(atoms), idx), cost});
    ++idx;
  }
  return Instance(std::move(boxes));
}

std::string instance_to_json(const Instance& inst) {
  json boxes = json::array();
  for (const auto& b : inst.boxes()) {
    json values = json::array();
    for (const auto& a : b.dist.atoms())
      values.push_back({rat_to_string(a.value), rat_to_string(a.prob)});
    boxes.push_back({{"cost", rat_to_string(b.cost)}, {"values", values}});
  }
  return json{{"boxes", boxes}}.dump();
}

std::string instance_digest(const Instance& inst) {
  std::string s = instance_to_json(inst);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace pandora
