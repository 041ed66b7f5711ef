// Command-line front end for scripted experiments.
//
// Exit codes: 0 success/accept, 1 reject or bound violation, 2 usage error,
// 3 budget error.

#include "pandora/committing.hpp"
#include "pandora/exact.hpp"
#include "pandora/gen.hpp"
#include "pandora/ptas.hpp"
#include "pandora/sim.hpp"
#include "pandora/twophase.hpp"
#include "pandora/weitzman.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace pandora;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<int> parse_index_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::string dec(const Rat& x) {
  std::ostringstream ss;
  ss << rat_to_double(x);
  return ss.str();
}

// JSON run report: exact rationals as strings alongside decimal renderings.
struct Report {
  json body;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Report(const std::string& command, const Instance* inst) {
    body["command"] = command;
    if (inst != nullptr) body["instance_digest"] = instance_digest(*inst);
  }

  void rat(const std::string& key, const Rat& x) {
    body[key] = rat_to_string(x);
    body[key + "_decimal"] = rat_to_double(x);
  }

  void emit() {
    auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    body["elapsed_ms"] = static_cast<double>(us) / 1000.0;
    std::cout << body.dump(2) << "\n";
  }
};

// Canonical optimal action tree: best actions from (U, alpha), branching on
// every atom of an opened box. Digested with FNV-1a for a stable fingerprint.
void action_tree(const Instance& inst, const ValueTable& table, BoxSet u, const Rat& alpha,
                 std::string& out) {
  Action a = table.at(u, alpha).action;
  out += action_to_string(a);
  if (a.kind != ActionKind::Open) return;
  out += "[";
  for (const auto& atom : inst.box(a.box).dist.atoms()) {
    out += rat_to_string(atom.value) + ":";
    action_tree(inst, table, u.without(a.box), rat_max(alpha, atom.value), out);
    out += ";";
  }
  out += "]";
}

std::string tree_digest(const std::string& tree) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : tree) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

int cmd_solve(const std::string& file, bool as_json) {
  Instance inst = parse_instance(read_file(file));
  ValueTable table = solve(inst);
  std::string tree;
  action_tree(inst, table, inst.full_set(), Rat(0), tree);
  if (as_json) {
    Report r("solve", &inst);
    r.rat("opt", table.opt());
    r.body["action_tree_digest"] = tree_digest(tree);
    r.emit();
  } else {
    std::cout << "OPT = " << rat_to_string(table.opt()) << " (" << dec(table.opt()) << ")\n";
    std::cout << "action tree digest: " << tree_digest(tree) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& file, const std::string& order_str,
               const std::string& target_str, bool as_json) {
  Instance inst = parse_instance(read_file(file));
  auto result = verify_certificate(inst, parse_index_list(order_str), parse_rat(target_str));
  if (as_json) {
    Report r("verify", &inst);
    r.rat("utility", result.utility);
    r.body["accepted"] = result.accepted;
    r.emit();
  } else {
    std::cout << "utility = " << rat_to_string(result.utility) << " (" << dec(result.utility)
              << ")\n"
              << (result.accepted ? "accepted" : "rejected") << "\n";
  }
  return result.accepted ? kExitOk : kExitReject;
}

int cmd_thresholds(const std::string& file, const std::string& set_str, bool as_json) {
  Instance inst = parse_instance(read_file(file));
  ValueTable table = solve(inst);
  BoxSet u = BoxSet::empty_set();
  for (int b : parse_index_list(set_str)) {
    if (b < 0 || b >= inst.size()) throw ValidationError("--set names box " + std::to_string(b));
    u = u.with(b);
  }
  ThresholdValue tau = threshold_of_set(inst, table, u);
  if (as_json) {
    Report r("thresholds", &inst);
    r.body["tau"] = threshold_to_string(tau);
    if (!tau.neg) r.body["tau_decimal"] = rat_to_double(tau.tau);
    r.emit();
  } else {
    std::cout << "tau = " << threshold_to_string(tau);
    if (!tau.neg) std::cout << " (" << dec(tau.tau) << ")";
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_two_phase(const std::string& file, bool as_json) {
  Instance inst = parse_instance(read_file(file));
  auto [pol, val] = best_two_phase(inst);
  if (as_json) {
    Report r("two-phase", &inst);
    r.body["policy"] = json::parse(policy_to_json(pol));
    r.rat("utility", val);
    r.emit();
  } else {
    std::cout << policy_to_json(pol) << "\n";
    std::cout << "utility = " << rat_to_string(val) << " (" << dec(val) << ")\n";
  }
  return kExitOk;
}

int cmd_committing(const std::string& file, bool as_json) {
  Instance inst = parse_instance(read_file(file));
  ValueTable table = solve(inst);
  auto [best, best_val] = best_committing(inst);
  Rat ratio = table.opt() > 0 ? best_val / table.opt() : Rat(1);
  bool pass = best_val * 5 >= table.opt() * 4;
  if (as_json) {
    Report r("committing", &inst);
    json rows = json::array();
    rows.push_back({{"choice", "weitzman"},
                    {"value", rat_to_string(eval_committing(inst, CommittingChoice::pure()))}});
    for (int i = 0; i < inst.size(); ++i)
      rows.push_back(
          {{"choice", "backup " + std::to_string(i)},
           {"value", rat_to_string(eval_committing(inst, CommittingChoice::with_backup(i)))}});
    r.body["table"] = rows;
    r.body["best"] = best.weitzman ? "weitzman" : "backup " + std::to_string(best.backup);
    r.rat("best_value", best_val);
    r.rat("opt", table.opt());
    r.rat("ratio", ratio);
    r.body["pass"] = pass;
    r.emit();
  } else {
    std::cout << "weitzman: "
              << rat_to_string(eval_committing(inst, CommittingChoice::pure())) << "\n";
    for (int i = 0; i < inst.size(); ++i)
      std::cout << "backup " << i << ": "
                << rat_to_string(eval_committing(inst, CommittingChoice::with_backup(i)))
                << "\n";
    std::cout << "best = " << rat_to_string(best_val) << " (" << dec(best_val) << ")"
              << (best.weitzman ? " [weitzman]" : " [backup " + std::to_string(best.backup) + "]")
              << "\n";
    std::cout << "OPT = " << rat_to_string(table.opt()) << ", ratio = " << rat_to_string(ratio)
              << " (" << dec(ratio) << ")\n";
    std::cout << "ratio >= 4/5: " << (pass ? "PASS" : "FAIL") << "\n";
  }
  return pass ? kExitOk : kExitReject;
}

int cmd_ptas(const std::string& file, const std::string& eps_str, bool committing_ref,
             bool as_json) {
  Instance inst = parse_instance(read_file(file));
  PtasOptions opts;
  opts.committing_ref = committing_ref;
  PtasReport report = ptas_pipeline(inst, parse_rat(eps_str), opts);
  if (as_json) {
    Report r("ptas", &inst);
    r.body.update(json::parse(ptas_report_to_json(report)));
    r.emit();
  } else {
    std::cout << ptas_report_to_json(report) << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const std::string& file, const std::string& policy_file,
                 std::uint64_t samples, std::uint64_t seed, int jobs, bool as_json) {
  Instance inst = parse_instance(read_file(file));
  TwoPhasePolicy pol = policy_from_json(read_file(policy_file));
  SimStats stats = simulate(inst, two_phase_sim_policy(inst, pol), samples, seed, jobs);
  if (as_json) {
    Report r("simulate", &inst);
    r.body.update(json::parse(sim_stats_to_json(stats)));
    r.emit();
  } else {
    std::cout << sim_stats_to_json(stats) << "\n";
  }
  return kExitOk;
}

int cmd_gen(int n, int atoms, std::uint64_t seed) {
  GenParams params;
  params.n = n;
  params.max_atoms = atoms;
  params.seed = seed;
  std::cout << instance_to_json(gen_instance(params)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pandora's box with nonobligatory inspection: exact solver, two-phase "
               "policies, committing policies, approximation pipeline, simulation"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "emit a JSON run report");

  std::string file, order_str, set_str, target_str, policy_file;
  std::string eps_str = "1/4";
  std::uint64_t samples = 100000, seed = 0;
  int jobs = 1, gen_n = 4, gen_atoms = 3;
  bool committing_ref = false;

  auto* solve_cmd = app.add_subcommand("solve", "exact optimal value and action tree digest");
  solve_cmd->add_option("file", file)->required();

  auto* verify_cmd = app.add_subcommand("verify", "verify an inspection-order certificate");
  verify_cmd->add_option("file", file)->required();
  verify_cmd->add_option("--order", order_str, "comma-separated box indices")->required();
  verify_cmd->add_option("--target", target_str, "target utility (rational)")->required();

  auto* thr_cmd = app.add_subcommand("thresholds", "threshold tau(U) of a box subset");
  thr_cmd->add_option("file", file)->required();
  thr_cmd->add_option("--set", set_str, "comma-separated box indices")->required();

  auto* tp_cmd = app.add_subcommand("two-phase", "best two-phase policy");
  tp_cmd->add_option("file", file)->required();

  auto* com_cmd = app.add_subcommand("committing", "the n+1 committing policies");
  com_cmd->add_option("file", file)->required();

  auto* ptas_cmd = app.add_subcommand("ptas", "approximation pipeline report");
  ptas_cmd->add_option("file", file)->required();
  ptas_cmd->add_option("--epsilon", eps_str, "rational epsilon in (0, 1/4]");
  ptas_cmd->add_flag("--opt-ref-committing", committing_ref,
                     "use the committing bound instead of the exact OPT");

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo policy evaluation");
  sim_cmd->add_option("file", file)->required();
  sim_cmd->add_option("--policy", policy_file, "two-phase policy JSON file")->required();
  sim_cmd->add_option("--samples", samples);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--jobs", jobs);

  auto* gen_cmd = app.add_subcommand("gen", "generate a random instance");
  gen_cmd->add_option("--n", gen_n);
  gen_cmd->add_option("--atoms", gen_atoms);
  gen_cmd->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(file, as_json);
    if (verify_cmd->parsed()) return cmd_verify(file, order_str, target_str, as_json);
    if (thr_cmd->parsed()) return cmd_thresholds(file, set_str, as_json);
    if (tp_cmd->parsed()) return cmd_two_phase(file, as_json);
    if (com_cmd->parsed()) return cmd_committing(file, as_json);
    if (ptas_cmd->parsed()) return cmd_ptas(file, eps_str, committing_ref, as_json);
    if (sim_cmd->parsed()) return cmd_simulate(file, policy_file, samples, seed, jobs, as_json);
    if (gen_cmd->parsed()) return cmd_gen(gen_n, gen_atoms, seed);
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
