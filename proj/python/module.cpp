// pybind11 bindings. Rationals cross the boundary as "p/q" strings to keep
// exactness; instances and policies as their JSON forms.

#include "pandora/committing.hpp"
#include "pandora/exact.hpp"
#include "pandora/gen.hpp"
#include "pandora/ptas.hpp"
#include "pandora/sim.hpp"
#include "pandora/twophase.hpp"
#include "pandora/weitzman.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pandora;

namespace {

BoxSet set_from_list(const Instance& inst, const std::vector<int>& boxes) {
  BoxSet u = BoxSet::empty_set();
  for (int b : boxes) {
    if (b < 0 || b >= inst.size())
      throw py::value_error("box index " + std::to_string(b) + " out of range");
    u = u.with(b);
  }
  return u;
}

py::dict stats_to_dict(const SimStats& st) {
  py::dict d;
  d["samples"] = st.samples;
  d["mean"] = st.mean;
  d["std_error"] = st.std_error;
  py::list per_box;
  for (const auto& p : st.per_box) {
    py::dict b;
    b["inspected_freq"] = p.inspected_freq;
    b["selected_freq"] = p.selected_freq;
    b["net_minus_kappa_mean"] = p.net_minus_kappa_mean;
    b["net_minus_kappa_se"] = p.net_minus_kappa_se;
    b["exposure_gap_mean"] = p.exposure_gap_mean;
    b["exposure_gap_se"] = p.exposure_gap_se;
    per_box.append(b);
  }
  d["per_box"] = per_box;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pandora's box with nonobligatory inspection: exact solver, two-phase "
            "policies, committing policies, approximation pipeline, simulation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  py::class_<Instance>(m, "Instance")
      .def_static("from_json", [](const std::string& s) { return parse_instance(s); })
      .def("to_json", &instance_to_json)
      .def("digest", &instance_digest)
      .def_property_readonly("n", &Instance::size)
      .def("expected_value",
           [](const Instance& inst, int box) {
             return rat_to_string(inst.box(box).dist.expected_value());
           })
      .def("reservation_value",
           [](const Instance& inst, int box) {
             return rat_to_string(reservation_value(inst.box(box)));
           })
      .def("kappa_atoms", [](const Instance& inst, int box) {
        py::list out;
        for (const auto& a : kappa_distribution(inst.box(box)).atoms())
          out.append(py::make_tuple(rat_to_string(a.value), rat_to_string(a.prob)));
        return out;
      });

  py::class_<ValueTable>(m, "ValueTable")
      .def_property_readonly("opt", [](const ValueTable& t) { return rat_to_string(t.opt()); })
      .def("value",
           [](const ValueTable& t, const std::vector<int>& boxes, const std::string& alpha,
              const Instance& inst) {
             return rat_to_string(t.at(set_from_list(inst, boxes), parse_rat(alpha)).value);
           })
      .def("action",
           [](const ValueTable& t, const std::vector<int>& boxes, const std::string& alpha,
              const Instance& inst) {
             return action_to_string(t.at(set_from_list(inst, boxes), parse_rat(alpha)).action);
           })
      .def("uses_backup", [](const ValueTable& t, const std::vector<int>& boxes,
                             const std::string& alpha, const Instance& inst) {
        return t.at(set_from_list(inst, boxes), parse_rat(alpha)).uses_backup;
      });

  m.def("solve", &solve);
  m.def("weitz_value", [](const Instance& inst, const std::vector<int>& boxes,
                          const std::string& alpha) {
    return rat_to_string(weitz_value(inst, set_from_list(inst, boxes), parse_rat(alpha)));
  });
  m.def("obligatory_opt", [](const Instance& inst, const std::vector<int>& boxes,
                             const std::string& alpha) {
    return rat_to_string(obligatory_opt(inst, set_from_list(inst, boxes), parse_rat(alpha)));
  });
  m.def("threshold_of_set",
        [](const Instance& inst, const ValueTable& t, const std::vector<int>& boxes) {
          return threshold_to_string(threshold_of_set(inst, t, set_from_list(inst, boxes)));
        });
  m.def("verify_certificate",
        [](const Instance& inst, const std::vector<int>& order, const std::string& target) {
          auto r = verify_certificate(inst, order, parse_rat(target));
          return py::make_tuple(rat_to_string(r.utility), r.accepted);
        });
  m.def("best_two_phase", [](const Instance& inst) {
    auto [pol, val] = best_two_phase(inst);
    return py::make_tuple(policy_to_json(pol), rat_to_string(val));
  });
  m.def("eval_two_phase", [](const Instance& inst, const std::string& policy_json) {
    return rat_to_string(eval_two_phase(inst, policy_from_json(policy_json)));
  });
  m.def("best_committing", [](const Instance& inst) {
    auto [choice, val] = best_committing(inst);
    return py::make_tuple(
        choice.weitzman ? std::string("weitzman") : "backup " + std::to_string(choice.backup),
        rat_to_string(val));
  });
  m.def(
      "ptas_pipeline",
      [](const Instance& inst, const std::string& epsilon) {
        return ptas_report_to_json(ptas_pipeline(inst, parse_rat(epsilon)));
      },
      py::arg("instance"), py::arg("epsilon") = "1/4");
  m.def(
      "simulate",
      [](const Instance& inst, const std::string& policy_json, std::uint64_t samples,
         std::uint64_t seed, int jobs) {
        TwoPhasePolicy pol = policy_from_json(policy_json);
        return stats_to_dict(simulate(inst, two_phase_sim_policy(inst, pol), samples, seed, jobs));
      },
      py::arg("instance"), py::arg("policy_json"), py::arg("samples") = 100000,
      py::arg("seed") = 0, py::arg("jobs") = 1);
  m.def(
      "simulate_optimal",
      [](const Instance& inst, const ValueTable& table, std::uint64_t samples,
         std::uint64_t seed, int jobs) {
        return stats_to_dict(simulate(inst, optimal_policy(inst, table), samples, seed, jobs));
      },
      py::arg("instance"), py::arg("table"), py::arg("samples") = 100000, py::arg("seed") = 0,
      py::arg("jobs") = 1);
  m.def(
      "gen_instance",
      [](int n, int atoms, std::uint64_t seed) {
        GenParams p;
        p.n = n;
        p.max_atoms = atoms;
        p.seed = seed;
        return instance_to_json(gen_instance(p));
      },
      py::arg("n") = 4, py::arg("atoms") = 3, py::arg("seed") = 0);

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
