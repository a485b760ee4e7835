#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "effstab/measures.hpp"
#include "effstab/orcheck.hpp"
#include "effstab/scc.hpp"
#include "effstab/transport.hpp"

namespace py = pybind11;
using namespace effstab;

namespace {

RiskPair pair_of(double p0, double p1) { return RiskPair(p0, p1); }

template <class T>
void register_error(py::module_& m, const char* name, py::handle base) {
  py::register_exception<T>(m, name, base);
}

}  // namespace

PYBIND11_MODULE(_effstab, m) {
  m.doc() = "Effect-measure algebra, switch mechanisms and odds-ratio checks";

  auto base = py::register_exception<Error>(m, "EffstabError", PyExc_ValueError);
  register_error<InvalidArgument>(m, "InvalidArgument", base);
  register_error<UndefinedMeasure>(m, "UndefinedMeasure", base);
  register_error<InvalidPrediction>(m, "InvalidPrediction", base);
  register_error<WeightError>(m, "WeightError", base);
  register_error<UnknownModifier>(m, "UnknownModifier", base);
  register_error<IncoherentMechanism>(m, "IncoherentMechanism", base);
  register_error<NotMonotone>(m, "NotMonotone", base);
  register_error<DependencePresent>(m, "DependencePresent", base);
  register_error<InfeasibleDependence>(m, "InfeasibleDependence", base);
  register_error<Infeasible>(m, "Infeasible", base);
  register_error<ValidationError>(m, "ValidationError", base);
  register_error<ParseError>(m, "ParseError", base);

  py::enum_<MeasureKind>(m, "MeasureKind")
      .value("RD", MeasureKind::RD)
      .value("RR", MeasureKind::RR)
      .value("OR", MeasureKind::OR)
      .value("SR", MeasureKind::SR)
      .value("SWITCH", MeasureKind::Switch);

  py::enum_<Representation>(m, "Representation")
      .value("OUTCOME_PIES", Representation::OutcomePies)
      .value("COMPLEMENT_PIES", Representation::ComplementPies);

  py::enum_<SwitchKind>(m, "SwitchKind")
      .value("B", SwitchKind::B)
      .value("C", SwitchKind::C)
      .value("D", SwitchKind::D)
      .value("E", SwitchKind::E);

  py::enum_<SwitchRole>(m, "SwitchRole")
      .value("INCREASE", SwitchRole::Increase)
      .value("DECREASE", SwitchRole::Decrease);

  py::class_<EffectMeasure>(m, "EffectMeasure")
      .def(py::init([](MeasureKind kind, double value) {
             return EffectMeasure{kind, value};
           }),
           py::arg("kind"), py::arg("value"))
      .def_readwrite("kind", &EffectMeasure::kind)
      .def_readwrite("value", &EffectMeasure::value)
      .def("__repr__", [](const EffectMeasure& e) {
        return "EffectMeasure(" + std::string(to_string(e.kind)) + ", " +
               std::to_string(e.value) + ")";
      });

  py::class_<Dependence>(m, "Dependence")
      .def(py::init([](SwitchRole target, double given_bg, double given_none) {
             return Dependence{target, given_bg, given_none};
           }),
           py::arg("target"), py::arg("given_background"),
           py::arg("given_no_background"))
      .def_readwrite("target", &Dependence::target)
      .def_readwrite("given_background", &Dependence::given_background)
      .def_readwrite("given_no_background", &Dependence::given_no_background);

  py::class_<MechanismSpec>(m, "MechanismSpec")
      .def(py::init([](Representation rep, double bg, double inc, double dec,
                       std::optional<Dependence> dep) {
             MechanismSpec mech{rep, bg, inc, dec, std::nullopt};
             if (dep) mech = with_dependence(mech, *dep);
             mech.validate();
             return mech;
           }),
           py::arg("representation") = Representation::OutcomePies,
           py::arg("background_prev") = 0.0,
           py::arg("switch_prev_increase") = 0.0,
           py::arg("switch_prev_decrease") = 0.0,
           py::arg("dependence") = std::nullopt)
      .def_readwrite("representation", &MechanismSpec::representation)
      .def_readwrite("background_prev", &MechanismSpec::background_prev)
      .def_readwrite("switch_prev_increase", &MechanismSpec::switch_prev_increase)
      .def_readwrite("switch_prev_decrease", &MechanismSpec::switch_prev_decrease)
      .def_readwrite("dependence", &MechanismSpec::dependence);

  // Risk pairs cross the boundary as (p0, p1) tuples.
  const auto as_tuple = [](const RiskPair& p) {
    return py::make_tuple(p.p0.value(), p.p1.value());
  };

  m.def("compute_measure",
        [](MeasureKind kind, double p0, double p1) {
          return compute_measure(kind, pair_of(p0, p1)).value;
        },
        py::arg("kind"), py::arg("p0"), py::arg("p1"));
  m.def("apply_effect",
        [](MeasureKind kind, double value, double p) {
          return apply_effect({kind, value}, Risk(p)).value();
        },
        py::arg("kind"), py::arg("value"), py::arg("p"));
  m.def("convert_measure",
        [](MeasureKind from_kind, double value, double p0, MeasureKind to_kind) {
          return convert_measure({from_kind, value}, Risk(p0), to_kind).value;
        },
        py::arg("from_kind"), py::arg("value"), py::arg("p0"), py::arg("to_kind"));
  m.def("recode_outcome",
        [as_tuple](double p0, double p1) { return as_tuple(recode_outcome(pair_of(p0, p1))); },
        py::arg("p0"), py::arg("p1"));
  m.def("pool_strata",
        [as_tuple](const std::vector<std::tuple<double, double, double>>& strata) {
          std::vector<StratumRow> rows;
          for (const auto& [w, p0, p1] : strata) rows.push_back({w, pair_of(p0, p1), ""});
          return as_tuple(pool_strata(rows));
        },
        py::arg("strata"), "Pool (weight, p0, p1) strata.");
  m.def("closure_check",
        [](MeasureKind kind, double value, std::size_t grid_size) {
          const ClosureResult r = closure_check(kind, value, grid_size);
          py::object violation = py::none();
          if (r.first_violation) {
            violation = py::make_tuple(r.first_violation->p, r.first_violation->raw);
          }
          return py::make_tuple(r.closed, violation);
        },
        py::arg("kind"), py::arg("value"), py::arg("grid_size") = kDefaultGridSize);
  m.def("prediction_equivalent",
        [](MeasureKind ka, double va, MeasureKind kb, double vb,
           std::size_t grid_size, double tol) {
          return prediction_equivalent({ka, va}, {kb, vb}, grid_size, tol);
        },
        py::arg("kind_a"), py::arg("value_a"), py::arg("kind_b"), py::arg("value_b"),
        py::arg("grid_size") = kDefaultGridSize, py::arg("tol") = kRiskTol);

  m.def("predict_risk",
        [](double p0, MeasureKind kind, double value) {
          return predict_risk({Risk(p0), std::nullopt, EffectMeasure{kind, value}})
              .value();
        },
        py::arg("p0"), py::arg("kind"), py::arg("value"));
  m.def("predict_risk_modified",
        [](double p0, MeasureKind kind, const std::map<std::string, double>& table,
           std::optional<std::string> key) {
          std::map<std::string, EffectMeasure> entries;
          for (const auto& [k, v] : table) entries[k] = EffectMeasure{kind, v};
          return predict_risk({Risk(p0), std::move(key), ModifierTable(std::move(entries))})
              .value();
        },
        py::arg("p0"), py::arg("kind"), py::arg("table"), py::arg("key") = std::nullopt);
  m.def("divergence_report",
        [](double ref_p0, double ref_p1, double target) {
          const DivergenceReport report = divergence_report(pair_of(ref_p0, ref_p1), Risk(target));
          py::list rows;
          for (const auto& row : report.rows) {
            py::dict d;
            d["kind"] = row.kind;
            d["status"] = std::string(to_string(row.status));
            d["measure_value"] = row.measure_value;
            d["predicted"] = row.predicted;
            d["raw_prediction"] = row.raw_prediction;
            rows.append(d);
          }
          return rows;
        },
        py::arg("ref_p0"), py::arg("ref_p1"), py::arg("target_baseline"));
  m.def("rare_disease_gap",
        [](double p0, double p1) { return rare_disease_gap(pair_of(p0, p1)); },
        py::arg("p0"), py::arg("p1"));

  m.def("analytic_risks",
        [as_tuple](const MechanismSpec& mech) { return as_tuple(analytic_risks(mech)); },
        py::arg("mechanism"));
  m.def("simulate",
        [](const MechanismSpec& mech, std::size_t n, std::uint64_t seed,
           std::size_t threads) {
          const SimulationResult r = simulate(mech, n, seed, false, threads);
          py::dict d;
          d["n"] = r.n;
          d["seed"] = r.seed;
          d["events0"] = r.events0;
          d["events1"] = r.events1;
          d["p0_hat"] = r.p0_hat();
          d["p1_hat"] = r.p1_hat();
          return d;
        },
        py::arg("mechanism"), py::arg("n"), py::arg("seed"), py::arg("threads") = 0);
  m.def("stability_table",
        [](const MechanismSpec& mech, const std::vector<double>& backgrounds) {
          const StabilityReport report = stability_table(mech, backgrounds);
          py::list rows;
          for (const auto& row : report.rows) {
            py::dict d;
            d["background_prev"] = row.background_prev;
            d["p0"] = row.pair.p0.value();
            d["p1"] = row.pair.p1.value();
            for (const MeasureKind kind : kAllMeasureKinds) {
              d[py::str(std::string(to_string(kind)))] = row.measures[kind];
            }
            rows.append(d);
          }
          return rows;
        },
        py::arg("mechanism"), py::arg("background_prevs"));
  m.def("stable_measure_value", &stable_measure_value, py::arg("mechanism"));
  m.def("falsification_check",
        [](SwitchKind kind, double prev, double p0, double p1) {
          const FalsificationResult r = falsification_check(kind, prev, pair_of(p0, p1));
          return py::make_tuple(r.consistent, r.constraint);
        },
        py::arg("kind"), py::arg("switch_prev"), py::arg("p0"), py::arg("p1"));
  m.def("coherence_check",
        [](const std::set<SwitchKind>& kinds) { coherence_check(kinds); },
        py::arg("kinds"));
  m.def("is_coherent", &is_coherent, py::arg("kinds"));
  m.def("correlation_sensitivity",
        [](const MechanismSpec& mech, double lower, double upper, std::size_t steps) {
          const SensitivityReport report = correlation_sensitivity(mech, lower, upper, steps);
          py::list rows;
          for (const auto& row : report.rows) {
            rows.append(py::make_tuple(row.given_background, row.given_no_background,
                                       row.pair.p0.value(), row.pair.p1.value(),
                                       row.measure_value));
          }
          return rows;
        },
        py::arg("mechanism"), py::arg("lower"), py::arg("upper"), py::arg("steps"));
  m.def("bounds_nonmonotone",
        [](double p0, double p1, double max_opposing, std::size_t resolution) {
          const EffectBounds b = bounds_nonmonotone(pair_of(p0, p1), max_opposing, resolution);
          return py::make_tuple(b.lower, b.upper);
        },
        py::arg("p0"), py::arg("p1"), py::arg("max_opposing_prev"),
        py::arg("resolution") = kDefaultBoundsResolution);

  m.def("or_residual",
        [](double p0_s, double p1_s, double p0_t, double p1_t, double w) {
          return or_residual({p0_s, p1_s, p0_t, p1_t, w});
        },
        py::arg("p0_s"), py::arg("p1_s"), py::arg("p0_t"), py::arg("p1_t"), py::arg("w"));
  m.def("counterexample_search",
        [](std::size_t trials, std::uint64_t seed, double residual_tol,
           double degeneracy_tol) -> py::object {
          const SearchResult r = counterexample_search(trials, seed, residual_tol, degeneracy_tol);
          if (!r.counterexample) return py::none();
          const auto& c = *r.counterexample;
          return py::make_tuple(c.p0_s, c.p1_s, c.p0_t, c.p1_t, c.w);
        },
        py::arg("trials"), py::arg("seed"), py::arg("residual_tol") = 1e-10,
        py::arg("degeneracy_tol") = 1e-3);
  m.def("collapsibility_audit",
        [](MeasureKind kind, std::size_t trials, std::uint64_t seed) {
          const CollapsibilityReport r = collapsibility_audit(kind, trials, seed);
          return py::make_tuple(r.collapsible, r.worst_violation);
        },
        py::arg("kind"), py::arg("trials"), py::arg("seed"));
}
