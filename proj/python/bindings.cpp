#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mmr/config.hpp"
#include "mmr/errors.hpp"
#include "mmr/regret.hpp"
#include "mmr/report.hpp"

namespace py = pybind11;
using namespace mmr;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-form climate policy solver and minimax-regret analysis";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<ValidationError>(m, "ValidationError", error);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", error);
  py::register_exception<DivergentIntegral>(m, "DivergentIntegral", numerical);
  py::register_exception<NonConvergence>(m, "NonConvergence", numerical);
  py::register_exception<InvalidDiscount>(m, "InvalidDiscount", numerical);
  py::register_exception<ResonantForcing>(m, "ResonantForcing", numerical);
  // NoPeak carries the long-run temperature; expose it as an attribute.
  static PyObject* no_peak = py::exception<NoPeak>(m, "NoPeak", numerical.ptr()).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NoPeak& e) {
      py::object exc = py::reinterpret_borrow<py::object>(no_peak)(e.what());
      exc.attr("asymptote") = e.asymptote();
      PyErr_SetObject(no_peak, exc.ptr());
    }
  });

  py::class_<Term>(m, "Term")
      .def(py::init<double, int, double>(), py::arg("coeff"), py::arg("power"), py::arg("rate"))
      .def_readwrite("coeff", &Term::coeff)
      .def_readwrite("power", &Term::power)
      .def_readwrite("rate", &Term::rate)
      .def("__repr__", [](const Term& t) {
        return "Term(" + std::to_string(t.coeff) + ", " + std::to_string(t.power) + ", " +
               std::to_string(t.rate) + ")";
      });

  py::class_<ExpPoly>(m, "ExpPoly")
      .def(py::init<>())
      .def(py::init<std::vector<Term>>(), py::arg("terms"))
      .def_static("constant", &ExpPoly::constant)
      .def_static("monomial", &ExpPoly::monomial, py::arg("coeff"), py::arg("power"),
                  py::arg("rate"))
      .def_property_readonly("terms", &ExpPoly::terms)
      .def("__call__", py::vectorize(&ExpPoly::operator()))
      .def("derivative", &ExpPoly::derivative)
      .def("integral_from_zero", &ExpPoly::integral_from_zero)
      .def("constant_term", &ExpPoly::constant_term)
      .def("is_zero", &ExpPoly::is_zero)
      .def("__len__", &ExpPoly::size)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self * double())
      .def(double() * py::self)
      .def(-py::self)
      .def(py::self == py::self)
      .def("__repr__", &ExpPoly::to_string);
  m.def("integrate_discounted", &integrate_discounted, py::arg("f"), py::arg("discount"));

  py::enum_<FormVariant>(m, "FormVariant")
      .value("AS_PRINTED", FormVariant::AsPrinted)
      .value("THETA_SCALED", FormVariant::ThetaScaledExponent);

  py::class_<BaselineParams>(m, "BaselineParams")
      .def(py::init([](double theta, double phi, double b0, FormVariant v) {
             return BaselineParams{theta, phi, b0, 0.0, v};
           }),
           py::arg("theta"), py::arg("phi"), py::arg("b0"),
           py::arg("variant") = FormVariant::ThetaScaledExponent)
      .def_readwrite("theta", &BaselineParams::theta)
      .def_readwrite("phi", &BaselineParams::phi)
      .def_readwrite("b0", &BaselineParams::b0)
      .def_readwrite("r_squared", &BaselineParams::r_squared)
      .def_readwrite("variant", &BaselineParams::variant)
      .def("evaluate", &BaselineParams::evaluate);

  m.def(
      "fit_baseline",
      [](const std::vector<double>& years, const std::vector<double>& emissions, int start_year,
         FormVariant variant, const BaselineParams& guess) {
        if (years.size() != emissions.size()) {
          throw ValidationError("years and emissions differ in length");
        }
        EmissionsSeries s;
        for (std::size_t i = 0; i < years.size(); ++i) {
          s.points.push_back({years[i] - start_year, emissions[i]});
        }
        s.validate();
        return fit_baseline(s, variant, guess);
      },
      py::arg("years"), py::arg("emissions"), py::arg("start_year") = 2020,
      py::arg("variant") = FormVariant::ThetaScaledExponent,
      py::arg("guess") = BaselineParams{0.01, 600.0, 300.0});
  m.def("load_and_fit",
        [](const std::filesystem::path& path, int start_year, FormVariant variant) {
          return fit_baseline(load_emissions(path, start_year), variant, {0.01, 600.0, 300.0});
        },
        py::arg("path"), py::arg("start_year") = 2020,
        py::arg("variant") = FormVariant::ThetaScaledExponent);
  m.def("baseline_exppoly", &baseline_exppoly);
  m.def("calibrate_initial_stock", &calibrate_initial_stock, py::arg("baseline"),
        py::arg("ccr"), py::arg("asymptotic_temperature"));

  py::class_<EconParams>(m, "EconParams")
      .def(py::init<double, double>(), py::arg("alpha") = 0.000125, py::arg("beta") = 0.018)
      .def_readwrite("alpha", &EconParams::alpha)
      .def_readwrite("beta", &EconParams::beta);

  py::class_<ClimateModel>(m, "ClimateModel")
      .def(py::init<std::string, double>(), py::arg("name"), py::arg("ccr"))
      .def_readwrite("name", &ClimateModel::name)
      .def_readwrite("ccr", &ClimateModel::ccr)
      .def("__repr__", [](const ClimateModel& c) {
        return "ClimateModel('" + c.name + "', " + std::to_string(c.ccr) + ")";
      });

  py::class_<ScenarioConfig>(m, "Scenario")
      .def(py::init<ExpPoly, double, EconParams, int>(), py::arg("baseline"), py::arg("e0"),
           py::arg("econ") = EconParams{}, py::arg("start_year") = 2020)
      .def_readwrite("baseline", &ScenarioConfig::baseline)
      .def_readwrite("e0", &ScenarioConfig::e0)
      .def_readwrite("econ", &ScenarioConfig::econ)
      .def_readwrite("start_year", &ScenarioConfig::start_year);

  py::class_<CharRoots>(m, "CharRoots")
      .def_readonly("unstable", &CharRoots::unstable)
      .def_readonly("stable", &CharRoots::stable)
      .def_readonly("k", &CharRoots::k);
  m.def("char_roots", &char_roots, py::arg("discount"), py::arg("ccr"), py::arg("alpha"),
        py::arg("beta"));

  py::class_<OptimalSolution>(m, "Solution")
      .def_readonly("abatement", &OptimalSolution::abatement)
      .def_readonly("cumulative", &OptimalSolution::cumulative)
      .def_readonly("temperature", &OptimalSolution::temperature)
      .def_readonly("discount", &OptimalSolution::discount)
      .def_readonly("model", &OptimalSolution::model)
      .def_readonly("cost", &OptimalSolution::cost)
      .def_readonly("warnings", &OptimalSolution::warnings);
  m.def("solve_optimal",
        [](double d, const ClimateModel& model, const ScenarioConfig& sc) {
          return solve_optimal(d, model, sc);
        },
        py::arg("discount"), py::arg("model"), py::arg("scenario"));
  m.def("no_abatement", &no_abatement_solution, py::arg("model"), py::arg("scenario"),
        py::arg("discount"));
  m.def("total_cost", &discounted_total_cost, py::arg("abatement"), py::arg("econ"),
        py::arg("model"), py::arg("discount"), py::arg("baseline"), py::arg("e0"));

  py::class_<StateOfWorld>(m, "State")
      .def_readonly("discount", &StateOfWorld::discount)
      .def_readonly("model", &StateOfWorld::model)
      .def_property_readonly("label", &StateOfWorld::label);
  py::class_<Policy>(m, "Policy")
      .def(py::init([](ExpPoly a) { return Policy{std::move(a), std::nullopt}; }),
           py::arg("abatement"))
      .def_readonly("abatement", &Policy::abatement)
      .def_readonly("provenance", &Policy::provenance)
      .def_property_readonly("is_no_abatement", &Policy::is_no_abatement)
      .def_property_readonly("label", &Policy::label);

  py::class_<RegretMatrix>(m, "RegretMatrix")
      .def_readonly("states", &RegretMatrix::states)
      .def_readonly("policies", &RegretMatrix::policies)
      .def_readonly("optimal_costs", &RegretMatrix::optimal_costs)
      .def_readonly("max_regret", &RegretMatrix::max_regret)
      .def_readonly("worst_state", &RegretMatrix::worst_state)
      .def_readonly("mmr_index", &RegretMatrix::mmr_index)
      .def_property_readonly("shape", [](const RegretMatrix& r) {
        return py::make_tuple(r.rows(), r.cols());
      })
      .def("at", &RegretMatrix::at)
      .def("rows_list", [](const RegretMatrix& r) {
        std::vector<std::vector<double>> out(r.rows());
        for (std::size_t i = 0; i < r.rows(); ++i) {
          out[i].assign(r.values.begin() + i * r.cols(), r.values.begin() + (i + 1) * r.cols());
        }
        return out;
      });
  m.def("regret_matrix",
        [](const std::vector<double>& rates, const std::vector<ClimateModel>& ensemble,
           const ScenarioConfig& sc) { return regret_matrix(rates, ensemble, sc); },
        py::arg("rates"), py::arg("ensemble"), py::arg("scenario"));

  py::class_<MmrChoice>(m, "MmrChoice")
      .def_readonly("index", &MmrChoice::index)
      .def_readonly("policy", &MmrChoice::policy)
      .def_readonly("max_regret", &MmrChoice::max_regret);
  m.def("mmr_select", &mmr_select);

  py::class_<TemperaturePeak>(m, "TemperaturePeak")
      .def_readonly("years", &TemperaturePeak::years)
      .def_readonly("tmax", &TemperaturePeak::tmax)
      .def_readonly("increase", &TemperaturePeak::increase);
  m.def("tmax",
        [](const Policy& p, const ClimateModel& model, const ScenarioConfig& sc) {
          return tmax(p, model, sc);
        },
        py::arg("policy"), py::arg("model"), py::arg("scenario"));

  py::class_<SweepCell>(m, "SweepCell")
      .def_readonly("alpha", &SweepCell::alpha)
      .def_readonly("beta", &SweepCell::beta)
      .def_readonly("choice", &SweepCell::choice)
      .def_readonly("hottest_model", &SweepCell::hottest_model)
      .def_readonly("peak", &SweepCell::peak);
  py::class_<SweepReport>(m, "SweepReport")
      .def_readonly("alphas", &SweepReport::alphas)
      .def_readonly("betas", &SweepReport::betas)
      .def_readonly("cells", &SweepReport::cells);
  m.def("sweep",
        [](const std::vector<double>& alphas, const std::vector<double>& betas,
           const std::vector<double>& rates, const std::vector<ClimateModel>& ensemble,
           const ScenarioConfig& sc) { return sweep(alphas, betas, rates, ensemble, sc); },
        py::arg("alphas"), py::arg("betas"), py::arg("rates"), py::arg("ensemble"),
        py::arg("scenario"));

  // Config-driven entry point: same resolution the command-line tool uses.
  m.def("scenario_from_config",
        [](const std::string& path, std::optional<double> alpha, std::optional<double> beta) {
          const auto c = load_config(locate_config(path));
          const auto r = resolve_scenario(c, alpha.value_or(c.economy.alpha),
                                          beta.value_or(c.economy.beta));
          return py::make_tuple(r.scenario, c.discount_rates, c.ensemble);
        },
        py::arg("path") = "", py::arg("alpha") = py::none(), py::arg("beta") = py::none());
  m.def("regret_matrix_csv", &regret_matrix_csv, py::arg("matrix"), py::arg("scale") = 1.0);
}
