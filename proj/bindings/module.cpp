#include <memory>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sislab/config.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/scenario.hpp"
#include "sislab/spectral.hpp"
#include "sislab/steady.hpp"
#include "sislab/svg.hpp"

namespace py = pybind11;
using namespace sislab;

namespace {

// The C++ API shares grids as shared_ptr<const Grid>; pybind holds the
// non-const pointer, so identity survives the round trip either way.
std::shared_ptr<Grid> unconst(const GridPtr& g) { return std::const_pointer_cast<Grid>(g); }

} // namespace

PYBIND11_MODULE(_sislab, m) {
    m.doc() = "steady states, spectra, and singular limits of four spatial SIS models";

    py::enum_<ModelKind>(m, "ModelKind")
        .value("MO", ModelKind::MO)
        .value("MW", ModelKind::MW)
        .value("SO", ModelKind::SO)
        .value("SW", ModelKind::SW);
    m.def("parse_model", &parse_model, py::arg("name"));
    m.def("model_name", &model_name, py::arg("kind"));
    m.def("conserves_mass", &conserves_mass, py::arg("kind"));

    py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
        .def_readonly("n_cells", &Grid::n_cells)
        .def_readonly("length", &Grid::length)
        .def_readonly("h", &Grid::h)
        .def_readonly("nodes", &Grid::nodes)
        .def_readonly("weights", &Grid::weights)
        .def_property_readonly("n_nodes", &Grid::n_nodes);
    m.def(
        "build_grid",
        [](int n_cells, double length) { return unconst(build_grid(n_cells, length)); },
        py::arg("n_cells"), py::arg("length") = 1.0);

    py::class_<Field>(m, "Field")
        .def_property_readonly("values", [](const Field& f) { return f.values; })
        .def("__len__", [](const Field& f) { return f.values.size(); })
        .def("__getitem__", [](const Field& f, int i) {
            if (i < 0 || i >= f.size())
                throw py::index_error();
            return f[i];
        });
    m.def(
        "make_field",
        [](const std::shared_ptr<Grid>& g, double fill) { return make_field(g, fill); },
        py::arg("grid"), py::arg("fill"));
    m.def(
        "field_from_values",
        [](const std::shared_ptr<Grid>& g, std::vector<double> values) {
            Field f{g, std::move(values)};
            require_bound(g, f, "field_from_values");
            return f;
        },
        py::arg("grid"), py::arg("values"));
    m.def(
        "integrate",
        [](const std::shared_ptr<Grid>& g, const Field& f) { return integrate(g, f); },
        py::arg("grid"), py::arg("field"));
    m.def("max_value", &max_value, py::arg("field"));
    m.def("min_value", &min_value, py::arg("field"));

    py::class_<CoefficientSet>(m, "CoefficientSet")
        .def_readonly("lambda_", &CoefficientSet::lambda)
        .def_readonly("beta", &CoefficientSet::beta)
        .def_readonly("gamma", &CoefficientSet::gamma)
        .def_readonly("mu", &CoefficientSet::mu)
        .def_readonly("total_mass", &CoefficientSet::total_mass);
    m.def(
        "preset_fig0a",
        [](const std::shared_ptr<Grid>& g, std::optional<double> n) { return preset_fig0a(g, n); },
        py::arg("grid"), py::arg("total_mass") = 1.0);
    m.def(
        "preset_moderate",
        [](const std::shared_ptr<Grid>& g, std::optional<double> n) {
            return preset_moderate(g, n);
        },
        py::arg("grid"), py::arg("total_mass") = 1.0);
    m.def(
        "preset_homogeneous",
        [](const std::shared_ptr<Grid>& g, double lambda, double beta, double gamma, double mu,
           std::optional<double> n) { return preset_homogeneous(g, lambda, beta, gamma, mu, n); },
        py::arg("grid"), py::arg("lambda_"), py::arg("beta"), py::arg("gamma"), py::arg("mu"),
        py::arg("total_mass") = py::none());
    m.def(
        "coeffs_from_expressions",
        [](const std::shared_ptr<Grid>& g, const std::string& lambda, const std::string& beta,
           const std::string& gamma, const std::string& mu, std::optional<double> n) {
            return coeffs_from_expressions(g, lambda, beta, gamma, mu, n);
        },
        py::arg("grid"), py::arg("lambda_"), py::arg("beta"), py::arg("gamma"), py::arg("mu"),
        py::arg("total_mass") = py::none());

    m.def(
        "solve_dfe",
        [](double d_S, const CoefficientSet& c, const std::shared_ptr<Grid>& g) {
            return solve_dfe(d_S, c, g);
        },
        py::arg("d_S"), py::arg("coeffs"), py::arg("grid"));

    py::class_<EigenResult>(m, "EigenResult")
        .def_readonly("eigenvalue", &EigenResult::eigenvalue)
        .def_readonly("eigenfunction", &EigenResult::eigenfunction)
        .def_readonly("residual", &EigenResult::residual)
        .def_readonly("iterations", &EigenResult::iterations);
    py::class_<R0Result>(m, "R0Result")
        .def_readonly("value", &R0Result::value)
        .def_readonly("maximizer", &R0Result::maximizer)
        .def_readonly("model", &R0Result::model)
        .def_readonly("d_I", &R0Result::d_I)
        .def_readonly("d_S", &R0Result::d_S)
        .def_readonly("iterations", &R0Result::iterations);
    py::class_<R0Limits>(m, "R0Limits")
        .def_readonly("low", &R0Limits::low)
        .def_readonly("high", &R0Limits::high);
    m.def(
        "compute_r0",
        [](ModelKind kind, double d_I, double d_S, const CoefficientSet& c,
           const std::shared_ptr<Grid>& g) { return compute_r0(kind, d_I, d_S, c, g); },
        py::arg("kind"), py::arg("d_I"), py::arg("d_S"), py::arg("coeffs"), py::arg("grid"));
    m.def(
        "lambda_star",
        [](ModelKind kind, double d_I, double d_S, const CoefficientSet& c,
           const std::shared_ptr<Grid>& g) { return lambda_star(kind, d_I, d_S, c, g); },
        py::arg("kind"), py::arg("d_I"), py::arg("d_S"), py::arg("coeffs"), py::arg("grid"));
    m.def(
        "r0_limits",
        [](ModelKind kind, double d_S, const CoefficientSet& c, const std::shared_ptr<Grid>& g) {
            return r0_limits(kind, d_S, c, g);
        },
        py::arg("kind"), py::arg("d_S"), py::arg("coeffs"), py::arg("grid"));

    py::class_<State>(m, "State")
        .def(py::init([](const Field& S, const Field& I, double t) {
                 return State{S, I, t};
             }),
             py::arg("S"), py::arg("I"), py::arg("t") = 0.0)
        .def_readonly("S", &State::S)
        .def_readonly("I", &State::I)
        .def_readonly("t", &State::t);
    py::enum_<RunVerdict>(m, "RunVerdict")
        .value("Steady", RunVerdict::Steady)
        .value("TMaxReached", RunVerdict::TMaxReached);
    py::class_<RunResult>(m, "RunResult")
        .def_readonly("state", &RunResult::state)
        .def_readonly("verdict", &RunResult::verdict)
        .def_readonly("steps", &RunResult::steps)
        .def_readonly("final_rate", &RunResult::final_rate);
    m.def(
        "simulate",
        [](ModelKind kind, const CoefficientSet& c, const std::shared_ptr<Grid>& g,
           const State& initial, double d_S, double d_I, double dt_initial, double steady_tol,
           double t_max) {
            StepperConfig sc;
            sc.dt_initial = dt_initial;
            sc.steady_tol = steady_tol;
            sc.t_max = t_max;
            sc.trace_stride = 1 << 28;
            (void)g;
            return run(initial, kind, c, d_S, d_I, sc);
        },
        py::arg("kind"), py::arg("coeffs"), py::arg("grid"), py::arg("initial"), py::arg("d_S"),
        py::arg("d_I"), py::arg("dt_initial") = 0.03125, py::arg("steady_tol") = 1e-8,
        py::arg("t_max") = 4000.0);
    m.def(
        "default_initial_state",
        [](ModelKind kind, const CoefficientSet& c, const std::shared_ptr<Grid>& g, double d_S) {
            return default_initial_state(kind, c, g, d_S);
        },
        py::arg("kind"), py::arg("coeffs"), py::arg("grid"), py::arg("d_S"));

    py::enum_<SteadyBranch>(m, "SteadyBranch")
        .value("Endemic", SteadyBranch::Endemic)
        .value("DiseaseFree", SteadyBranch::DiseaseFree);
    py::class_<SteadyResult>(m, "SteadyResult")
        .def_readonly("S", &SteadyResult::S)
        .def_readonly("I", &SteadyResult::I)
        .def_readonly("residual_inf", &SteadyResult::residual_inf)
        .def_readonly("newton_iterations", &SteadyResult::newton_iterations)
        .def_readonly("constrained_mass", &SteadyResult::constrained_mass)
        .def_readonly("branch", &SteadyResult::branch);
    m.def(
        "newton_steady",
        [](ModelKind kind, double d_S, double d_I, const CoefficientSet& c,
           const std::shared_ptr<Grid>& g, const State& init, double tol) {
            return newton_steady(kind, d_S, d_I, c, g, init, tol);
        },
        py::arg("kind"), py::arg("d_S"), py::arg("d_I"), py::arg("coeffs"), py::arg("grid"),
        py::arg("init"), py::arg("tol") = 1e-9);

    py::enum_<SweepTarget>(m, "SweepTarget")
        .value("DSToZero", SweepTarget::DSToZero)
        .value("DIToZero", SweepTarget::DIToZero)
        .value("Both", SweepTarget::Both);
    py::class_<SweepEntry>(m, "SweepEntry")
        .def_readonly("diffusivity", &SweepEntry::diffusivity)
        .def_readonly("result", &SweepEntry::result);
    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("kind", &SweepResult::kind)
        .def_readonly("target", &SweepResult::target)
        .def_readonly("other", &SweepResult::other)
        .def_readonly("entries", &SweepResult::entries)
        .def_readonly("failure", &SweepResult::failure);
    m.def(
        "sweep",
        [](ModelKind kind, SweepTarget target, const CoefficientSet& c,
           const std::shared_ptr<Grid>& g, const std::vector<double>& schedule, double other,
           double tol) { return sweep(kind, target, c, g, schedule, other, tol); },
        py::arg("kind"), py::arg("target"), py::arg("coeffs"), py::arg("grid"),
        py::arg("schedule"), py::arg("other"), py::arg("tol") = 1e-9);

    py::class_<LimitProfile>(m, "LimitProfile")
        .def_readonly("S_limit", &LimitProfile::S_limit)
        .def_readonly("I_limit", &LimitProfile::I_limit)
        .def_readonly("I_total", &LimitProfile::I_total)
        .def_readonly("provenance", &LimitProfile::provenance);
    m.def(
        "mw_limit_ds0",
        [](double d_I, const CoefficientSet& c, const std::shared_ptr<Grid>& g,
           const Field& init_I, double tol) { return mw_limit_ds0(d_I, c, g, init_I, tol); },
        py::arg("d_I"), py::arg("coeffs"), py::arg("grid"), py::arg("init_I"),
        py::arg("tol") = 1e-10);
    m.def(
        "mo_limit_wu_zou",
        [](double d, const CoefficientSet& c, const std::shared_ptr<Grid>& g, double N) {
            return mo_limit_wu_zou(d, c, g, N);
        },
        py::arg("d"), py::arg("coeffs"), py::arg("grid"), py::arg("N"));
    m.def(
        "so_limit_peng",
        [](double d0, const CoefficientSet& c, const std::shared_ptr<Grid>& g, double N) {
            return so_limit_peng(d0, c, g, N);
        },
        py::arg("d0"), py::arg("coeffs"), py::arg("grid"), py::arg("N"));

    py::class_<AprioriCheck>(m, "AprioriCheck")
        .def_readonly("value", &AprioriCheck::value)
        .def_readonly("bound", &AprioriCheck::bound)
        .def_readonly("ok", &AprioriCheck::ok);
    py::class_<AprioriReport>(m, "AprioriReport")
        .def_readonly("max_s", &AprioriReport::max_s)
        .def_readonly("min_s", &AprioriReport::min_s)
        .def_readonly("mass", &AprioriReport::mass)
        .def_readonly("incidence", &AprioriReport::incidence)
        .def_readonly("ok", &AprioriReport::ok);
    m.def("audit_apriori", &audit_apriori, py::arg("result"), py::arg("kind"), py::arg("coeffs"));
    m.def("support_fraction", &support_fraction, py::arg("field"), py::arg("ratio") = 1e-3);
    m.def("support_components", &support_components, py::arg("field"), py::arg("ratio") = 1e-3);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("figure", &ScenarioConfig::figure)
        .def_readwrite("models", &ScenarioConfig::models)
        .def_readwrite("n_cells", &ScenarioConfig::n_cells)
        .def_readwrite("length", &ScenarioConfig::length)
        .def_readwrite("out_dir", &ScenarioConfig::out_dir)
        .def_readwrite("preset", &ScenarioConfig::preset)
        .def_readwrite("coeffs_csv", &ScenarioConfig::coeffs_csv)
        .def_readwrite("hom_lambda", &ScenarioConfig::hom_lambda)
        .def_readwrite("hom_beta", &ScenarioConfig::hom_beta)
        .def_readwrite("hom_gamma", &ScenarioConfig::hom_gamma)
        .def_readwrite("hom_mu", &ScenarioConfig::hom_mu)
        .def_readwrite("total_mass", &ScenarioConfig::total_mass)
        .def_readwrite("d_S", &ScenarioConfig::d_S)
        .def_readwrite("d_I", &ScenarioConfig::d_I)
        .def_readwrite("sweep_target", &ScenarioConfig::sweep_target)
        .def_readwrite("schedule", &ScenarioConfig::schedule)
        .def_readwrite("ratio", &ScenarioConfig::ratio)
        .def_readwrite("newton_tol", &ScenarioConfig::newton_tol)
        .def_readwrite("dt_initial", &ScenarioConfig::dt_initial)
        .def_readwrite("steady_tol", &ScenarioConfig::steady_tol)
        .def_readwrite("t_max", &ScenarioConfig::t_max)
        .def("__eq__", [](const ScenarioConfig& a, const ScenarioConfig& b) { return a == b; });
    m.def("figure_config", &figure_config, py::arg("tag"));
    m.def("validate_scenario", &validate_scenario, py::arg("config"));
    m.def("config_to_string", &config_to_string, py::arg("config"));
    m.def("parse_config_string", [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    });

    py::class_<ModelOutcome>(m, "ModelOutcome")
        .def_readonly("kind", &ModelOutcome::kind)
        .def_readonly("ok", &ModelOutcome::ok)
        .def_readonly("error", &ModelOutcome::error)
        .def_readonly("steady", &ModelOutcome::steady)
        .def_readonly("r0", &ModelOutcome::r0)
        .def_readonly("profile_csv", &ModelOutcome::profile_csv);
    py::class_<FigureBundle>(m, "FigureBundle")
        .def_readonly("outcomes", &FigureBundle::outcomes)
        .def_readonly("summary_csv", &FigureBundle::summary_csv)
        .def_readonly("svg_s", &FigureBundle::svg_s)
        .def_readonly("svg_i", &FigureBundle::svg_i)
        .def_readonly("readme", &FigureBundle::readme)
        .def_readonly("all_ok", &FigureBundle::all_ok);
    m.def("run_scenario", &run_scenario, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("r0_report_csv", &r0_report_csv, py::arg("config"), py::arg("d_I_values"));

#ifdef SISLAB_VERSION_INFO
    m.attr("__version__") = SISLAB_VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
