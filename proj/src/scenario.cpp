#include "sislab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "sislab/csv.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/errors.hpp"
#include "sislab/spectral.hpp"
#include "sislab/svg.hpp"

namespace sislab {

namespace {

namespace fs = std::filesystem;

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Rescue path for near-singular diffusivities: the direct dynamics seed can
// park on a slow transient (the infected mass dies to denormal scale while
// the susceptibles still drift), leaving Newton without a usable basin.
// Walking the steady branch down a geometric diffusivity ladder from a
// well-conditioned head recovers the state at the exact target.
SteadyResult continue_to_target(const ScenarioConfig& config, const CoefficientSet& coeffs,
                                const GridPtr& grid, ModelKind kind) {
    const double d_S = config.d_S, d_I = config.d_I;
    const double head = 0.1;
    SweepTarget target;
    double other, goal;
    if (d_S < head && d_I >= head) {
        target = SweepTarget::DSToZero;
        other = d_I;
        goal = d_S;
    } else if (d_I < head && d_S >= head) {
        target = SweepTarget::DIToZero;
        other = d_S;
        goal = d_I;
    } else if (d_S < head && d_I < head) {
        target = SweepTarget::Both;
        other = d_I / d_S;
        goal = d_I;
    } else {
        throw SolverError("continuation fallback needs a diffusivity below " +
                          csvio::format_full(head));
    }
    // Half-decade rungs from the head down to the target, last rung exact.
    int rungs = static_cast<int>(std::ceil(2.0 * std::log10(head / goal)));
    rungs = std::max(rungs, 1);
    std::vector<double> schedule;
    for (int j = 0; j <= rungs; ++j)
        schedule.push_back(head * std::pow(goal / head, static_cast<double>(j) / rungs));
    schedule.back() = goal;
    SweepResult sr = sweep(kind, target, coeffs, grid, schedule, other, config.newton_tol);
    if (sr.failure || sr.entries.size() != schedule.size())
        throw SolverError("continuation fallback failed: " +
                          sr.failure.value_or("sweep returned too few entries"));
    return sr.entries.back().result;
}

ModelOutcome run_model(const ScenarioConfig& config, const CoefficientSet& coeffs,
                       const GridPtr& grid, ModelKind kind) {
    ModelOutcome o;
    o.kind = kind;
    try {
        try {
            State seed = default_initial_state(kind, coeffs, grid, config.d_S);
            StepperConfig sc;
            sc.dt_initial = config.dt_initial;
            sc.steady_tol = config.steady_tol;
            sc.t_max = config.t_max;
            sc.trace_stride = 1 << 28; // endpoints only; the trace is not kept
            RunResult rr = run(seed, kind, coeffs, config.d_S, config.d_I, sc);
            State warm = rr.state;
            // Newton needs the open positive cone; lift flushed-to-zero tails.
            for (double& v : warm.S.values)
                v = std::max(v, 1e-300);
            for (double& v : warm.I.values)
                v = std::max(v, 1e-300);
            o.steady = newton_steady(kind, config.d_S, config.d_I, coeffs, grid, warm,
                                     config.newton_tol);
        } catch (const SolverError& direct) {
            if (!(std::min(config.d_S, config.d_I) < 0.1))
                throw;
            try {
                o.steady = continue_to_target(config, coeffs, grid, kind);
            } catch (const SolverError& cont) {
                throw SolverError(std::string(direct.what()) + "; " + cont.what());
            }
        }
        o.r0 = compute_r0(kind, config.d_I, config.d_S, coeffs, grid).value;
        o.ok = true;
    } catch (const SolverError& e) {
        o.error = e.what();
    } catch (const ValidationError& e) {
        o.error = e.what();
    }
    return o;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot open \"" + path + "\" for writing");
    out << text;
    if (!out)
        throw SolverError("short write to \"" + path + "\"");
}

std::string summary_text(const FigureBundle& bundle) {
    std::ostringstream out;
    out << "model,d_S,d_I,R0,min_S,max_S,min_I,max_I,int_I,support_frac\n";
    for (const ModelOutcome& o : bundle.outcomes) {
        if (!o.ok)
            continue;
        const auto& c = bundle.config;
        out << model_name(o.kind) << ',' << csvio::format_full(c.d_S) << ','
            << csvio::format_full(c.d_I) << ',' << csvio::format_full(o.r0) << ','
            << csvio::format_full(min_value(o.steady.S)) << ','
            << csvio::format_full(max_value(o.steady.S)) << ','
            << csvio::format_full(min_value(o.steady.I)) << ','
            << csvio::format_full(max_value(o.steady.I)) << ','
            << csvio::format_full(integrate(bundle.grid, o.steady.I)) << ','
            << csvio::format_full(support_fraction(o.steady.I)) << '\n';
    }
    return out.str();
}

std::string panel_svg(const FigureBundle& bundle, bool infected) {
    SvgPanel panel;
    panel.title = std::string(infected ? "Infected" : "Susceptible") + " steady profiles (" +
                  bundle.config.figure + ")";
    panel.x_label = "x";
    panel.y_label = infected ? "I(x)" : "S(x)";
    for (const ModelOutcome& o : bundle.outcomes) {
        if (!o.ok)
            continue;
        const Field& f = infected ? o.steady.I : o.steady.S;
        panel.series.push_back({model_name(o.kind), model_color(o.kind), bundle.grid->nodes,
                                f.values});
    }
    return render_svg({panel});
}

std::string readme_text(const FigureBundle& bundle) {
    const ScenarioConfig& c = bundle.config;
    std::ostringstream out;
    out << "# " << (c.figure == "custom" ? "custom scenario" : c.figure) << " bundle\n\n";
    out << "Habitat preset `" << c.preset << "` on " << c.n_cells << " cells over [0, "
        << fmt_short(c.length) << "], d_S = " << fmt_short(c.d_S)
        << ", d_I = " << fmt_short(c.d_I) << ", total mass N = " << fmt_short(c.total_mass)
        << ".\n\nFiles:\n";
    for (const ModelOutcome& o : bundle.outcomes)
        if (o.ok)
            out << "- `profile_" << model_name(o.kind)
                << ".csv` — steady nodal profiles, columns x,S,I\n";
    out << "- `summary.csv` — one row per model: "
           "model,d_S,d_I,R0,min_S,max_S,min_I,max_I,int_I,support_frac\n";
    if (!bundle.svg_s.empty())
        out << "- `profiles_S.svg`, `profiles_I.svg` — the models overlaid per field\n";
    out << "\nSusceptible panel:\n";
    for (const ModelOutcome& o : bundle.outcomes) {
        if (!o.ok)
            continue;
        out << "- " << model_name(o.kind) << ": S ranges over ["
            << fmt_short(min_value(o.steady.S)) << ", " << fmt_short(max_value(o.steady.S))
            << "], R0 = " << fmt_short(o.r0) << "\n";
    }
    out << "\nInfected panel:\n";
    for (const ModelOutcome& o : bundle.outcomes) {
        if (!o.ok)
            continue;
        double frac = support_fraction(o.steady.I);
        int comps = support_components(o.steady.I);
        out << "- " << model_name(o.kind) << ": max I = " << fmt_short(max_value(o.steady.I))
            << ", mass " << fmt_short(integrate(bundle.grid, o.steady.I)) << ", "
            << (o.steady.branch == SteadyBranch::DiseaseFree
                    ? std::string("disease-free branch")
                    : "support on " + fmt_short(100.0 * frac) + "% of the domain in " +
                          std::to_string(comps) + (comps == 1 ? " component" : " components"))
            << "\n";
    }
    bool any_failed = false;
    for (const ModelOutcome& o : bundle.outcomes)
        any_failed = any_failed || !o.ok;
    if (any_failed) {
        out << "\nFailures:\n";
        for (const ModelOutcome& o : bundle.outcomes)
            if (!o.ok)
                out << "- " << model_name(o.kind) << ": " << o.error << "\n";
    }
    return out.str();
}

} // namespace

std::string model_color(ModelKind kind) {
    switch (kind) {
    case ModelKind::MO: return "#d62728";
    case ModelKind::MW: return "#1f77b4";
    case ModelKind::SO: return "#2ca02c";
    case ModelKind::SW: return "#ff7f0e";
    }
    throw ValidationError("model_color: unknown model kind");
}

FigureBundle run_scenario(const ScenarioConfig& config) {
    validate_scenario(config);
    FigureBundle bundle;
    bundle.config = config;
    bundle.grid = build_grid(config.n_cells, config.length);
    CoefficientSet coeffs = build_coefficients(config, bundle.grid);
    validate_coeffs(coeffs, bundle.grid);

    fs::create_directories(config.out_dir);

    std::vector<std::future<ModelOutcome>> pipelines;
    pipelines.reserve(config.models.size());
    for (ModelKind kind : config.models)
        pipelines.push_back(std::async(std::launch::async, run_model, std::cref(config),
                                       std::cref(coeffs), std::cref(bundle.grid), kind));
    for (auto& f : pipelines)
        bundle.outcomes.push_back(f.get());

    bundle.all_ok = true;
    int n_ok = 0;
    for (ModelOutcome& o : bundle.outcomes) {
        bundle.all_ok = bundle.all_ok && o.ok;
        if (!o.ok)
            continue;
        ++n_ok;
        fs::path p = fs::path(config.out_dir) / ("profile_" + model_name(o.kind) + ".csv");
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw ValidationError("cannot open \"" + p.string() + "\" for writing");
        csvio::write_columns(out, {"x", "S", "I"},
                             {bundle.grid->nodes, o.steady.S.values, o.steady.I.values});
        o.profile_csv = p.string();
    }

    bundle.summary_csv = (fs::path(config.out_dir) / "summary.csv").string();
    write_text_file(bundle.summary_csv, summary_text(bundle));

    if (n_ok > 0) {
        bundle.svg_s = (fs::path(config.out_dir) / "profiles_S.svg").string();
        bundle.svg_i = (fs::path(config.out_dir) / "profiles_I.svg").string();
        write_text_file(bundle.svg_s, panel_svg(bundle, false));
        write_text_file(bundle.svg_i, panel_svg(bundle, true));
    }

    bundle.readme = (fs::path(config.out_dir) / "README.md").string();
    write_text_file(bundle.readme, readme_text(bundle));
    return bundle;
}

std::string r0_report_csv(const ScenarioConfig& config, const std::vector<double>& d_I_values) {
    validate_scenario(config);
    if (d_I_values.empty())
        throw ValidationError("r0 report: no d_I values requested");
    for (double di : d_I_values)
        if (!(di > 0.0) || !std::isfinite(di))
            throw ValidationError("r0 report: d_I values must be positive and finite");
    GridPtr grid = build_grid(config.n_cells, config.length);
    CoefficientSet coeffs = build_coefficients(config, grid);
    validate_coeffs(coeffs, grid);

    std::ostringstream out;
    out << "model,d_S,d_I,R0,lambda_star,R0_dI_to_0,R0_dI_to_inf\n";
    for (ModelKind kind : config.models) {
        R0Limits lim = r0_limits(kind, config.d_S, coeffs, grid);
        for (double di : d_I_values) {
            double r0 = compute_r0(kind, di, config.d_S, coeffs, grid).value;
            double lam = lambda_star(kind, di, config.d_S, coeffs, grid).eigenvalue;
            out << model_name(kind) << ',' << csvio::format_full(config.d_S) << ','
                << csvio::format_full(di) << ',' << csvio::format_full(r0) << ','
                << csvio::format_full(lam) << ',' << csvio::format_full(lim.low) << ','
                << csvio::format_full(lim.high) << '\n';
        }
    }
    return out.str();
}

} // namespace sislab
