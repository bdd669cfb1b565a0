#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sislab/config.hpp"
#include "sislab/csv.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/errors.hpp"
#include "sislab/scenario.hpp"
#include "sislab/spectral.hpp"
#include "sislab/steady.hpp"

namespace fs = std::filesystem;
using namespace sislab;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    int grid_n = 0;
    std::string models;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "scenario config file (key = value sections)");
    sub->add_option("--out", flags.out_dir, "output directory (overrides the config)");
    sub->add_option("--grid", flags.grid_n, "number of grid cells (overrides the config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--model", flags.models,
                    "comma-separated model selection: any of MO,MW,SO,SW");
}

std::vector<ModelKind> parse_model_list(const std::string& list);

void apply_overrides(ScenarioConfig& c, const CommonFlags& flags) {
    if (!flags.models.empty())
        c.models = parse_model_list(flags.models);
    if (flags.grid_n > 0)
        c.n_cells = flags.grid_n;
    if (!flags.out_dir.empty())
        c.out_dir = flags.out_dir;
}

ScenarioConfig effective_config(const CommonFlags& flags) {
    ScenarioConfig c =
        flags.config_path.empty() ? ScenarioConfig{} : load_config_file(flags.config_path);
    apply_overrides(c, flags);
    return c;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot open \"" + path + "\" for writing");
    out << text;
}

std::vector<ModelKind> parse_model_list(const std::string& list) {
    std::vector<ModelKind> models;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = list.find(',', start);
        std::string token = list.substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
        std::size_t a = token.find_first_not_of(" \t");
        std::size_t b = token.find_last_not_of(" \t");
        if (a != std::string::npos)
            models.push_back(parse_model(token.substr(a, b - a + 1)));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    if (models.empty())
        throw ValidationError("--model selects no models");
    return models;
}

int cmd_r0(const ScenarioConfig& cfg, const std::vector<double>& ladder,
           const std::string& file_name) {
    std::string csv = r0_report_csv(cfg, ladder);
    fs::create_directories(cfg.out_dir);
    write_file((fs::path(cfg.out_dir) / file_name).string(), csv);
    std::cout << csv;
    return 0;
}

int cmd_simulate(const ScenarioConfig& cfg) {
    validate_scenario(cfg);
    GridPtr grid = build_grid(cfg.n_cells, cfg.length);
    CoefficientSet coeffs = build_coefficients(cfg, grid);
    fs::create_directories(cfg.out_dir);
    for (ModelKind kind : cfg.models) {
        State seed = default_initial_state(kind, coeffs, grid, cfg.d_S);
        StepperConfig sc;
        sc.dt_initial = cfg.dt_initial;
        sc.steady_tol = cfg.steady_tol;
        sc.t_max = cfg.t_max;
        RunResult rr = run(seed, kind, coeffs, cfg.d_S, cfg.d_I, sc);
        fs::path p = fs::path(cfg.out_dir) / ("profile_" + model_name(kind) + ".csv");
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw ValidationError("cannot open \"" + p.string() + "\" for writing");
        csvio::write_columns(out, {"x", "S", "I"},
                             {grid->nodes, rr.state.S.values, rr.state.I.values});
        std::cout << model_name(kind) << ": "
                  << (rr.verdict == RunVerdict::Steady ? "steady" : "t_max reached") << " at t = "
                  << csvio::format_full(rr.state.t) << " after " << rr.steps
                  << " steps, rate " << csvio::format_full(rr.final_rate) << ", wrote "
                  << p.string() << "\n";
    }
    return 0;
}

int cmd_steady(const ScenarioConfig& cfg) {
    FigureBundle bundle = run_scenario(cfg);
    for (const ModelOutcome& o : bundle.outcomes) {
        if (o.ok)
            std::cout << model_name(o.kind) << ": R0 = " << csvio::format_full(o.r0)
                      << ", residual " << csvio::format_full(o.steady.residual_inf) << " in "
                      << o.steady.newton_iterations << " Newton iterations ("
                      << (o.steady.branch == SteadyBranch::Endemic ? "endemic" : "disease-free")
                      << "), wrote " << o.profile_csv << "\n";
        else
            std::cerr << model_name(o.kind) << ": FAILED — " << o.error << "\n";
    }
    std::cout << "bundle: " << bundle.summary_csv;
    if (!bundle.svg_s.empty())
        std::cout << ", " << bundle.svg_s << ", " << bundle.svg_i;
    std::cout << ", " << bundle.readme << "\n";
    return bundle.all_ok ? 0 : 3;
}

int cmd_sweep(const ScenarioConfig& cfg) {
    validate_scenario(cfg);
    if (cfg.sweep_target.empty())
        throw ValidationError("sweep needs sweep_target (and a schedule) in the config");
    SweepTarget target;
    double other = 0.0;
    if (cfg.sweep_target == "d_S_to_zero") {
        target = SweepTarget::DSToZero;
        other = cfg.d_I;
    } else if (cfg.sweep_target == "d_I_to_zero") {
        target = SweepTarget::DIToZero;
        other = cfg.d_S;
    } else {
        target = SweepTarget::Both;
        other = cfg.ratio;
    }
    GridPtr grid = build_grid(cfg.n_cells, cfg.length);
    CoefficientSet coeffs = build_coefficients(cfg, grid);
    fs::create_directories(cfg.out_dir);
    bool any_failed = false;
    for (ModelKind kind : cfg.models) {
        SweepResult sr = sweep(kind, target, coeffs, grid, cfg.schedule, other, cfg.newton_tol);
        std::string csv = "diffusivity,min_S,max_S,min_I,max_I,int_I,support_frac\n";
        for (const SweepEntry& e : sr.entries) {
            csv += csvio::format_full(e.diffusivity) + "," +
                   csvio::format_full(min_value(e.result.S)) + "," +
                   csvio::format_full(max_value(e.result.S)) + "," +
                   csvio::format_full(min_value(e.result.I)) + "," +
                   csvio::format_full(max_value(e.result.I)) + "," +
                   csvio::format_full(integrate(grid, e.result.I)) + "," +
                   csvio::format_full(support_fraction(e.result.I)) + "\n";
        }
        fs::path p = fs::path(cfg.out_dir) / ("sweep_" + model_name(kind) + ".csv");
        write_file(p.string(), csv);
        std::cout << model_name(kind) << ": " << sr.entries.size() << "/" << cfg.schedule.size()
                  << " entries (" << sweep_target_name(target) << "), wrote " << p.string()
                  << "\n";
        if (sr.failure) {
            std::cerr << model_name(kind) << ": stopped early — " << *sr.failure << "\n";
            any_failed = true;
        }
    }
    return any_failed ? 3 : 0;
}

int cmd_limit(const ScenarioConfig& cfg) {
    validate_scenario(cfg);
    GridPtr grid = build_grid(cfg.n_cells, cfg.length);
    CoefficientSet coeffs = build_coefficients(cfg, grid);
    fs::create_directories(cfg.out_dir);
    for (ModelKind kind : cfg.models) {
        LimitProfile lp;
        if (kind == ModelKind::MW) {
            Field init_I = default_initial_state(kind, coeffs, grid, cfg.d_S).I;
            lp = mw_limit_ds0(cfg.d_I, coeffs, grid, init_I, cfg.newton_tol);
        } else if (kind == ModelKind::MO) {
            lp = mo_limit_wu_zou(cfg.ratio, coeffs, grid, require_total_mass(coeffs, "limit"));
        } else if (kind == ModelKind::SO) {
            lp = so_limit_peng(cfg.ratio, coeffs, grid, require_total_mass(coeffs, "limit"));
        } else {
            throw ValidationError(
                "limit: SW has no implemented limiting-profile operation; select MO, MW, or SO "
                "with --model");
        }
        fs::path p = fs::path(cfg.out_dir) / ("limit_" + model_name(kind) + ".csv");
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw ValidationError("cannot open \"" + p.string() + "\" for writing");
        csvio::write_columns(out, {"x", "S", "I"},
                             {grid->nodes, lp.S_limit.values, lp.I_limit.values});
        std::cout << model_name(kind) << ": " << lp.provenance;
        if (lp.I_total)
            std::cout << " (total infected mass " << csvio::format_full(*lp.I_total) << ")";
        std::cout << ", wrote " << p.string() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sislab: steady states, spectra, and singular limits of four spatial SIS models"};
    app.require_subcommand(1);

    CommonFlags flags;
    CLI::App* sub_r0 = app.add_subcommand("r0", "reproduction number and principal eigenvalue");
    CLI::App* sub_report =
        app.add_subcommand("report", "R0 table over a seven-point d_I ladder 1e-3..1e3");
    CLI::App* sub_sim = app.add_subcommand("simulate", "time-integrate to a near-steady state");
    CLI::App* sub_steady =
        app.add_subcommand("steady", "Newton steady states with profiles, summary, and plots");
    CLI::App* sub_sweep =
        app.add_subcommand("sweep", "steady-state continuation along a diffusivity schedule");
    CLI::App* sub_limit = app.add_subcommand("limit", "closed-form/reduced limiting profiles");
    CLI::App* sub_repro =
        app.add_subcommand("reproduce", "rebuild one of the pinned study figures");
    std::string figure_tag;
    sub_repro->add_option("tag", figure_tag, "fig1, fig2, fig3, or fig4")->required();
    for (CLI::App* sub : {sub_r0, sub_report, sub_sim, sub_steady, sub_sweep, sub_limit, sub_repro})
        add_common(sub, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sub_repro->parsed()) {
            ScenarioConfig cfg = figure_config(figure_tag);
            if (!flags.config_path.empty())
                throw ValidationError("reproduce uses the pinned figure config; --config is not "
                                      "accepted here");
            apply_overrides(cfg, flags);
            return cmd_steady(cfg);
        }
        ScenarioConfig cfg = effective_config(flags);
        if (sub_r0->parsed())
            return cmd_r0(cfg, {cfg.d_I}, "r0.csv");
        if (sub_report->parsed())
            return cmd_r0(cfg, {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}, "r0_report.csv");
        if (sub_sim->parsed())
            return cmd_simulate(cfg);
        if (sub_steady->parsed())
            return cmd_steady(cfg);
        if (sub_sweep->parsed())
            return cmd_sweep(cfg);
        if (sub_limit->parsed())
            return cmd_limit(cfg);
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
}
