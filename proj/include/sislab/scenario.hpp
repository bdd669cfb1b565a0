#pragma once

#include <string>
#include <vector>

#include "sislab/config.hpp"
#include "sislab/steady.hpp"

namespace sislab {

/// Outcome of one model's pipeline inside a scenario: documented initial
/// state, time integration to near-steady, Newton refinement, reproduction
/// number.  When ok is false `error` holds the failure text and the numeric
/// members are meaningless.
struct ModelOutcome {
    ModelKind kind = ModelKind::MW;
    bool ok = false;
    std::string error;
    SteadyResult steady;
    double r0 = 0.0;
    std::string profile_csv; // path of the emitted x,S,I profile
};

/// What run_scenario wrote: per-model profile CSVs, a summary table, one SVG
/// per field overlaying the models, and a README describing the bundle.
struct FigureBundle {
    ScenarioConfig config;
    GridPtr grid;
    std::vector<ModelOutcome> outcomes; // in config.models order
    std::string summary_csv;
    std::string svg_s, svg_i; // empty when no model succeeded
    std::string readme;
    bool all_ok = false;
};

/// Runs every selected model concurrently (one pipeline per model, results
/// assembled in list order, each file written once by the coordinating
/// thread) and emits the bundle into config.out_dir.  A model failure is
/// captured in its outcome — the bundle is still produced from the models
/// that succeeded.  Output is deterministic: rerunning an identical config
/// yields byte-identical files.
FigureBundle run_scenario(const ScenarioConfig& config);

/// CSV text with header model,d_S,d_I,R0,lambda_star,R0_dI_to_0,R0_dI_to_inf
/// and one row per (model, d_I) pair at the config's d_S: the reproduction
/// number, the principal eigenvalue carrying the same threshold (opposite
/// sign convention), and the closed-form small/large-d_I limits of R0.
std::string r0_report_csv(const ScenarioConfig& config, const std::vector<double>& d_I_values);

/// Fixed per-model stroke color used by every emitted SVG.
std::string model_color(ModelKind kind);

} // namespace sislab
