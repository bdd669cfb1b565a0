#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sislab/coeffs.hpp"
#include "sislab/grid.hpp"
#include "sislab/kinetics.hpp"

namespace sislab {

/// One experiment description: which models, which habitat, which
/// diffusivities (or sweep schedule), solver knobs, and where output goes.
/// Serialized as flat `key = value` text under [scenario], [coefficients]
/// and [solver] section headers — diffable and hand-editable.
struct ScenarioConfig {
    // [scenario]
    std::string figure = "custom"; // fig1|fig2|fig3|fig4|custom
    std::vector<ModelKind> models = {ModelKind::MO, ModelKind::MW, ModelKind::SO, ModelKind::SW};
    int n_cells = 400;
    double length = 1.0;
    std::string out_dir = "out";

    // [coefficients]
    std::string preset = "fig0a"; // fig0a|moderate|homogeneous|csv
    std::string coeffs_csv;       // read when preset == "csv"
    double hom_lambda = 3.0, hom_beta = 1.0, hom_gamma = 1.0, hom_mu = 1.0;
    double total_mass = 1.0; // conserved N, read by the MO/SO pipelines

    // [solver]
    double d_S = 1.0;
    double d_I = 1.0;
    std::string sweep_target; // ""|d_S_to_zero|d_I_to_zero|both
    std::vector<double> schedule;
    double ratio = 1.0; // d = d_I/d_S for ratio-type limits and "both" sweeps
    double newton_tol = 1e-8;
    double dt_initial = 0.03125;
    double steady_tol = 1e-8; // dynamics rate threshold for the seed run
    double t_max = 4000.0;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Strict parser: unknown sections or keys, malformed numbers, and junk lines
/// are ValidationErrors.  Keys not present keep their defaults, so
/// parse(serialize(c)) == c for every valid config.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config_file(const std::string& path);

void serialize_config(std::ostream& out, const ScenarioConfig& config);
std::string config_to_string(const ScenarioConfig& config);

/// Semantic checks beyond syntax: known figure tag and preset, nonempty
/// duplicate-free model list, grid size (divisible by 4 for the moderate
/// preset), positive diffusivities, tolerances, and total mass, strictly
/// decreasing positive schedule, and ratio >= 0 (infinity allowed — the
/// frozen-ratio limit accepts it).
void validate_scenario(const ScenarioConfig& config);

/// The four pinned study scenarios:
///   fig1: fig0a habitat, d_S = 1e-6, d_I = 1,    n_cells = 400
///   fig2: fig0a habitat, d_S = 1,    d_I = 1e-5, n_cells = 800
///   fig3: fig0a habitat, d_S = 1e-5, d_I = 1e-5, n_cells = 800
///   fig4: moderate habitat, d_S = 1, d_I = 1e-5, n_cells = 800
ScenarioConfig figure_config(const std::string& tag);

/// Resolve the configured habitat on a grid (preset lookup, homogeneous
/// constants, or CSV load), with total_mass attached.
CoefficientSet build_coefficients(const ScenarioConfig& config, const GridPtr& grid);

} // namespace sislab
