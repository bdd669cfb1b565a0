#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sislab/grid.hpp"

namespace sislab {

/// Spatial data shared by all four models: recruitment Λ, transmission β,
/// recovery γ, disease-induced death μ, all sampled on one grid, plus the
/// conserved total mass N that only the conserved-mass models read.
struct CoefficientSet {
    Field lambda;
    Field beta;
    Field gamma;
    Field mu;
    std::optional<double> total_mass;
};

/// Node-index partition by the sign of β − γ.
struct RiskClassification {
    std::vector<int> low_risk;  // β < γ − tol
    std::vector<int> high_risk; // β > γ + tol
    std::vector<int> moderate;  // |β − γ| ≤ tol
};

/// β = 1.5 + sin 2πx, γ = 1.2 + cos 2πx, Λ ≡ 3, μ = 0.5 + x; N defaults to 1.
CoefficientSet preset_fig0a(const GridPtr& grid, std::optional<double> total_mass = 1.0);

/// Piecewise-linear pair with a shared plateau: β = 1 on [0, 0.75] then
/// 2x − 0.5; γ = 1.5 − 2x on [0, 0.25] then 1; Λ ≡ 3, μ = 0.5 + x; N = 1.
/// Requires n_cells divisible by 4 so the breakpoints 0.25 and 0.75 are nodes.
CoefficientSet preset_moderate(const GridPtr& grid, std::optional<double> total_mass = 1.0);

/// Constant fields; all four constants must be strictly positive.
CoefficientSet preset_homogeneous(const GridPtr& grid, double lambda, double beta, double gamma,
                                  double mu, std::optional<double> total_mass = std::nullopt);

/// Coefficients from closed-form expression strings in x, evaluated nodally.
CoefficientSet coeffs_from_expressions(const GridPtr& grid, const std::string& lambda,
                                       const std::string& beta, const std::string& gamma,
                                       const std::string& mu,
                                       std::optional<double> total_mass = std::nullopt);

/// Checks grid binding, strict positivity of all four fields, and positivity
/// of total_mass when present.  Throws ValidationError.
void validate_coeffs(const CoefficientSet& coeffs, const GridPtr& grid);

/// The conserved mass N, or ValidationError naming the caller if absent.
double require_total_mass(const CoefficientSet& coeffs, const std::string& who);

/// True when all four fields are constant to relative tolerance rtol.
bool is_homogeneous(const CoefficientSet& coeffs, double rtol = 1e-13);

/// Partitions nodes by sign of β − γ with a dead band of width tolerance.
RiskClassification classify_risk(const CoefficientSet& coeffs, double tolerance = 1e-9);

/// CSV with header `x,lambda,beta,gamma,mu`, one row per node; the x column
/// must match the grid nodes to 1e-12.
CoefficientSet load_coeffs_csv(const GridPtr& grid, std::istream& in,
                               std::optional<double> total_mass = std::nullopt);
CoefficientSet load_coeffs_csv_file(const GridPtr& grid, const std::string& path,
                                    std::optional<double> total_mass = std::nullopt);
void save_coeffs_csv(std::ostream& out, const CoefficientSet& coeffs);

} // namespace sislab
