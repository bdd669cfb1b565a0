#pragma once

#include <string>

#include "sislab/coeffs.hpp"

namespace sislab {

/// The four reaction–diffusion SIS variants:
///   MO — mass-action incidence βSI, no demography (total mass conserved)
///   MW — mass-action incidence with recruitment Λ − S and disease death μI
///   SO — standard incidence βSI/(S+I), no demography (mass conserved)
///   SW — standard incidence with recruitment Λ − S (no disease death term)
enum class ModelKind { MO, MW, SO, SW };

/// True for the models whose reactions satisfy f_S + f_I = 0 pointwise.
bool conserves_mass(ModelKind kind);

/// True for the models with the recruitment term Λ − S in f_S.
bool has_demography(ModelKind kind);

std::string model_name(ModelKind kind);
ModelKind parse_model(const std::string& name);

/// The four coefficients at one node.
struct NodeCoeffs {
    double lambda = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double mu = 0.0;
};

NodeCoeffs coeffs_at(const CoefficientSet& coeffs, int node);

struct ReactionValue {
    double f_S = 0.0;
    double f_I = 0.0;
};

/// Row-major 2x2 Jacobian of (f_S, f_I) with respect to (S, I).
struct ReactionJacobian {
    double dfS_dS = 0.0, dfS_dI = 0.0;
    double dfI_dS = 0.0, dfI_dI = 0.0;
};

/// New-infection rate: βSI for mass action, βSI/(S+I) for standard incidence
/// (continuously extended to 0 at S = I = 0).  Requires S, I ≥ 0 and β > 0.
double incidence(ModelKind kind, double beta, double S, double I);

/// Model right-hand side at one node, diffusion excluded.  For MO and SO the
/// returned pair satisfies f_S + f_I == 0 bitwise: both components share the
/// same net-transfer value, so the conserved-mass models conserve exactly.
ReactionValue reaction(ModelKind kind, const NodeCoeffs& c, double S, double I);

/// Analytic partials of reaction.  At S = I = 0 the standard-incidence part
/// uses the zero-matrix extension.
ReactionJacobian reaction_jacobian(ModelKind kind, const NodeCoeffs& c, double S, double I);

} // namespace sislab
