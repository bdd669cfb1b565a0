#include "sislab/kinetics.hpp"

#include <cmath>

#include "sislab/errors.hpp"

namespace sislab {

bool conserves_mass(ModelKind kind) { return kind == ModelKind::MO || kind == ModelKind::SO; }

bool has_demography(ModelKind kind) { return kind == ModelKind::MW || kind == ModelKind::SW; }

std::string model_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::MO: return "MO";
    case ModelKind::MW: return "MW";
    case ModelKind::SO: return "SO";
    case ModelKind::SW: return "SW";
    }
    throw ValidationError("unknown model kind");
}

ModelKind parse_model(const std::string& name) {
    if (name == "MO" || name == "mo") return ModelKind::MO;
    if (name == "MW" || name == "mw") return ModelKind::MW;
    if (name == "SO" || name == "so") return ModelKind::SO;
    if (name == "SW" || name == "sw") return ModelKind::SW;
    throw ValidationError("unknown model '" + name + "' (expected one of MO, MW, SO, SW)");
}

NodeCoeffs coeffs_at(const CoefficientSet& coeffs, int node) {
    return {coeffs.lambda[node], coeffs.beta[node], coeffs.gamma[node], coeffs.mu[node]};
}

namespace {

bool standard_incidence(ModelKind kind) { return kind == ModelKind::SO || kind == ModelKind::SW; }

void check_state(double beta, double S, double I) {
    if (!(beta > 0.0))
        throw ValidationError("incidence: beta must be positive, got " + std::to_string(beta));
    if (!(S >= 0.0) || !(I >= 0.0))
        throw ValidationError("incidence: negative (or non-finite) state S = " +
                              std::to_string(S) + ", I = " + std::to_string(I));
}

} // namespace

double incidence(ModelKind kind, double beta, double S, double I) {
    check_state(beta, S, I);
    if (standard_incidence(kind)) {
        double T = S + I;
        return T == 0.0 ? 0.0 : beta * S * I / T;
    }
    return beta * S * I;
}

ReactionValue reaction(ModelKind kind, const NodeCoeffs& c, double S, double I) {
    // net transfer S -> I; sharing this value between the two components is
    // what makes f_S + f_I cancel bitwise for the conserved-mass models
    double net = incidence(kind, c.beta, S, I) - c.gamma * I;
    switch (kind) {
    case ModelKind::MO:
    case ModelKind::SO: return {-net, net};
    case ModelKind::MW: return {c.lambda - S - net, net - c.mu * I};
    case ModelKind::SW: return {c.lambda - S - net, net};
    }
    throw ValidationError("unknown model kind");
}

ReactionJacobian reaction_jacobian(ModelKind kind, const NodeCoeffs& c, double S, double I) {
    check_state(c.beta, S, I);
    double gS, gI; // partials of the incidence term
    if (standard_incidence(kind)) {
        double T = S + I;
        if (T == 0.0) {
            gS = gI = 0.0;
        } else {
            gS = c.beta * I * I / (T * T);
            gI = c.beta * S * S / (T * T);
        }
    } else {
        gS = c.beta * I;
        gI = c.beta * S;
    }
    ReactionJacobian j;
    j.dfI_dS = gS;
    switch (kind) {
    case ModelKind::MO:
    case ModelKind::SO:
        j.dfS_dS = -gS;
        j.dfS_dI = -gI + c.gamma;
        j.dfI_dI = gI - c.gamma;
        return j;
    case ModelKind::MW:
        j.dfS_dS = -1.0 - gS;
        j.dfS_dI = -gI + c.gamma;
        j.dfI_dI = gI - c.gamma - c.mu;
        return j;
    case ModelKind::SW:
        j.dfS_dS = -1.0 - gS;
        j.dfS_dI = -gI + c.gamma;
        j.dfI_dI = gI - c.gamma;
        return j;
    }
    throw ValidationError("unknown model kind");
}

} // namespace sislab
