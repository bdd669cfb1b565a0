#pragma once

#include <optional>
#include <utility>

#include "sislab/coeffs.hpp"
#include "sislab/grid.hpp"
#include "sislab/kinetics.hpp"

namespace sislab {

/// Principal (smallest) eigenpair of -d_I L - diag(potential).
/// The eigenfunction is max-normalized and nonnegative, strictly positive
/// wherever the mode has not underflowed (at extreme diffusivity contrast the
/// far tails of a localized mode fall below the smallest double and flush to
/// zero; no double can represent them).  residual is the max-norm defect of
/// the eigenequation; it is bounded by tolerances relative to the operator
/// scale d_I‖L‖ + ‖potential‖.
struct EigenResult {
    double eigenvalue = 0.0;
    Field eigenfunction;
    double residual = 0.0;
    int iterations = 0;
};

/// Disease-free susceptible profile: solves (-d_S L + Id) S = Λ.
/// Strictly positive; integrate(Λ - S) = 0 to rounding because the weighted
/// column sums of L vanish.
Field solve_dfe(double d_S, const CoefficientSet& coeffs, const GridPtr& grid);

EigenResult principal_eigenpair(double d_I, const Field& potential, const GridPtr& grid);

/// Numerator weight b and denominator weight c of the variational quotient
///   R0 = max_phi  ∫ b phi^2 / (d_I ∫ phi'^2 + ∫ c phi^2),
/// per model: MW b = β·S̃(d_S), c = γ+μ; MO b = β·N/|Ω|, c = γ;
/// SO/SW b = β, c = γ.  Only MW reads d_S (through S̃); MO needs total_mass.
struct R0Potentials {
    Field b;
    Field c;
};
R0Potentials r0_potentials(ModelKind kind, double d_S, const CoefficientSet& coeffs,
                           const GridPtr& grid);

struct R0Result {
    double value = 0.0;
    Field maximizer; // optimal phi, max-normalized, positive
    ModelKind model = ModelKind::MW;
    double d_I = 0.0;
    std::optional<double> d_S; // set only for MW, whose R0 depends on it
    int iterations = 0;
};

/// Largest generalized eigenvalue of the discrete quotient above, computed
/// from the equivalent symmetric tridiagonal pencil.
R0Result compute_r0(ModelKind kind, double d_I, double d_S, const CoefficientSet& coeffs,
                    const GridPtr& grid);

/// The quotient itself at a trial profile; compute_r0's value equals this at
/// the returned maximizer (independent summation path, used for validation).
double r0_quotient(const R0Potentials& pots, double d_I, const Field& phi, const GridPtr& grid);

/// Principal eigenvalue with potential b - c; its sign is opposite to
/// sign(R0 - 1) — the two carry the same threshold information.
EigenResult lambda_star(ModelKind kind, double d_I, double d_S, const CoefficientSet& coeffs,
                        const GridPtr& grid);

/// Closed-form limits of the monotone map d_I -> R0:
/// low = lim_{d_I -> 0} = max_i b_i/c_i, high = lim_{d_I -> inf} = ∫b / ∫c.
struct R0Limits {
    double low = 0.0;
    double high = 0.0;
};
R0Limits r0_limits(ModelKind kind, double d_S, const CoefficientSet& coeffs, const GridPtr& grid);

/// The diffusivity d_I* where R0 crosses 1, by bisection in log d_I to
/// |R0 - 1| <= 1e-8.  Requires b - c to change sign and ∫b < ∫c; otherwise
/// throws ValidationError naming the failed condition (R0 stays on one side
/// of 1 for every d_I).  The bracket is expanded by factors of 10 within
/// [1e-8, 1e8] if it does not straddle the crossing.
double find_threshold_di(ModelKind kind, double d_S, const CoefficientSet& coeffs,
                         const GridPtr& grid, std::pair<double, double> bracket);

} // namespace sislab
