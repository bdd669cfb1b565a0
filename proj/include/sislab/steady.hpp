#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sislab/coeffs.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/grid.hpp"
#include "sislab/kinetics.hpp"

namespace sislab {

/// Which fixed point a converged elliptic solve landed on.  A solve that
/// drives the infected profile below 1e-8 of the susceptible scale found the
/// disease-free state; that is a legitimate answer, not a failure.
enum class SteadyBranch { Endemic, DiseaseFree };

struct SteadyResult {
    Field S;
    Field I;
    double residual_inf = 0.0;
    int newton_iterations = 0;
    std::optional<double> constrained_mass; // N, set for the conserved-mass kinds
    SteadyBranch branch = SteadyBranch::Endemic;
};

/// Damped Newton for the coupled elliptic system
///   d_S L S + f_S(S, I) = 0,   d_I L I + f_I(S, I) = 0,
/// from a strictly positive initial state, with fraction-to-boundary damping
/// (iterates never leave the open positive cone) and a backtracking line
/// search on the sup-norm residual.  For the conserved-mass kinds the
/// discrete system is rank-deficient by one (the weighted sum of all
/// equations vanishes), so the Newton matrix is bordered with the constraint
/// ∫(S+I) = coeffs.total_mass and a compensating multiplier column; returned
/// results then satisfy the constraint to 1e-10 relative.  residual_inf is
/// the accepted sup-norm defect (≤ tol); note the evaluation noise floor is
/// about eps·(1 + 2·max(d_S,d_I)/h²)·‖(S,I)‖∞, so tol must sit above it.
SteadyResult newton_steady(ModelKind kind, double d_S, double d_I, const CoefficientSet& coeffs,
                           const GridPtr& grid, const State& init, double tol);

/// Which diffusivity the schedule shrinks.  Both shrinks d_I and d_S
/// together at fixed ratio d = d_I/d_S.
enum class SweepTarget { DSToZero, DIToZero, Both };

std::string sweep_target_name(SweepTarget target);

struct SweepEntry {
    double diffusivity = 0.0; // the schedule value: d_S, d_I, or d_I when both shrink
    SteadyResult result;
};

struct SweepResult {
    ModelKind kind = ModelKind::MW;
    SweepTarget target = SweepTarget::DSToZero;
    /// Fixed companion diffusivity (DSToZero: d_I, DIToZero: d_S), or the
    /// ratio d = d_I/d_S when both shrink.
    double other = 0.0;
    std::vector<SweepEntry> entries; // diffusivity strictly decreasing
    /// Set when the sweep stopped early; entries then hold the completed
    /// prefix.  Reasons: a solver failure, or an under-resolved profile
    /// (steepest front spanning fewer than 6 cells — rerun with more cells).
    std::optional<std::string> failure;
};

/// Continuation toward a singular diffusion limit: the first solve
/// warm-starts from a converged dynamics run at the schedule head, every
/// later solve from the previous entry.  Entries whose S or I profile
/// resolves its steepest gradient over fewer than 6 cells are refused (the
/// failure message suggests a larger n_cells); any entry failure stops the
/// sweep and returns the completed prefix with `failure` set.
SweepResult sweep(ModelKind kind, SweepTarget target, const CoefficientSet& coeffs,
                  const GridPtr& grid, const std::vector<double>& schedule, double other,
                  double tol);

/// A closed-form or reduced-problem limiting profile, tagged with the
/// defining formula so tests can re-evaluate it.
struct LimitProfile {
    Field S_limit;
    Field I_limit;
    /// Set when only the integral of I is pinned by a formula, not its shape.
    std::optional<double> I_total;
    std::string provenance;
};

/// Limit of the birth-death mass-action steady state as d_S → 0 at fixed
/// d_I: solves the reduced scalar problem
///   -d_I L I = β(Λ + γI)I/(1+βI) − (γ+μ)I,    S = (Λ + γI)/(1 + βI)
/// by damped Newton from init_I (nonnegative; I ≡ 0 is a fixed point and
/// returns S = Λ).  Requires the reduced linearization about I = 0 to be
/// unstable: the principal eigenvalue of -d_I L - (βΛ−γ−μ) must be negative,
/// otherwise no positive reduced solution exists and the call refuses.
LimitProfile mw_limit_ds0(double d_I, const CoefficientSet& coeffs, const GridPtr& grid,
                          const Field& init_I, double tol);

/// Limit of the conserved mass-action steady state as d_I → 0 with
/// d_I/d_S → d ∈ (0,∞).  With a = N/|Ω|, I is the unique nonnegative root of
///   {aβ − γ − ((1−d)β/|Ω|)·∫I}₊ − dβI = 0,
/// found by bisecting G(m) = ∫I(·;m) − m on [0, N] to 1e-12, and
///   S = a − ((1−d)/|Ω|)·∫I − d·I.
/// Refuses when aβ − γ < 0 at every node (no high-risk region, so the limit
/// problem has no endemic content); if max(aβ − γ) is exactly zero the unique
/// nonnegative solution I ≡ 0, S ≡ a is returned.
LimitProfile mo_limit_wu_zou(double d, const CoefficientSet& coeffs, const GridPtr& grid,
                             double N);

/// Limit of the conserved standard-incidence steady state as d_I → 0 with
/// d_I/d_S → d0 ∈ [0,∞]:
///   d0 = 0:      S ≡ N/Z, I = N(β−γ)₊/(γZ),  Z = ∫[1 + (β−γ)₊/γ]
///   d0 ∈ (0,∞):  A = d0(β−γ)₊/(d0(β−γ)+γ), Z = ∫[A + d0(1−A)],
///                S = N·d0(1−A)/Z, I = N·A/Z
///   d0 = ∞:      I ≡ 0, S = N(1−A)/Z with A = [β>γ], Z = ∫(1−A)
/// The finite-d0 forms are defined for any positive coefficients and
/// degenerate gracefully (I ≡ 0 when {β > γ} is empty); the d0 = ∞ form is
/// normalized by the measure of {β ≤ γ} and refuses when that set is empty.
LimitProfile so_limit_peng(double d0, const CoefficientSet& coeffs, const GridPtr& grid,
                           double N);

struct AprioriCheck {
    double value = 0.0; // the measured side
    double bound = 0.0; // the admissible bound, slack included
    bool ok = false;
};

/// Maximum-principle and integral-identity audit of a birth-death
/// mass-action steady state:
///   max_s:     max S ≤ max{sup Λ, sup γ/β} + ε
///   min_s:     min S ≥ min{inf Λ, inf γ/β} − ε
///   mass:      |∫S + ∫μI − ∫Λ| ≤ 1e-8 · max(1, ∫Λ)
///   incidence: β_* ∫SI ≤ (γ* + μ*) ∫I + ε
/// where ε = 1e-6 · max(1, bound scale) absorbs discretization slack.
struct AprioriReport {
    AprioriCheck max_s;
    AprioriCheck min_s;
    AprioriCheck mass;
    AprioriCheck incidence;
    bool ok = false;
};

AprioriReport audit_apriori(const SteadyResult& result, ModelKind kind,
                            const CoefficientSet& coeffs);

/// Diagnostics for a d_I → 0 sweep of the birth-death mass-action model on a
/// 1-D grid: min S across entries against the maximum-principle floor, the
/// Cauchy trend of ∫I (the computable proxy for convergence of the total
/// infected mass to a positive constant), and the concentration of I.
/// Refuses unless the instability set {βS̃ > γ+μ} is nonempty, reporting the
/// computed min(γ+μ−βS̃).
struct Di0Report {
    double min_s = 0.0;
    double min_s_bound = 0.0; // min{inf Λ, inf γ/β}
    bool min_s_ok = false;    // min_s ≥ min_s_bound − 1e-6
    std::vector<double> int_i;        // ∫I per entry
    std::vector<double> support_frac; // measure{I > 1e-3·max I}/|Ω| per entry
    bool int_i_cauchy_ok = false;     // last two relative changes < 1% and final ∫I > 0
    bool support_monotone_ok = false; // non-increasing over the final three entries
    double flatness = 0.0;            // max S − min S at the final entry (observed only)
};

Di0Report di0_diagnostics(const SweepResult& sweep_result, const CoefficientSet& coeffs,
                          const GridPtr& grid);

/// measure{f > ratio·max f} / |Ω| by quadrature of the indicator; 0 when
/// max f ≤ 0.
double support_fraction(const Field& f, double ratio = 1e-3);

/// Number of maximal runs of consecutive nodes with f > ratio·max f.
int support_components(const Field& f, double ratio = 1e-3);

/// Documented default initial data for figure runs and sweep seeds:
/// S₀ = S̃(d_S) with bump I₀ = 0.1·(1 + cos 2πx/ℓ) for the birth-death kinds;
/// for the conserved kinds S₀ ≡ 0.9·N/|Ω| and I₀ = 0.1·(N/|Ω|)·(1+cos 2πx/ℓ)
/// so that ∫(S₀+I₀) = N.  I₀ ≥ 0 with ∫I₀ > 0.
State default_initial_state(ModelKind kind, const CoefficientSet& coeffs, const GridPtr& grid,
                            double d_S);

} // namespace sislab
