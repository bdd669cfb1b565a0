#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sislab/coeffs.hpp"
#include "sislab/grid.hpp"
#include "sislab/kinetics.hpp"

namespace sislab {

/// Nodal (S, I) profiles at time t.  Both fields must stay nonnegative; the
/// stepper rejects any step that would break that.
struct State {
    Field S;
    Field I;
    double t = 0.0;
};

/// Grid binding, finiteness, nonnegativity of S and I, and t >= 0.
void validate_state(const State& state, const GridPtr& grid);

enum class Scheme { ImexEuler, ImexTrapezoid };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme scheme);

/// Which Lyapunov functional (if any) run() records per trace sample.
enum class LyapunovKind { None, V, W };

struct StepperConfig {
    double dt_initial = 1e-3;
    double dt_min = 1e-10;
    Scheme scheme = Scheme::ImexTrapezoid;
    bool positivity_retry = true;
    double steady_tol = 1e-10; // L-infinity rate threshold for steady detection
    double t_max = 1e4;
    int trace_stride = 100;    // record every trace_stride-th accepted step
    LyapunovKind lyapunov = LyapunovKind::None;
};

void validate_config(const StepperConfig& config);

struct TraceSample {
    double t = 0.0;
    double total_S = 0.0;
    double total_I = 0.0;
    double min_I = 0.0;
    double max_S = 0.0;
    std::optional<double> lyapunov;
};

struct DiagnosticsTrace {
    std::vector<TraceSample> samples;
};

enum class RunVerdict { Steady, TMaxReached };

struct RunResult {
    State state;
    DiagnosticsTrace trace;
    RunVerdict verdict = RunVerdict::TMaxReached;
    long long steps = 0;
    // ||dS/dt|| + ||dI/dt|| (sup norms) of the last accepted step
    double final_rate = std::numeric_limits<double>::infinity();
};

/// One IMEX step of size config.dt_initial: diffusion implicit (tridiagonal
/// solve), reaction explicit (ImexEuler) or with a trapezoidal predictor-
/// corrector reaction average (ImexTrapezoid).  A step that would drive any
/// nodal value negative is retried at half the step size (when
/// positivity_retry) down to dt_min, then rejected with a SolverError naming
/// the offending node and component.  The returned t is old t + accepted dt.
State step(const State& state, ModelKind kind, const CoefficientSet& coeffs, double d_S,
           double d_I, const StepperConfig& config);

/// Steps from `initial` until the L-infinity rate falls to steady_tol
/// (verdict Steady) or t reaches t_max (verdict TMaxReached), halving dt on
/// positivity rejections and regrowing it back toward dt_initial.  Trace
/// samples are recorded at the initial state, every trace_stride-th step, and
/// the final state.
RunResult run(const State& initial, ModelKind kind, const CoefficientSet& coeffs, double d_S,
              double d_I, const StepperConfig& config);

/// V = 1/2 ∫[(S−Λ)+I]² + ((μ+1)/β) ∫I for homogeneous coefficients; along
/// equal-diffusivity trajectories with R0 <= 1 this is non-increasing.
double lyapunov_v(const State& state, const CoefficientSet& coeffs, const GridPtr& grid);

/// W = 1/2 ∫[(S−Ŝ)+(I−Î)]² + ((μ+1)/β) ∫(I − Î − Î ln(I/Î)) around the
/// endemic state Ŝ = (γ+μ)/β, Î = (Λ−Ŝ)/μ of the homogeneous birth-death
/// model; requires R0 > 1 and strictly positive nodal I.  Nonnegative, and
/// non-increasing along equal-diffusivity trajectories.
double lyapunov_w(const State& state, const CoefficientSet& coeffs, const GridPtr& grid);

/// Checks a trace against the model's total-mass evolution law.
///   birth-death mass action: d/dt ∫(S+I) <= ∫Λ − θ∫(S+I), θ = min{1, μ_*},
///     plus the absorbing bound total <= max(initial total, ∫Λ/θ);
///   conserved models: total constant to 1e-8 relative;
///   standard incidence with recruitment: d/dt ∫(S+I) <= ∫Λ − ∫S.
/// Interval k covers samples (k, k+1); the slack grows with the sampling gap
/// so scheme error is never flagged as a model violation.
struct DissipationReport {
    double theta = 0.0;
    double recruitment_total = 0.0;
    double absorbing_bound = std::numeric_limits<double>::infinity();
    std::vector<int> flagged_intervals;
    bool absorbing_ok = true;
    bool ok = true;
};

DissipationReport dissipation_check(const DiagnosticsTrace& trace, const CoefficientSet& coeffs,
                                    ModelKind kind);

} // namespace sislab
