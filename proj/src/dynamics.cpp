#include "sislab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sislab/csv.hpp"
#include "sislab/errors.hpp"
#include "sislab/linalg.hpp"

namespace sislab {

void validate_state(const State& state, const GridPtr& grid) {
    require_bound(grid, state.S, "state S");
    require_bound(grid, state.I, "state I");
    if (!(state.t >= 0.0) || !std::isfinite(state.t))
        throw ValidationError("state t must be finite and nonnegative");
    for (int i = 0; i < grid->n_nodes(); ++i) {
        if (state.S[i] < 0.0)
            throw ValidationError("state S negative at node " + std::to_string(i) + " (" +
                                  csvio::format_full(state.S[i]) + ")");
        if (state.I[i] < 0.0)
            throw ValidationError("state I negative at node " + std::to_string(i) + " (" +
                                  csvio::format_full(state.I[i]) + ")");
    }
}

Scheme parse_scheme(const std::string& name) {
    if (name == "imex_euler")
        return Scheme::ImexEuler;
    if (name == "imex_trapezoid")
        return Scheme::ImexTrapezoid;
    throw ValidationError("unknown scheme \"" + name +
                          "\" (expected imex_euler or imex_trapezoid)");
}

std::string scheme_name(Scheme scheme) {
    return scheme == Scheme::ImexEuler ? "imex_euler" : "imex_trapezoid";
}

void validate_config(const StepperConfig& config) {
    if (!(config.dt_initial > 0.0) || !std::isfinite(config.dt_initial))
        throw ValidationError("stepper config: dt_initial must be positive");
    if (!(config.dt_min > 0.0) || !std::isfinite(config.dt_min))
        throw ValidationError("stepper config: dt_min must be positive");
    if (config.dt_min > config.dt_initial)
        throw ValidationError("stepper config: dt_min must not exceed dt_initial");
    if (!(config.steady_tol > 0.0))
        throw ValidationError("stepper config: steady_tol must be positive");
    if (!(config.t_max > 0.0))
        throw ValidationError("stepper config: t_max must be positive");
    if (config.trace_stride < 1)
        throw ValidationError("stepper config: trace_stride must be at least 1");
}

namespace {

struct Bands {
    std::vector<double> sub, diag, sup;
};

// Bands of (Id - a L) for the implicit diffusion half of the step.
Bands implicit_bands(const NeumannLaplacian& lap, double a) {
    const std::size_t n = lap.diag.size();
    Bands m;
    m.sub.resize(n);
    m.diag.resize(n);
    m.sup.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        m.sub[k] = -a * lap.sub[k];
        m.diag[k] = 1.0 - a * lap.diag[k];
        m.sup[k] = -a * lap.sup[k];
    }
    return m;
}

void nodal_reactions(ModelKind kind, const CoefficientSet& coeffs, const Field& S,
                     const Field& I, std::vector<double>& fS, std::vector<double>& fI) {
    const int n = S.size();
    fS.resize(static_cast<std::size_t>(n));
    fI.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ReactionValue v = reaction(kind, coeffs_at(coeffs, i), S[i], I[i]);
        fS[static_cast<std::size_t>(i)] = v.f_S;
        fI[static_cast<std::size_t>(i)] = v.f_I;
    }
}

struct NegativeNode {
    int node = -1;
    char component = '?';
    double value = 0.0;
};

// Scans a candidate pair and reports the most negative nodal value, if any.
bool scan_negative(const Field& S, const Field& I, NegativeNode& neg) {
    neg = NegativeNode{};
    double worst = 0.0;
    for (int i = 0; i < S.size(); ++i) {
        if (S[i] < worst) {
            worst = S[i];
            neg = {i, 'S', S[i]};
        }
        if (I[i] < worst) {
            worst = I[i];
            neg = {i, 'I', I[i]};
        }
    }
    return neg.node >= 0;
}

// One attempted IMEX step at fixed dt, in increment form: the tridiagonal
// systems are solved for the update w with (Id - a L) w = dt * (rate terms),
// so an exact discrete equilibrium (diffusion + reaction summing to zero
// nodally) is a bitwise fixed point and conserved totals drift only by the
// rounding of the increment itself, not of the whole state.
std::optional<State> attempt_step(const State& u, ModelKind kind, const CoefficientSet& coeffs,
                                  double d_S, double d_I, Scheme scheme, double dt,
                                  const NeumannLaplacian& lap, NegativeNode& neg) {
    const int n = u.S.size();
    const GridPtr& grid = u.S.grid;
    Field lapS = apply_laplacian(lap, u.S);
    Field lapI = apply_laplacian(lap, u.I);
    std::vector<double> fS, fI;
    nodal_reactions(kind, coeffs, u.S, u.I, fS, fI);

    std::vector<double> rhs(static_cast<std::size_t>(n));
    auto euler_component = [&](const Field& base, const Field& lap_base, double d,
                               const std::vector<double>& f) {
        for (int i = 0; i < n; ++i)
            rhs[static_cast<std::size_t>(i)] =
                dt * (d * lap_base[i] + f[static_cast<std::size_t>(i)]);
        Bands m = implicit_bands(lap, dt * d);
        std::vector<double> w = thomas_solve(m.sub, m.diag, m.sup, rhs);
        Field out = make_field(grid, 0.0);
        for (int i = 0; i < n; ++i)
            out[i] = base[i] + w[static_cast<std::size_t>(i)];
        return out;
    };

    State next;
    next.t = u.t + dt;
    if (scheme == Scheme::ImexEuler) {
        next.S = euler_component(u.S, lapS, d_S, fS);
        next.I = euler_component(u.I, lapI, d_I, fI);
        if (scan_negative(next.S, next.I, neg))
            return std::nullopt;
        return next;
    }

    // trapezoid: Euler predictor, then Crank-Nicolson diffusion with the
    // averaged reaction  (Id - dt/2 d L) w = dt d L u + dt/2 (f(u) + f(u*))
    State pred;
    pred.S = euler_component(u.S, lapS, d_S, fS);
    pred.I = euler_component(u.I, lapI, d_I, fI);
    if (scan_negative(pred.S, pred.I, neg))
        return std::nullopt;
    std::vector<double> fS2, fI2;
    nodal_reactions(kind, coeffs, pred.S, pred.I, fS2, fI2);

    auto corrector_component = [&](const Field& base, const Field& lap_base, double d,
                                   const std::vector<double>& f1,
                                   const std::vector<double>& f2) {
        for (int i = 0; i < n; ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            rhs[k] = dt * (d * lap_base[i]) + 0.5 * dt * (f1[k] + f2[k]);
        }
        Bands m = implicit_bands(lap, 0.5 * dt * d);
        std::vector<double> w = thomas_solve(m.sub, m.diag, m.sup, rhs);
        Field out = make_field(grid, 0.0);
        for (int i = 0; i < n; ++i)
            out[i] = base[i] + w[static_cast<std::size_t>(i)];
        return out;
    };
    next.S = corrector_component(u.S, lapS, d_S, fS, fS2);
    next.I = corrector_component(u.I, lapI, d_I, fI, fI2);
    if (scan_negative(next.S, next.I, neg))
        return std::nullopt;
    return next;
}

[[noreturn]] void throw_negative(const NegativeNode& neg, double dt, bool dt_min_reached) {
    std::string msg = std::string("step: ") + neg.component + " would turn negative at node " +
                      std::to_string(neg.node) + " (value " + csvio::format_full(neg.value) +
                      ") at dt = " + csvio::format_full(dt);
    if (dt_min_reached)
        msg += "; dt_min reached with persistent negativity";
    else
        msg += "; positivity retry is disabled";
    throw SolverError(msg);
}

void validate_inputs(const State& state, const CoefficientSet& coeffs, const GridPtr& grid,
                     double d_S, double d_I, const StepperConfig& config) {
    validate_config(config);
    validate_state(state, grid);
    validate_coeffs(coeffs, grid);
    if (!(d_S > 0.0) || !std::isfinite(d_S) || !(d_I > 0.0) || !std::isfinite(d_I))
        throw ValidationError("diffusivities d_S and d_I must be positive and finite");
}

struct HomogeneousValues {
    double lambda = 0.0, beta = 0.0, gamma = 0.0, mu = 0.0;
};

HomogeneousValues homogeneous_values(const CoefficientSet& coeffs, const char* who) {
    if (!is_homogeneous(coeffs))
        throw ValidationError(std::string(who) +
                              ": coefficients must be homogeneous (spatially constant)");
    return {coeffs.lambda[0], coeffs.beta[0], coeffs.gamma[0], coeffs.mu[0]};
}

} // namespace

State step(const State& state, ModelKind kind, const CoefficientSet& coeffs, double d_S,
           double d_I, const StepperConfig& config) {
    const GridPtr& grid = state.S.grid;
    validate_inputs(state, coeffs, grid, d_S, d_I, config);
    NeumannLaplacian lap = make_neumann_laplacian(grid);
    double dt = config.dt_initial;
    for (;;) {
        NegativeNode neg;
        std::optional<State> next =
            attempt_step(state, kind, coeffs, d_S, d_I, config.scheme, dt, lap, neg);
        if (next)
            return std::move(*next);
        if (!config.positivity_retry)
            throw_negative(neg, dt, false);
        if (dt <= config.dt_min)
            throw_negative(neg, dt, true);
        dt = std::max(0.5 * dt, config.dt_min);
    }
}

RunResult run(const State& initial, ModelKind kind, const CoefficientSet& coeffs, double d_S,
              double d_I, const StepperConfig& config) {
    const GridPtr& grid = initial.S.grid;
    validate_inputs(initial, coeffs, grid, d_S, d_I, config);
    if (config.lyapunov != LyapunovKind::None) {
        HomogeneousValues c = homogeneous_values(coeffs, "run (lyapunov trace)");
        if (config.lyapunov == LyapunovKind::W &&
            !(c.beta * c.lambda / (c.gamma + c.mu) > 1.0))
            throw ValidationError("run: the endemic-state functional needs R0 > 1 for "
                                  "homogeneous coefficients");
    }
    NeumannLaplacian lap = make_neumann_laplacian(grid);

    RunResult out;
    auto record = [&](const State& s) {
        TraceSample ts;
        ts.t = s.t;
        ts.total_S = integrate(grid, s.S);
        ts.total_I = integrate(grid, s.I);
        ts.min_I = min_value(s.I);
        ts.max_S = max_value(s.S);
        if (config.lyapunov == LyapunovKind::V) {
            ts.lyapunov = lyapunov_v(s, coeffs, grid);
        } else if (config.lyapunov == LyapunovKind::W) {
            try {
                ts.lyapunov = lyapunov_w(s, coeffs, grid);
            } catch (const ValidationError&) {
                // a zero nodal I (e.g. compactly supported initial data)
                // leaves the entropy term undefined at this sample
            }
        }
        out.trace.samples.push_back(ts);
    };

    State cur = initial;
    record(cur);
    double dt = config.dt_initial;
    while (cur.t < config.t_max) {
        double dt_eff = std::min(dt, config.t_max - cur.t);
        if (!(dt_eff > 0.0) || cur.t + dt_eff == cur.t)
            break; // the remaining horizon is below time resolution
        NegativeNode neg;
        std::optional<State> next =
            attempt_step(cur, kind, coeffs, d_S, d_I, config.scheme, dt_eff, lap, neg);
        if (!next) {
            if (!config.positivity_retry)
                throw_negative(neg, dt_eff, false);
            if (dt_eff <= config.dt_min)
                throw_negative(neg, dt_eff, true);
            dt = std::max(0.5 * dt_eff, config.dt_min);
            continue;
        }
        double rate_S = 0.0, rate_I = 0.0;
        for (int i = 0; i < grid->n_nodes(); ++i) {
            rate_S = std::max(rate_S, std::abs(next->S[i] - cur.S[i]));
            rate_I = std::max(rate_I, std::abs(next->I[i] - cur.I[i]));
        }
        out.final_rate = (rate_S + rate_I) / dt_eff;
        cur = std::move(*next);
        ++out.steps;
        if (out.steps % config.trace_stride == 0)
            record(cur);
        if (out.final_rate <= config.steady_tol) {
            out.verdict = RunVerdict::Steady;
            break;
        }
        dt = std::min(2.0 * dt_eff, config.dt_initial);
    }
    if (out.trace.samples.back().t < cur.t)
        record(cur);
    out.state = std::move(cur);
    return out;
}

double lyapunov_v(const State& state, const CoefficientSet& coeffs, const GridPtr& grid) {
    validate_state(state, grid);
    validate_coeffs(coeffs, grid);
    HomogeneousValues c = homogeneous_values(coeffs, "lyapunov_v");
    Field sq = make_field(grid, 0.0);
    for (int i = 0; i < grid->n_nodes(); ++i) {
        double u = (state.S[i] - c.lambda) + state.I[i];
        sq[i] = u * u;
    }
    return 0.5 * integrate(grid, sq) + (c.mu + 1.0) / c.beta * integrate(grid, state.I);
}

double lyapunov_w(const State& state, const CoefficientSet& coeffs, const GridPtr& grid) {
    validate_state(state, grid);
    validate_coeffs(coeffs, grid);
    HomogeneousValues c = homogeneous_values(coeffs, "lyapunov_w");
    double r0 = c.beta * c.lambda / (c.gamma + c.mu);
    if (!(r0 > 1.0))
        throw ValidationError("lyapunov_w: needs R0 > 1 (got " + csvio::format_full(r0) +
                              "); the endemic state does not exist");
    double s_hat = (c.gamma + c.mu) / c.beta;
    double i_hat = (c.lambda - s_hat) / c.mu;
    Field sq = make_field(grid, 0.0), entropy = make_field(grid, 0.0);
    for (int i = 0; i < grid->n_nodes(); ++i) {
        if (!(state.I[i] > 0.0))
            throw ValidationError("lyapunov_w: I must be strictly positive; node " +
                                  std::to_string(i) + " has " + csvio::format_full(state.I[i]));
        double u = (state.S[i] - s_hat) + (state.I[i] - i_hat);
        sq[i] = u * u;
        entropy[i] = state.I[i] - i_hat - i_hat * std::log(state.I[i] / i_hat);
    }
    return 0.5 * integrate(grid, sq) +
           (c.mu + 1.0) / c.beta * integrate(grid, entropy);
}

DissipationReport dissipation_check(const DiagnosticsTrace& trace, const CoefficientSet& coeffs,
                                    ModelKind kind) {
    if (trace.samples.size() < 2)
        throw ValidationError("dissipation_check: trace needs at least two samples");
    const GridPtr grid = coeffs.lambda.grid;
    validate_coeffs(coeffs, grid);
    for (std::size_t k = 0; k + 1 < trace.samples.size(); ++k)
        if (!(trace.samples[k + 1].t > trace.samples[k].t))
            throw ValidationError("dissipation_check: trace timestamps must be strictly "
                                  "increasing (samples " + std::to_string(k) + ", " +
                                  std::to_string(k + 1) + ")");

    DissipationReport rep;
    rep.recruitment_total = integrate(grid, coeffs.lambda);
    rep.theta = std::min(1.0, min_value(coeffs.mu));
    double total0 = trace.samples.front().total_S + trace.samples.front().total_I;

    if (conserves_mass(kind)) {
        // no recruitment, no removal: the only law is a constant total
        rep.absorbing_bound = total0;
        for (std::size_t k = 0; k + 1 < trace.samples.size(); ++k) {
            double total = trace.samples[k + 1].total_S + trace.samples[k + 1].total_I;
            if (std::abs(total - total0) > 1e-8 * std::max(1.0, std::abs(total0)))
                rep.flagged_intervals.push_back(static_cast<int>(k));
        }
        rep.ok = rep.flagged_intervals.empty();
        return rep;
    }

    const bool has_removal = (kind == ModelKind::MW);
    double theta = has_removal ? rep.theta : 0.0;
    if (has_removal) {
        rep.absorbing_bound = std::max(total0, rep.recruitment_total / theta);
    } else {
        rep.theta = 0.0; // no disease-death sink in the I equation
    }
    for (std::size_t k = 0; k + 1 < trace.samples.size(); ++k) {
        const TraceSample& a = trace.samples[k];
        const TraceSample& b = trace.samples[k + 1];
        double total_a = a.total_S + a.total_I;
        double total_b = b.total_S + b.total_I;
        double gap = b.t - a.t;
        double rate = (total_b - total_a) / gap;
        double bound = has_removal ? rep.recruitment_total - theta * total_a
                                   : rep.recruitment_total - a.total_S;
        // left-endpoint evaluation plus one-step scheme error, both O(gap)
        double magnitude = rep.recruitment_total +
                           std::max(1.0, theta) * std::max(std::abs(total_a), std::abs(total_b));
        double slack = magnitude * (1e-9 + 2.0 * gap);
        if (rate > bound + slack)
            rep.flagged_intervals.push_back(static_cast<int>(k));
        if (has_removal && total_b > rep.absorbing_bound * (1.0 + 1e-6))
            rep.absorbing_ok = false;
    }
    rep.ok = rep.flagged_intervals.empty() && rep.absorbing_ok;
    return rep;
}

} // namespace sislab
