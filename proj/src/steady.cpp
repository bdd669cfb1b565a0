#include "sislab/steady.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sislab/errors.hpp"
#include "sislab/linalg.hpp"
#include "sislab/spectral.hpp"

namespace sislab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

void require_positive_scalar(double v, const char* name, const char* who) {
    if (!(std::isfinite(v) && v > 0.0))
        throw ValidationError(std::string(who) + ": " + name + " must be a positive finite value, got " +
                              fmt(v));
}

double linf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

/// Residual of the steady system at interleaved unknowns (S_0, I_0, S_1, ...).
void steady_residual(ModelKind kind, const CoefficientSet& coeffs, const NeumannLaplacian& lap,
                     double d_S, double d_I, const Field& S, const Field& I,
                     std::vector<double>& out) {
    const int n = S.size();
    Field LS = apply_laplacian(lap, S);
    Field LI = apply_laplacian(lap, I);
    out.resize(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ReactionValue f = reaction(kind, coeffs_at(coeffs, i), S[i], I[i]);
        out[2 * static_cast<std::size_t>(i)] = d_S * LS[i] + f.f_S;
        out[2 * static_cast<std::size_t>(i) + 1] = d_I * LI[i] + f.f_I;
    }
}

void split(const std::vector<double>& u, Field& S, Field& I) {
    const int n = S.size();
    for (int i = 0; i < n; ++i) {
        S[i] = u[2 * static_cast<std::size_t>(i)];
        I[i] = u[2 * static_cast<std::size_t>(i) + 1];
    }
}

/// Cells the steepest front of f spans, measured as nodal range over the
/// largest per-cell jump.  Fields that are flat relative to their own
/// magnitude carry no front to resolve and count as fully resolved.
double resolution_cells(const Field& f) {
    const double inf = std::numeric_limits<double>::infinity();
    double mx = max_value(f), mn = min_value(f);
    double range = mx - mn;
    if (!(range > 1e-9 * std::max({1.0, std::abs(mx), std::abs(mn)})))
        return inf;
    double jump = 0.0;
    for (int i = 0; i + 1 < f.size(); ++i)
        jump = std::max(jump, std::abs(f[i + 1] - f[i]));
    return jump == 0.0 ? inf : range / jump;
}

} // namespace

SteadyResult newton_steady(ModelKind kind, double d_S, double d_I, const CoefficientSet& coeffs,
                           const GridPtr& grid, const State& init, double tol) {
    validate_coeffs(coeffs, grid);
    require_positive_scalar(d_S, "d_S", "newton_steady");
    require_positive_scalar(d_I, "d_I", "newton_steady");
    require_positive_scalar(tol, "tol", "newton_steady");
    validate_state(init, grid);
    if (!(min_value(init.S) > 0.0 && min_value(init.I) > 0.0))
        throw ValidationError("newton_steady: init must be strictly positive at every node "
                              "(the damped iteration lives in the open positive cone)");

    const bool conserved = conserves_mass(kind);
    const double N = conserved ? require_total_mass(coeffs, "newton_steady") : 0.0;
    const int n = grid->n_nodes();
    const int m = 2 * n;
    NeumannLaplacian lap = make_neumann_laplacian(grid);

    std::vector<double> wvec(static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) {
        wvec[2 * static_cast<std::size_t>(i)] = grid->weights[static_cast<std::size_t>(i)];
        wvec[2 * static_cast<std::size_t>(i) + 1] = grid->weights[static_cast<std::size_t>(i)];
    }

    Field S = init.S, I = init.I;
    std::vector<double> u(static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) {
        u[2 * static_cast<std::size_t>(i)] = S[i];
        u[2 * static_cast<std::size_t>(i) + 1] = I[i];
    }

    std::vector<double> F, Ft;
    Field St = make_field(grid, 0.0), It = make_field(grid, 0.0);
    // Line-search merit: sup-norm residual plus (for the constrained kinds)
    // the mass defect, so a step that mostly restores the constraint is not
    // rejected for briefly raising the residual.
    auto merit_of = [&](const Field& Sf, const Field& If, const std::vector<double>& Ff) {
        double v = linf(Ff);
        if (conserved)
            v += std::abs(N - integrate(grid, Sf) - integrate(grid, If));
        return v;
    };
    const int max_iterations = 200;
    double res = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        split(u, S, I);
        steady_residual(kind, coeffs, lap, d_S, d_I, S, I, F);
        res = linf(F);
        double mass = integrate(grid, S) + integrate(grid, I);
        bool mass_ok = !conserved || std::abs(mass - N) <= 1e-11 * std::max(1.0, std::abs(N));
        if (res <= tol && mass_ok) {
            converged = true;
            break;
        }
        double merit = res + (conserved ? std::abs(N - mass) : 0.0);

        BandedLU J(m, 2, 2);
        for (int i = 0; i < n; ++i) {
            ReactionJacobian jac = reaction_jacobian(kind, coeffs_at(coeffs, i), S[i], I[i]);
            const int rs = 2 * i, ri = 2 * i + 1;
            J.add(rs, rs, d_S * lap.diag[static_cast<std::size_t>(i)] + jac.dfS_dS);
            J.add(rs, ri, jac.dfS_dI);
            J.add(ri, ri, d_I * lap.diag[static_cast<std::size_t>(i)] + jac.dfI_dI);
            J.add(ri, rs, jac.dfI_dS);
            if (i > 0) {
                J.add(rs, rs - 2, d_S * lap.sub[static_cast<std::size_t>(i)]);
                J.add(ri, ri - 2, d_I * lap.sub[static_cast<std::size_t>(i)]);
            }
            if (i + 1 < n) {
                J.add(rs, rs + 2, d_S * lap.sup[static_cast<std::size_t>(i)]);
                J.add(ri, ri + 2, d_I * lap.sup[static_cast<std::size_t>(i)]);
            }
        }

        std::vector<double> rhs(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k)
            rhs[static_cast<std::size_t>(k)] = -F[static_cast<std::size_t>(k)];
        std::vector<double> delta;
        if (conserved) {
            J.set_border(wvec, wvec, 0.0);
            J.factor();
            delta = J.solve_bordered(std::move(rhs), N - mass).first;
        } else {
            J.factor();
            delta = J.solve(std::move(rhs));
        }

        // Positivity is enforced per component: a node the step would push
        // past zero is clipped to a fixed fraction of its current value
        // instead of shortening the whole step. Profiles with vanishing
        // tails (singular diffusion limits) otherwise stall, because one
        // denormal-scale node caps the global step length. Clipped nodes
        // decay geometrically toward the boundary, and near an interior
        // solution no clipping happens, so Newton's local rate is intact.
        const double clip = 0.1;
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60 && alpha >= 1e-14; ++bt) {
            std::vector<double> trial(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k) {
                std::size_t kk = static_cast<std::size_t>(k);
                double t = u[kk] + alpha * delta[kk];
                trial[kk] = t > 0.0 ? t : clip * u[kk];
            }
            split(trial, St, It);
            steady_residual(kind, coeffs, lap, d_S, d_I, St, It, Ft);
            if (merit_of(St, It, Ft) <= (1.0 - 1e-4 * alpha) * merit) {
                u = std::move(trial);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw SolverError("newton_steady: line search stagnated at residual " + fmt(res) +
                              " after " + std::to_string(iter + 1) +
                              " iterations (a negative iterate was not recoverable by damping, "
                              "or tol sits below the evaluation noise floor)");
    }
    if (!converged)
        throw SolverError("newton_steady: no convergence after " +
                          std::to_string(max_iterations) + " iterations; final residual " +
                          fmt(res));

    split(u, S, I);
    SteadyResult r;
    r.S = S;
    r.I = I;
    r.residual_inf = res;
    r.newton_iterations = iter;
    if (conserved)
        r.constrained_mass = N;
    r.branch = max_value(I) < 1e-8 * max_value(S) ? SteadyBranch::DiseaseFree
                                                  : SteadyBranch::Endemic;
    return r;
}

std::string sweep_target_name(SweepTarget target) {
    switch (target) {
    case SweepTarget::DSToZero: return "d_S_to_zero";
    case SweepTarget::DIToZero: return "d_I_to_zero";
    case SweepTarget::Both: return "both";
    }
    throw ValidationError("sweep_target_name: unknown target");
}

State default_initial_state(ModelKind kind, const CoefficientSet& coeffs, const GridPtr& grid,
                            double d_S) {
    validate_coeffs(coeffs, grid);
    require_positive_scalar(d_S, "d_S", "default_initial_state");
    const double length = grid->length;
    State s;
    s.t = 0.0;
    if (conserves_mass(kind)) {
        double N = require_total_mass(coeffs, "default_initial_state");
        double level = N / length;
        s.S = make_field(grid, 0.9 * level);
        s.I = sample_field(grid, [level, length](double x) {
            return 0.1 * level * (1.0 + std::cos(2.0 * kPi * x / length));
        });
    } else {
        s.S = solve_dfe(d_S, coeffs, grid);
        s.I = sample_field(
            grid, [length](double x) { return 0.1 * (1.0 + std::cos(2.0 * kPi * x / length)); });
    }
    return s;
}

SweepResult sweep(ModelKind kind, SweepTarget target, const CoefficientSet& coeffs,
                  const GridPtr& grid, const std::vector<double>& schedule, double other,
                  double tol) {
    validate_coeffs(coeffs, grid);
    require_positive_scalar(other, target == SweepTarget::Both ? "ratio d" : "companion diffusivity",
                            "sweep");
    require_positive_scalar(tol, "tol", "sweep");
    if (conserves_mass(kind))
        require_total_mass(coeffs, "sweep");
    if (schedule.empty())
        throw ValidationError("sweep: schedule must be nonempty");
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        require_positive_scalar(schedule[k], "schedule entry", "sweep");
        if (k > 0 && !(schedule[k] < schedule[k - 1]))
            throw ValidationError("sweep: schedule must be strictly decreasing, got " +
                                  fmt(schedule[k - 1]) + " then " + fmt(schedule[k]));
    }

    auto diffusivities = [&](double s) {
        switch (target) {
        case SweepTarget::DSToZero: return std::pair<double, double>(s, other);
        case SweepTarget::DIToZero: return std::pair<double, double>(other, s);
        case SweepTarget::Both: return std::pair<double, double>(s / other, s);
        }
        throw ValidationError("sweep: unknown target");
    };

    SweepResult out;
    out.kind = kind;
    out.target = target;
    out.other = other;

    // Seed at the schedule head with a converged dynamics run; the tails of
    // long runs can flush to exact zero, so lift the seed back into the open
    // cone before handing it to Newton.
    State warm;
    try {
        auto [ds0, di0] = diffusivities(schedule.front());
        warm = default_initial_state(kind, coeffs, grid, ds0);
        StepperConfig sc;
        sc.dt_initial = 0.03125;
        sc.dt_min = 1e-10;
        sc.steady_tol = 1e-8;
        sc.t_max = 4000.0;
        sc.trace_stride = 1 << 28;
        RunResult rr = run(warm, kind, coeffs, ds0, di0, sc);
        warm = std::move(rr.state);
    } catch (const SolverError& e) {
        out.failure = std::string("seed dynamics run failed: ") + e.what();
        return out;
    } catch (const ValidationError& e) {
        out.failure = std::string("seed dynamics run failed: ") + e.what();
        return out;
    }

    for (double s : schedule) {
        auto [dS, dI] = diffusivities(s);
        for (int i = 0; i < grid->n_nodes(); ++i) {
            warm.S[i] = std::max(warm.S[i], 1e-300);
            warm.I[i] = std::max(warm.I[i], 1e-300);
        }
        SteadyResult r;
        try {
            r = newton_steady(kind, dS, dI, coeffs, grid, warm, tol);
        } catch (const SolverError& e) {
            out.failure = "entry at diffusivity " + fmt(s) + " failed: " + e.what();
            return out;
        } catch (const ValidationError& e) {
            out.failure = "entry at diffusivity " + fmt(s) + " failed: " + e.what();
            return out;
        }
        double cells = std::min(resolution_cells(r.S), resolution_cells(r.I));
        if (cells < 6.0) {
            out.failure = "entry at diffusivity " + fmt(s) +
                          " is under-resolved: the steepest front spans about " + fmt(cells) +
                          " cells (< 6); rerun with a larger n_cells";
            return out;
        }
        warm.S = r.S;
        warm.I = r.I;
        out.entries.push_back(SweepEntry{s, std::move(r)});
    }
    return out;
}

LimitProfile mw_limit_ds0(double d_I, const CoefficientSet& coeffs, const GridPtr& grid,
                          const Field& init_I, double tol) {
    validate_coeffs(coeffs, grid);
    require_positive_scalar(d_I, "d_I", "mw_limit_ds0");
    require_positive_scalar(tol, "tol", "mw_limit_ds0");
    require_bound(grid, init_I, "init_I");
    if (min_value(init_I) < 0.0)
        throw ValidationError("mw_limit_ds0: init_I must be nonnegative");

    const int n = grid->n_nodes();
    Field potential = make_field(grid, 0.0);
    for (int i = 0; i < n; ++i)
        potential[i] = coeffs.beta[i] * coeffs.lambda[i] - coeffs.gamma[i] - coeffs.mu[i];
    EigenResult eig = principal_eigenpair(d_I, potential, grid);
    if (!(eig.eigenvalue < 0.0))
        throw ValidationError(
            "mw_limit_ds0: the reduced problem needs a negative principal eigenvalue of "
            "-d_I L - (βΛ-γ-μ) for a positive solution to exist; got " +
            fmt(eig.eigenvalue));

    NeumannLaplacian lap = make_neumann_laplacian(grid);
    auto g_of = [&](double I, int i) {
        NodeCoeffs c = coeffs_at(coeffs, i);
        return c.beta * (c.lambda + c.gamma * I) * I / (1.0 + c.beta * I) -
               (c.gamma + c.mu) * I;
    };
    auto residual = [&](const Field& I, std::vector<double>& out) {
        Field LI = apply_laplacian(lap, I);
        out.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = d_I * LI[i] + g_of(I[i], i);
    };

    // I ≡ 0 solves the reduced problem exactly (returned as S = Λ below); any
    // other guess is lifted into the open cone, where the damped iteration
    // lives — a zero node with a negative Newton direction would stall it.
    Field I = init_I;
    double guess_max = max_value(I);
    if (guess_max > 0.0)
        for (int i = 0; i < n; ++i)
            I[i] = std::max(I[i], 1e-10 * (1.0 + guess_max));

    // The trivial state also solves the reduced equation, and from a cold
    // guess a damped Newton can slide onto it. The eigenvalue check above
    // means the positive profile attracts every nonzero nonnegative state of
    // the reduced evolution I_t = d_I I_xx + g(I), so an implicit-diffusion
    // march selects the branch before Newton sharpens it. The step keeps
    // I + dt g(I) >= I (1 - dt max(gamma+mu)) positive, and the march stops
    // once the motion per unit time is small against the profile scale.
    if (guess_max > 0.0) {
        double sink = 0.0;
        for (int i = 0; i < n; ++i)
            sink = std::max(sink, coeffs.gamma[i] + coeffs.mu[i]);
        const double dt = 0.45 / std::max(1.0, sink);
        std::vector<double> msub(lap.sub), mdiag(lap.diag), msup(lap.sup);
        for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
            msub[k] *= -dt * d_I;
            mdiag[k] = 1.0 - dt * d_I * mdiag[k];
            msup[k] *= -dt * d_I;
        }
        std::vector<double> rhs(static_cast<std::size_t>(n));
        for (int march = 0; march < 5000; ++march) {
            for (int i = 0; i < n; ++i)
                rhs[static_cast<std::size_t>(i)] = I[i] + dt * g_of(I[i], i);
            std::vector<double> In = thomas_solve(msub, mdiag, msup, rhs);
            double change = 0.0;
            for (int i = 0; i < n; ++i) {
                change = std::max(change, std::abs(In[static_cast<std::size_t>(i)] - I[i]));
                I[i] = In[static_cast<std::size_t>(i)];
            }
            if (change <= 1e-4 * dt * (1.0 + max_value(I)))
                break;
        }
    }
    std::vector<double> F, Ft;
    const int max_iterations = 200;
    double res = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int iter = 0; iter < max_iterations && !converged; ++iter) {
        residual(I, F);
        res = linf(F);
        if (res <= tol) {
            converged = true;
            break;
        }
        std::vector<double> sub = lap.sub, diag = lap.diag, sup = lap.sup;
        for (int i = 0; i < n; ++i) {
            NodeCoeffs c = coeffs_at(coeffs, i);
            double denom = 1.0 + c.beta * I[i];
            double gp = c.beta * (c.lambda + 2.0 * c.gamma * I[i] +
                                  c.beta * c.gamma * I[i] * I[i]) / (denom * denom) -
                        (c.gamma + c.mu);
            sub[static_cast<std::size_t>(i)] *= d_I;
            sup[static_cast<std::size_t>(i)] *= d_I;
            diag[static_cast<std::size_t>(i)] = d_I * lap.diag[static_cast<std::size_t>(i)] + gp;
        }
        std::vector<double> rhs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            rhs[static_cast<std::size_t>(i)] = -F[static_cast<std::size_t>(i)];
        std::vector<double> delta = gtsv_solve(sub, diag, sup, std::move(rhs));

        // Same per-component positivity clip as the full Newton solver: a
        // node the step would push past zero takes a fixed contraction of its
        // current value instead of capping the whole step, so near-zero tail
        // nodes (the lifted seed starts at 1e-10 scale) cannot stall the
        // iteration.
        const double clip = 0.1;
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60 && alpha >= 1e-14; ++bt) {
            Field trial = I;
            for (int i = 0; i < n; ++i) {
                double t = I[i] + alpha * delta[static_cast<std::size_t>(i)];
                trial[i] = t > 0.0 ? t : clip * I[i];
            }
            residual(trial, Ft);
            if (linf(Ft) <= (1.0 - 1e-4 * alpha) * res) {
                I = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw SolverError("mw_limit_ds0: line search stagnated at residual " + fmt(res));
    }
    if (!converged)
        throw SolverError("mw_limit_ds0: no convergence after " +
                          std::to_string(max_iterations) + " iterations; final residual " +
                          fmt(res));

    LimitProfile p;
    p.I_limit = I;
    p.S_limit = make_field(grid, 0.0);
    for (int i = 0; i < n; ++i)
        p.S_limit[i] =
            (coeffs.lambda[i] + coeffs.gamma[i] * I[i]) / (1.0 + coeffs.beta[i] * I[i]);
    p.provenance = "vanishing-d_S reduced profile: S=(Λ+γI)/(1+βI), -d_I·LI=βSI-(γ+μ)I";
    return p;
}

LimitProfile mo_limit_wu_zou(double d, const CoefficientSet& coeffs, const GridPtr& grid,
                             double N) {
    validate_coeffs(coeffs, grid);
    require_positive_scalar(d, "d", "mo_limit_wu_zou");
    require_positive_scalar(N, "N", "mo_limit_wu_zou");

    const int n = grid->n_nodes();
    const double area = grid->length;
    const double a = N / area;
    double excess = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        excess = std::max(excess, a * coeffs.beta[i] - coeffs.gamma[i]);
    if (excess < 0.0)
        throw ValidationError("mo_limit_wu_zou: every node has (N/|Ω|)β - γ < 0 (max " +
                              fmt(excess) + "); the ratio limit needs a high-risk region. "
                              "When the maximum is exactly zero the unique nonnegative "
                              "solution I ≡ 0 is returned instead");

    auto profile_at = [&](double m, Field& I) {
        for (int i = 0; i < n; ++i) {
            double top = a * coeffs.beta[i] - coeffs.gamma[i] -
                         (1.0 - d) * coeffs.beta[i] / area * m;
            I[i] = top > 0.0 ? top / (d * coeffs.beta[i]) : 0.0;
        }
    };
    Field I = make_field(grid, 0.0);
    auto G = [&](double m) {
        profile_at(m, I);
        return integrate(grid, I) - m;
    };

    double lo = 0.0, hi = N;
    double glo = G(lo), ghi = G(hi);
    double m = 0.0;
    if (glo == 0.0) {
        // Boundary habitat: (N/|Ω|)β − γ peaks at exactly zero, so the unique
        // nonnegative root is m = 0 and the infected limit vanishes.
        m = 0.0;
    } else if (!(glo > 0.0) || !(ghi < 0.0)) {
        throw SolverError("mo_limit_wu_zou: G(m) = ∫I(·;m) - m does not change sign on [0, N] "
                          "(G(0) = " + fmt(glo) + ", G(N) = " + fmt(ghi) +
                          "); this should be impossible and is reported for audit");
    } else {
        for (int iter = 0; iter < 200; ++iter) {
            double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi || hi - lo <= 1e-15 * std::max(1.0, N))
                break;
            (G(mid) > 0.0 ? lo : hi) = mid;
        }
        m = 0.5 * (lo + hi);
    }
    profile_at(m, I);

    LimitProfile p;
    p.I_limit = I;
    p.S_limit = make_field(grid, 0.0);
    for (int i = 0; i < n; ++i)
        p.S_limit[i] = a - (1.0 - d) / area * m - d * I[i];
    p.I_total = m;
    p.provenance = "ratio limit d=d_I/d_S: {(N/|Ω|)β-γ-((1-d)β/|Ω|)m}₊ = dβI with m = ∫I, "
                   "S = N/|Ω|-((1-d)/|Ω|)m-dI";
    return p;
}

LimitProfile so_limit_peng(double d0, const CoefficientSet& coeffs, const GridPtr& grid,
                           double N) {
    validate_coeffs(coeffs, grid);
    require_positive_scalar(N, "N", "so_limit_peng");
    if (std::isnan(d0) || d0 < 0.0)
        throw ValidationError("so_limit_peng: d0 must be in [0, ∞], got " + fmt(d0));

    const int n = grid->n_nodes();
    LimitProfile p;
    p.S_limit = make_field(grid, 0.0);
    p.I_limit = make_field(grid, 0.0);
    if (d0 == 0.0) {
        Field e = make_field(grid, 0.0);
        for (int i = 0; i < n; ++i) {
            double pos = std::max(coeffs.beta[i] - coeffs.gamma[i], 0.0);
            e[i] = 1.0 + pos / coeffs.gamma[i];
        }
        double Z = integrate(grid, e);
        for (int i = 0; i < n; ++i) {
            p.S_limit[i] = N / Z;
            p.I_limit[i] = N * (e[i] - 1.0) / Z;
        }
        p.provenance = "standard-incidence conserved limit d0=0: S ≡ N/Z, I = N(β-γ)₊/(γZ), "
                       "Z = ∫[1+(β-γ)₊/γ]";
    } else if (std::isinf(d0)) {
        Field one_minus_a = make_field(grid, 0.0);
        for (int i = 0; i < n; ++i)
            one_minus_a[i] = coeffs.beta[i] > coeffs.gamma[i] ? 0.0 : 1.0;
        double Z = integrate(grid, one_minus_a);
        if (!(Z > 0.0))
            throw ValidationError("so_limit_peng: the d0 = ∞ form is normalized by the measure "
                                  "of {β ≤ γ}, which is empty on this grid (every node is "
                                  "high-risk)");
        for (int i = 0; i < n; ++i)
            p.S_limit[i] = N * one_minus_a[i] / Z;
        p.provenance = "standard-incidence conserved limit d0=∞: I ≡ 0, S = N(1-A)/∫(1-A) "
                       "with A = [β>γ]";
    } else {
        Field A = make_field(grid, 0.0);
        for (int i = 0; i < n; ++i) {
            double pos = std::max(coeffs.beta[i] - coeffs.gamma[i], 0.0);
            A[i] = pos == 0.0
                       ? 0.0
                       : d0 * pos / (d0 * (coeffs.beta[i] - coeffs.gamma[i]) + coeffs.gamma[i]);
        }
        Field z = make_field(grid, 0.0);
        for (int i = 0; i < n; ++i)
            z[i] = A[i] + d0 * (1.0 - A[i]);
        double Z = integrate(grid, z);
        for (int i = 0; i < n; ++i) {
            p.S_limit[i] = N * d0 * (1.0 - A[i]) / Z;
            p.I_limit[i] = N * A[i] / Z;
        }
        p.provenance = "standard-incidence conserved limit d0∈(0,∞): A = d0(β-γ)₊/(d0(β-γ)+γ), "
                       "S = N·d0(1-A)/Z, I = N·A/Z, Z = ∫[A+d0(1-A)]";
    }
    return p;
}

AprioriReport audit_apriori(const SteadyResult& result, ModelKind kind,
                            const CoefficientSet& coeffs) {
    if (kind != ModelKind::MW)
        throw ValidationError("audit_apriori: the bound set is derived for the birth-death "
                              "mass-action kind only");
    const GridPtr& grid = result.S.grid;
    validate_coeffs(coeffs, grid);
    require_bound(grid, result.S, "result.S");
    require_bound(grid, result.I, "result.I");
    const int n = grid->n_nodes();

    double lam_max = max_value(coeffs.lambda), lam_min = min_value(coeffs.lambda);
    double gb_max = 0.0, gb_min = std::numeric_limits<double>::infinity();
    double beta_min = std::numeric_limits<double>::infinity();
    double gamma_max = 0.0, mu_max = 0.0;
    for (int i = 0; i < n; ++i) {
        double gb = coeffs.gamma[i] / coeffs.beta[i];
        gb_max = std::max(gb_max, gb);
        gb_min = std::min(gb_min, gb);
        beta_min = std::min(beta_min, coeffs.beta[i]);
        gamma_max = std::max(gamma_max, coeffs.gamma[i]);
        mu_max = std::max(mu_max, coeffs.mu[i]);
    }

    AprioriReport rep;
    {
        double bound = std::max(lam_max, gb_max);
        rep.max_s = {max_value(result.S), bound + 1e-6 * std::max(1.0, bound), false};
        rep.max_s.ok = rep.max_s.value <= rep.max_s.bound;
    }
    {
        double bound = std::min(lam_min, gb_min);
        rep.min_s = {min_value(result.S), bound - 1e-6 * std::max(1.0, bound), false};
        rep.min_s.ok = rep.min_s.value >= rep.min_s.bound;
    }
    {
        Field muI = make_field(grid, 0.0);
        for (int i = 0; i < n; ++i)
            muI[i] = coeffs.mu[i] * result.I[i];
        double total_lambda = integrate(grid, coeffs.lambda);
        double defect = std::abs(integrate(grid, result.S) + integrate(grid, muI) - total_lambda);
        rep.mass = {defect, 1e-8 * std::max(1.0, std::abs(total_lambda)), false};
        rep.mass.ok = rep.mass.value <= rep.mass.bound;
    }
    {
        Field SI = make_field(grid, 0.0);
        for (int i = 0; i < n; ++i)
            SI[i] = result.S[i] * result.I[i];
        double lhs = beta_min * integrate(grid, SI);
        double rhs = (gamma_max + mu_max) * integrate(grid, result.I);
        rep.incidence = {lhs, rhs + 1e-6 * std::max(1.0, rhs), false};
        rep.incidence.ok = rep.incidence.value <= rep.incidence.bound;
    }
    rep.ok = rep.max_s.ok && rep.min_s.ok && rep.mass.ok && rep.incidence.ok;
    return rep;
}

double support_fraction(const Field& f, double ratio) {
    require_bound(f.grid, f, "f");
    double mx = max_value(f);
    if (!(mx > 0.0))
        return 0.0;
    double thr = ratio * mx;
    double measure = 0.0;
    for (int i = 0; i < f.size(); ++i)
        if (f[i] > thr)
            measure += f.grid->weights[static_cast<std::size_t>(i)];
    // The true measure cannot exceed the domain; plain weight summation can
    // land an ulp above it when every node is active.
    return std::min(measure / f.grid->length, 1.0);
}

int support_components(const Field& f, double ratio) {
    require_bound(f.grid, f, "f");
    double mx = max_value(f);
    if (!(mx > 0.0))
        return 0;
    double thr = ratio * mx;
    int components = 0;
    bool in_run = false;
    for (int i = 0; i < f.size(); ++i) {
        bool above = f[i] > thr;
        if (above && !in_run)
            ++components;
        in_run = above;
    }
    return components;
}

Di0Report di0_diagnostics(const SweepResult& sweep_result, const CoefficientSet& coeffs,
                          const GridPtr& grid) {
    validate_coeffs(coeffs, grid);
    if (sweep_result.kind != ModelKind::MW)
        throw ValidationError("di0_diagnostics: expects a birth-death mass-action sweep");
    if (sweep_result.target != SweepTarget::DIToZero)
        throw ValidationError("di0_diagnostics: expects a d_I-shrinking sweep at fixed d_S");
    if (sweep_result.entries.empty())
        throw ValidationError("di0_diagnostics: sweep has no entries");

    Field dfe = solve_dfe(sweep_result.other, coeffs, grid);
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid->n_nodes(); ++i)
        min_gap = std::min(min_gap,
                           coeffs.gamma[i] + coeffs.mu[i] - coeffs.beta[i] * dfe[i]);
    if (!(min_gap < 0.0))
        throw ValidationError("di0_diagnostics: the instability set {βS̃ > γ+μ} is empty "
                              "(min(γ+μ-βS̃) = " + fmt(min_gap) +
                              "); no persistent infected limit exists to diagnose");

    Di0Report rep;
    double gb_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid->n_nodes(); ++i)
        gb_min = std::min(gb_min, coeffs.gamma[i] / coeffs.beta[i]);
    rep.min_s_bound = std::min(min_value(coeffs.lambda), gb_min);

    rep.min_s = std::numeric_limits<double>::infinity();
    for (const SweepEntry& e : sweep_result.entries) {
        rep.min_s = std::min(rep.min_s, min_value(e.result.S));
        rep.int_i.push_back(integrate(grid, e.result.I));
        rep.support_frac.push_back(support_fraction(e.result.I, 1e-3));
    }
    rep.min_s_ok = rep.min_s >= rep.min_s_bound - 1e-6;

    std::size_t k = rep.int_i.size();
    if (k >= 3) {
        auto rel_change = [&](std::size_t j) {
            return std::abs(rep.int_i[j] - rep.int_i[j - 1]) /
                   std::max(std::abs(rep.int_i[j - 1]), 1e-300);
        };
        rep.int_i_cauchy_ok =
            rel_change(k - 2) < 0.01 && rel_change(k - 1) < 0.01 && rep.int_i.back() > 0.0;
        rep.support_monotone_ok = rep.support_frac[k - 3] >= rep.support_frac[k - 2] &&
                                  rep.support_frac[k - 2] >= rep.support_frac[k - 1];
    }
    const Field& last_s = sweep_result.entries.back().result.S;
    rep.flatness = max_value(last_s) - min_value(last_s);
    return rep;
}

} // namespace sislab
