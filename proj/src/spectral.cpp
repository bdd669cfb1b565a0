#include "sislab/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sislab/csv.hpp"
#include "sislab/errors.hpp"
#include "sislab/linalg.hpp"

namespace sislab {

namespace {

// Turns the symmetric-basis eigenvector z of D M D^{-1} (D = diag(scale))
// back into the model basis, fixes its sign by the largest-magnitude entry,
// normalizes to max = 1, and checks it is the positive principal mode.
Field principal_profile(const GridPtr& grid, const std::vector<double>& z,
                        const std::vector<double>& scale, const char* who) {
    const int n = grid->n_nodes();
    Field f = make_field(grid, 0.0);
    for (int i = 0; i < n; ++i)
        f[i] = z[static_cast<std::size_t>(i)] / scale[static_cast<std::size_t>(i)];
    double big = 0.0;
    for (int i = 0; i < n; ++i)
        if (std::abs(f[i]) > std::abs(big))
            big = f[i];
    if (big == 0.0)
        throw SolverError(std::string(who) + ": zero eigenvector");
    for (int i = 0; i < n; ++i)
        f[i] /= big;
    double lo = min_value(f);
    if (lo < -1e-10)
        throw SolverError(std::string(who) + ": eigenvector changes sign (min " +
                          std::to_string(lo) + " after max-normalization); the positive "
                          "principal mode was not isolated");
    // tiny negatives are roundoff noise from the tail of a localized mode
    for (int i = 0; i < n; ++i)
        if (f[i] < 0.0)
            f[i] = 0.0;
    return f;
}

std::vector<double> sqrt_weights(const GridPtr& grid) {
    std::vector<double> s(grid->weights.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = std::sqrt(grid->weights[i]);
    return s;
}

void check_positive_di(double d, const char* who) {
    if (!(std::isfinite(d) && d > 0.0))
        throw ValidationError(std::string(who) + ": diffusivity must be positive, got " +
                              std::to_string(d));
}

} // namespace

Field solve_dfe(double d_S, const CoefficientSet& coeffs, const GridPtr& grid) {
    check_positive_di(d_S, "solve_dfe");
    validate_coeffs(coeffs, grid);
    NeumannLaplacian lap = make_neumann_laplacian(grid);
    const int n = grid->n_nodes();
    std::vector<double> sub(static_cast<std::size_t>(n)), diag(sub.size()), sup(sub.size());
    for (int i = 0; i < n; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        sub[k] = -d_S * lap.sub[k];
        diag[k] = -d_S * lap.diag[k] + 1.0;
        sup[k] = -d_S * lap.sup[k];
    }
    // Split the recruitment into its weighted mean and the deviation, and
    // solve only for the deviation.  The discrete Laplacian annihilates
    // constants bitwise (every band is built from the same 1/h^2), so the
    // mean passes through the operator untouched; the stiff d_S/h^2 block
    // then acts on a right-hand side whose size already reflects how much
    // the profile can deviate from that mean.  Solving the full system
    // directly would smear O(kappa*eps) rounding noise of the mean across
    // the profile and spoil the constant-recruitment identity.
    Field ones = make_field(grid, 1.0);
    double mean = integrate(grid, coeffs.lambda) / integrate(grid, ones);
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        rhs[static_cast<std::size_t>(i)] = coeffs.lambda[i] - mean;

    // (-d_S L + Id) is a strictly diagonally dominant M-matrix; Thomas is safe
    std::vector<double> v = thomas_solve(sub, diag, sup, rhs);

    auto deviation_defect = [&](const std::vector<double>& u) {
        std::vector<double> r(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            double row = diag[k] * u[k];
            if (i > 0)
                row += sub[k] * u[k - 1];
            if (i + 1 < n)
                row += sup[k] * u[k + 1];
            r[k] = rhs[k] - row;
        }
        return r;
    };
    // Two sweeps of iterative refinement trim the remaining solver noise.
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<double> corr = thomas_solve(sub, diag, sup, deviation_defect(v));
        for (int i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] += corr[static_cast<std::size_t>(i)];
    }

    Field f = make_field(grid, 0.0);
    for (int i = 0; i < n; ++i)
        f[i] = mean + v[static_cast<std::size_t>(i)];
    double defect = 0.0;
    for (int i = 0; i < n; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        double row = diag[k] * f[i];
        if (i > 0)
            row += sub[k] * f[i - 1];
        if (i + 1 < n)
            row += sup[k] * f[i + 1];
        defect = std::max(defect, std::abs(coeffs.lambda[i] - row));
    }
    double op_scale = (1.0 + 4.0 * d_S / (grid->h * grid->h)) * max_value(f) +
                      max_value(coeffs.lambda);
    if (defect > 1e-12 * std::max(1.0, op_scale))
        throw SolverError("solve_dfe: linear-solve defect " + csvio::format_full(defect) +
                          " exceeds tolerance at operator scale " + csvio::format_full(op_scale));
    if (!(min_value(f) > 0.0))
        throw SolverError("solve_dfe: profile not strictly positive");
    return f;
}

EigenResult principal_eigenpair(double d_I, const Field& potential, const GridPtr& grid) {
    check_positive_di(d_I, "principal_eigenpair");
    require_bound(grid, potential, "potential");
    NeumannLaplacian lap = make_neumann_laplacian(grid);
    const int n = grid->n_nodes();

    // similarity transform by diag(sqrt(w)) makes -d_I L - diag(q) symmetric
    std::vector<double> d(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n) - 1);
    for (int i = 0; i < n; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        d[k] = -d_I * lap.diag[k] - potential[i];
        if (i + 1 < n)
            e[k] = -d_I * std::sqrt(lap.sup[k] * lap.sub[k + 1]);
    }
    SymTridiagEigen eig = smallest_eigenpair_sym_tridiag(d, e);

    EigenResult r;
    r.eigenvalue = eig.value;
    r.iterations = eig.iterations;
    r.eigenfunction = principal_profile(grid, eig.vector, sqrt_weights(grid),
                                        "principal_eigenpair");

    Field lpsi = apply_laplacian(lap, r.eigenfunction);
    double defect = 0.0;
    for (int i = 0; i < n; ++i)
        defect = std::max(defect, std::abs(d_I * lpsi[i] + potential[i] * r.eigenfunction[i] +
                                           eig.value * r.eigenfunction[i]));
    r.residual = defect;
    double scale = 4.0 * d_I / (grid->h * grid->h) + max_value(potential) -
                   std::min(0.0, min_value(potential)) + std::abs(eig.value);
    if (defect > 1e-8 * std::max(1.0, scale))
        throw SolverError("principal_eigenpair: residual " + std::to_string(defect) +
                          " too large for operator scale " + std::to_string(scale));
    return r;
}

R0Potentials r0_potentials(ModelKind kind, double d_S, const CoefficientSet& coeffs,
                           const GridPtr& grid) {
    validate_coeffs(coeffs, grid);
    R0Potentials p;
    switch (kind) {
    case ModelKind::MW: {
        Field dfe = solve_dfe(d_S, coeffs, grid);
        p.b = make_field(grid, 0.0);
        p.c = make_field(grid, 0.0);
        for (int i = 0; i < grid->n_nodes(); ++i) {
            p.b[i] = coeffs.beta[i] * dfe[i];
            p.c[i] = coeffs.gamma[i] + coeffs.mu[i];
        }
        return p;
    }
    case ModelKind::MO: {
        double scale = require_total_mass(coeffs, "the mass-action conserved model") /
                       grid->length;
        p.b = make_field(grid, 0.0);
        for (int i = 0; i < grid->n_nodes(); ++i)
            p.b[i] = coeffs.beta[i] * scale;
        p.c = coeffs.gamma;
        return p;
    }
    case ModelKind::SO:
    case ModelKind::SW:
        p.b = coeffs.beta;
        p.c = coeffs.gamma;
        return p;
    }
    throw ValidationError("unknown model kind");
}

R0Result compute_r0(ModelKind kind, double d_I, double d_S, const CoefficientSet& coeffs,
                    const GridPtr& grid) {
    check_positive_di(d_I, "compute_r0");
    check_positive_di(d_S, "compute_r0 (d_S)");
    R0Potentials pots = r0_potentials(kind, d_S, coeffs, grid);
    const int n = grid->n_nodes();
    const double h = grid->h;

    // Symmetrized pencil: R0 = 1 / lambda_min(B^{-1/2} A B^{-1/2}) with
    // A = d_I * (weighted stiffness) + diag(w c), B = diag(w b).  The
    // weighted stiffness has diagonal 2/h (1/h at the ends) and off-diagonal
    // -1/h, which keeps every matrix here symmetric without balancing tricks.
    std::vector<double> bw(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (!(pots.b[i] > 0.0) || !(pots.c[i] > 0.0))
            throw ValidationError("compute_r0: quotient weights must be positive");
        bw[static_cast<std::size_t>(i)] =
            std::sqrt(grid->weights[static_cast<std::size_t>(i)] * pots.b[i]);
    }
    std::vector<double> d(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n) - 1);
    for (int i = 0; i < n; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        double w = grid->weights[k];
        double stiff_diag = (i == 0 || i == n - 1) ? 1.0 / h : 2.0 / h;
        d[k] = (d_I * stiff_diag + w * pots.c[i]) / (w * pots.b[i]);
        if (i + 1 < n)
            e[k] = -(d_I / h) / (bw[k] * bw[k + 1]);
    }
    SymTridiagEigen eig = smallest_eigenpair_sym_tridiag(d, e);
    if (!(eig.value > 0.0))
        throw SolverError("compute_r0: pencil eigenvalue not positive (" +
                          std::to_string(eig.value) + ")");

    R0Result r;
    r.maximizer = principal_profile(grid, eig.vector, bw, "compute_r0");
    // The quotient at the converged maximizer is the sharper value: it is a
    // sum of positive terms, while the bisected eigenvalue carries absolute
    // error proportional to the matrix scale (large when d_I/h^2 dominates).
    // Being variational, the quotient is second-order accurate in the
    // eigenvector error.
    r.value = r0_quotient(pots, d_I, r.maximizer, grid);
    // Cross-check quotient vs pencil. The pencil eigenvalue cannot be located
    // more precisely than the rounding noise of the Sturm counts, which is
    // absolute at the Gershgorin scale of the matrix, so the allowed mismatch
    // grows with that scale.
    double gersh = 0.0;
    for (int i = 0; i < n; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        double row = std::abs(d[k]);
        if (i > 0) row += std::abs(e[k - 1]);
        if (i + 1 < n) row += std::abs(e[k]);
        gersh = std::max(gersh, row);
    }
    const double guard =
        1e-6 + 64.0 * std::numeric_limits<double>::epsilon() * gersh / eig.value;
    if (!(std::abs(r.value * eig.value - 1.0) <= guard))
        throw SolverError("compute_r0: quotient " + std::to_string(r.value) +
                          " inconsistent with pencil eigenvalue " + std::to_string(eig.value));
    r.model = kind;
    r.d_I = d_I;
    if (kind == ModelKind::MW)
        r.d_S = d_S;
    r.iterations = eig.iterations;
    return r;
}

double r0_quotient(const R0Potentials& pots, double d_I, const Field& phi, const GridPtr& grid) {
    require_bound(grid, phi, "phi");
    Field bp = make_field(grid, 0.0), cp = make_field(grid, 0.0);
    for (int i = 0; i < grid->n_nodes(); ++i) {
        bp[i] = pots.b[i] * phi[i] * phi[i];
        cp[i] = pots.c[i] * phi[i] * phi[i];
    }
    double num = integrate(grid, bp);
    double den = d_I * dirichlet_energy(grid, phi) + integrate(grid, cp);
    if (den <= 0.0)
        throw ValidationError("r0_quotient: vanishing trial profile");
    return num / den;
}

EigenResult lambda_star(ModelKind kind, double d_I, double d_S, const CoefficientSet& coeffs,
                        const GridPtr& grid) {
    R0Potentials pots = r0_potentials(kind, d_S, coeffs, grid);
    Field q = make_field(grid, 0.0);
    for (int i = 0; i < grid->n_nodes(); ++i)
        q[i] = pots.b[i] - pots.c[i];
    return principal_eigenpair(d_I, q, grid);
}

R0Limits r0_limits(ModelKind kind, double d_S, const CoefficientSet& coeffs,
                   const GridPtr& grid) {
    R0Potentials pots = r0_potentials(kind, d_S, coeffs, grid);
    R0Limits lim;
    lim.low = 0.0;
    for (int i = 0; i < grid->n_nodes(); ++i)
        lim.low = std::max(lim.low, pots.b[i] / pots.c[i]);
    lim.high = integrate(grid, pots.b) / integrate(grid, pots.c);
    return lim;
}

double find_threshold_di(ModelKind kind, double d_S, const CoefficientSet& coeffs,
                         const GridPtr& grid, std::pair<double, double> bracket) {
    R0Potentials pots = r0_potentials(kind, d_S, coeffs, grid);
    double min_p = pots.b[0] - pots.c[0], max_p = min_p;
    for (int i = 1; i < grid->n_nodes(); ++i) {
        double p = pots.b[i] - pots.c[i];
        min_p = std::min(min_p, p);
        max_p = std::max(max_p, p);
    }
    double int_b = integrate(grid, pots.b), int_c = integrate(grid, pots.c);
    if (max_p <= 0.0)
        throw ValidationError("find_threshold_di: b - c <= 0 everywhere, so R0 <= max b/c <= 1 "
                              "for every d_I; no crossing exists");
    if (min_p >= 0.0)
        throw ValidationError("find_threshold_di: b - c >= 0 everywhere, so R0 >= 1 for every "
                              "d_I; no crossing exists");
    if (int_b >= int_c)
        throw ValidationError("find_threshold_di: ∫b = " + std::to_string(int_b) + " >= ∫c = " +
                              std::to_string(int_c) + ", so R0 > ∫b/∫c >= 1 for every d_I; no "
                              "crossing exists");

    auto r0_at = [&](double di) { return compute_r0(kind, di, d_S, coeffs, grid).value; };

    double lo = bracket.first, hi = bracket.second;
    if (!(std::isfinite(lo) && std::isfinite(hi) && 0.0 < lo && lo < hi))
        throw ValidationError("find_threshold_di: bracket must satisfy 0 < low < high");
    // R0 decreases in d_I, so the crossing needs R0(lo) > 1 > R0(hi);
    // expand the bracket decade by decade if it does not straddle yet
    double r_lo = r0_at(lo);
    while (r_lo <= 1.0 && lo > 1e-8) {
        lo = std::max(lo / 10.0, 1e-8);
        r_lo = r0_at(lo);
    }
    double r_hi = r0_at(hi);
    while (r_hi >= 1.0 && hi < 1e8) {
        hi = std::min(hi * 10.0, 1e8);
        r_hi = r0_at(hi);
    }
    if (!(r_lo > 1.0 && r_hi < 1.0))
        throw SolverError("find_threshold_di: no straddling bracket within [1e-8, 1e8] "
                          "(R0 = " + std::to_string(r_lo) + " at " + std::to_string(lo) +
                          ", " + std::to_string(r_hi) + " at " + std::to_string(hi) + ")");

    double llo = std::log(lo), lhi = std::log(hi);
    for (int it = 0; it < 200; ++it) {
        double lmid = 0.5 * (llo + lhi);
        double mid = std::exp(lmid);
        double r = r0_at(mid);
        if (std::abs(r - 1.0) <= 1e-8)
            return mid;
        if (r > 1.0)
            llo = lmid;
        else
            lhi = lmid;
    }
    throw SolverError("find_threshold_di: bisection did not reach |R0 - 1| <= 1e-8 within 200 "
                      "iterations");
}

} // namespace sislab
