#include "sislab/spectral.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sislab/errors.hpp"

using namespace sislab;

namespace {

constexpr double kPi = 3.14159265358979323846;

// dense weighted stiffness assembled edge by edge — independent of the
// ghost-node band construction used by the library
std::vector<std::vector<double>> dense_weighted_stiffness(const GridPtr& grid) {
    int n = grid->n_nodes();
    std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
    for (int i = 0; i + 1 < n; ++i) {
        K[i][i] += 1.0 / grid->h;
        K[i + 1][i + 1] += 1.0 / grid->h;
        K[i][i + 1] -= 1.0 / grid->h;
        K[i + 1][i] -= 1.0 / grid->h;
    }
    return K;
}

CoefficientSet random_set(const GridPtr& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double bb = std::exp(std::uniform_real_distribution<double>(std::log(0.4), std::log(1.8))(rng));
    double gg = std::uniform_real_distribution<double>(0.6, 1.6)(rng);
    double mm = std::uniform_real_distribution<double>(0.2, 1.2)(rng);
    double ll = std::uniform_real_distribution<double>(0.7, 2.0)(rng);
    double p1 = 2.0 * kPi * u01(rng), p2 = 2.0 * kPi * u01(rng), p3 = 2.0 * kPi * u01(rng);
    CoefficientSet c;
    c.beta = sample_field(grid, [=](double x) { return bb * (1.0 + 0.6 * std::sin(2.0 * kPi * x + p1)); });
    c.gamma = sample_field(grid, [=](double x) { return gg * (1.0 + 0.4 * std::cos(2.0 * kPi * x + p2)); });
    c.mu = sample_field(grid, [=](double) { return mm; });
    c.lambda = sample_field(grid, [=](double x) { return ll * (1.0 + 0.4 * std::sin(4.0 * kPi * x + p3)); });
    c.total_mass = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    return c;
}

} // namespace

TEST_CASE("dfe profile: constant recruitment gives constant profile") {
    auto grid = build_grid(100);
    for (double d_S : {1e-6, 1e-2, 1.0, 1e3}) {
        auto c = preset_fig0a(grid);
        Field s = solve_dfe(d_S, c, grid);
        for (int i = 0; i < grid->n_nodes(); ++i)
            CHECK(s[i] == doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_CASE("dfe profile matches the exact discrete resolvent of a cosine mode") {
    // cos(2*pi*x) is a discrete Neumann eigenvector with eigenvalue
    // -(2 - 2 cos(2*pi*h))/h^2, so the solved profile has a closed form.
    auto grid = build_grid(128);
    double h = grid->h;
    double lam_h = (2.0 - 2.0 * std::cos(2.0 * kPi * h)) / (h * h);
    for (double d_S : {1e-3, 0.05, 1.0}) {
        CoefficientSet c = coeffs_from_expressions(grid, "2 + cos(2*pi*x)", "1", "1", "1");
        Field s = solve_dfe(d_S, c, grid);
        double amp = 1.0 / (1.0 + d_S * lam_h);
        for (int i = 0; i < grid->n_nodes(); ++i) {
            double want = 2.0 + amp * std::cos(2.0 * kPi * grid->nodes[static_cast<std::size_t>(i)]);
            CHECK(s[i] == doctest::Approx(want).epsilon(1e-11));
        }
    }
}

TEST_CASE("dfe profile converges uniformly to the recruitment as d_S shrinks") {
    auto grid = build_grid(400);
    CoefficientSet c = coeffs_from_expressions(grid, "2 + cos(2*pi*x)", "1", "1", "1");
    auto dist = [&](double d_S) {
        Field s = solve_dfe(d_S, c, grid);
        double m = 0.0;
        for (int i = 0; i < grid->n_nodes(); ++i)
            m = std::max(m, std::abs(s[i] - c.lambda[i]));
        return m;
    };
    double at_1em6 = dist(1e-6);
    CHECK(at_1em6 <= 0.05);
    CHECK(dist(1e-7) < dist(1e-5));
    CHECK(dist(1e-5) < dist(1e-3));
}

TEST_CASE("dfe profile conserves the recruitment mass identity") {
    auto grid = build_grid(200);
    std::mt19937_64 rng(99);
    for (int k = 0; k < 10; ++k) {
        CoefficientSet c = random_set(grid, rng);
        double d_S = std::exp(std::uniform_real_distribution<double>(std::log(1e-4), std::log(1e2))(rng));
        Field s = solve_dfe(d_S, c, grid);
        CHECK(min_value(s) > 0.0);
        Field diff = make_field(grid, 0.0);
        for (int i = 0; i < grid->n_nodes(); ++i)
            diff[i] = c.lambda[i] - s[i];
        CHECK(std::abs(integrate(grid, diff)) <= 1e-11 * integrate(grid, c.lambda));
    }
}

TEST_CASE("dfe input validation") {
    auto grid = build_grid(16);
    auto c = preset_fig0a(grid);
    CHECK_THROWS_AS((void)solve_dfe(0.0, c, grid), ValidationError);
    CHECK_THROWS_AS((void)solve_dfe(-1.0, c, grid), ValidationError);
    auto other = build_grid(16);
    CHECK_THROWS_AS((void)solve_dfe(1.0, c, other), ValidationError);
}

TEST_CASE("principal eigenpair: constant potential is exact") {
    auto grid = build_grid(100);
    for (double d_I : {1e-3, 1.0, 50.0}) {
        for (double q0 : {-2.0, 0.5, 3.0}) {
            Field q = make_field(grid, q0);
            EigenResult r = principal_eigenpair(d_I, q, grid);
            double scale = 4.0 * d_I / (grid->h * grid->h) + std::abs(q0);
            CHECK(std::abs(r.eigenvalue + q0) <= 1e-12 * scale + 1e-13);
            for (int i = 0; i < grid->n_nodes(); ++i)
                CHECK(r.eigenfunction[i] == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(r.iterations > 0);
        }
    }
}

TEST_CASE("principal eigenpair: homogeneous threshold potential") {
    auto grid = build_grid(64);
    auto c = preset_homogeneous(grid, 3.0, 1.0, 1.0, 1.0);
    Field dfe = solve_dfe(0.7, c, grid);
    Field q = make_field(grid, 0.0);
    for (int i = 0; i < grid->n_nodes(); ++i)
        q[i] = c.beta[i] * dfe[i] - c.gamma[i] - c.mu[i]; // = 3 - 2 = 1
    EigenResult r = principal_eigenpair(2.0, q, grid);
    CHECK(r.eigenvalue == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("principal eigenpair agrees with a dense Jacobi oracle") {
    auto grid = build_grid(40);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uq(-3.0, 3.0);
    for (double d_I : {0.01, 0.5, 20.0}) {
        Field q = sample_field(grid, [&](double) { return uq(rng); });
        EigenResult r = principal_eigenpair(d_I, q, grid);

        auto K = dense_weighted_stiffness(grid);
        int n = grid->n_nodes();
        std::vector<std::vector<double>> T(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::size_t si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
                double wi = grid->weights[si], wj = grid->weights[sj];
                T[si][sj] = d_I * K[si][sj] / std::sqrt(wi * wj);
                if (i == j)
                    T[si][sj] -= q[i];
            }
        auto evs = oracle::jacobi_eigenvalues(T);
        double scale = 4.0 * d_I / (grid->h * grid->h) + 3.0;
        CHECK(std::abs(r.eigenvalue - evs.front()) <= 1e-11 * scale);
        CHECK(min_value(r.eigenfunction) > 0.0);
        CHECK(max_value(r.eigenfunction) == 1.0);
        CHECK(r.residual <= 1e-11 * scale);
    }
}

TEST_CASE("principal eigenvalue is monotone in the potential") {
    auto grid = build_grid(64);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uq(-2.0, 2.0), ub(0.0, 1.5);
    for (int k = 0; k < 20; ++k) {
        Field q1 = sample_field(grid, [&](double) { return uq(rng); });
        Field q2 = q1;
        for (int i = 0; i < grid->n_nodes(); ++i)
            q2[i] += ub(rng);
        double d_I = std::exp(std::uniform_real_distribution<double>(std::log(0.01), std::log(10.0))(rng));
        EigenResult r1 = principal_eigenpair(d_I, q1, grid);
        EigenResult r2 = principal_eigenpair(d_I, q2, grid);
        double scale = 4.0 * d_I / (grid->h * grid->h) + 4.0;
        CHECK(r2.eigenvalue <= r1.eigenvalue + 1e-10 * scale);
    }
}

TEST_CASE("principal eigenpair input validation") {
    auto grid = build_grid(16);
    Field q = make_field(grid, 1.0);
    CHECK_THROWS_AS((void)principal_eigenpair(0.0, q, grid), ValidationError);
    auto other = build_grid(16);
    CHECK_THROWS_AS((void)principal_eigenpair(1.0, q, other), ValidationError);
}

TEST_CASE("reproduction number: homogeneous closed form") {
    auto grid = build_grid(64);
    auto c = preset_homogeneous(grid, 3.0, 1.0, 1.0, 1.0);
    for (double d_I : {1e-3, 1.0, 1e3}) {
        for (double d_S : {0.1, 1.0}) {
            R0Result r = compute_r0(ModelKind::MW, d_I, d_S, c, grid);
            CHECK(r.value == doctest::Approx(1.5).epsilon(1e-10));
            CHECK(r.model == ModelKind::MW);
            CHECK(r.d_I == d_I);
            REQUIRE(r.d_S.has_value());
            CHECK(*r.d_S == d_S);
        }
    }
    auto low = preset_homogeneous(grid, 3.0, 0.5, 1.0, 1.0);
    CHECK(compute_r0(ModelKind::MW, 1.0, 1.0, low, grid).value ==
          doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("reproduction number agrees with a dense pencil oracle") {
    auto grid = build_grid(40);
    auto coeffs = preset_fig0a(grid);
    for (ModelKind kind : {ModelKind::MW, ModelKind::SO, ModelKind::MO}) {
        for (double d_I : {0.05, 1.0}) {
            double d_S = 0.3;
            R0Result r = compute_r0(kind, d_I, d_S, coeffs, grid);

            R0Potentials pots = r0_potentials(kind, d_S, coeffs, grid);
            auto K = dense_weighted_stiffness(grid);
            int n = grid->n_nodes();
            std::vector<std::vector<double>> S(static_cast<std::size_t>(n),
                                               std::vector<double>(static_cast<std::size_t>(n), 0.0));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::size_t si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
                    double bi = grid->weights[si] * pots.b[i];
                    double bj = grid->weights[sj] * pots.b[j];
                    double a = d_I * K[si][sj];
                    if (i == j)
                        a += grid->weights[si] * pots.c[i];
                    S[si][sj] = a / std::sqrt(bi * bj);
                }
            auto evs = oracle::jacobi_eigenvalues(S);
            CHECK(r.value == doctest::Approx(1.0 / evs.front()).epsilon(1e-11));
        }
    }
}

namespace {

// Rayleigh quotient of the weighted pencil evaluated in extended precision,
// written against the raw arrays so it shares nothing with the library path.
double quotient_ld(const R0Potentials& pots, double d_I, const Field& phi, const GridPtr& grid) {
    int n = grid->n_nodes();
    long double h = grid->h;
    long double num = 0.0L, den = 0.0L;
    for (int i = 0; i < n; ++i) {
        long double w = (i == 0 || i == n - 1) ? h / 2.0L : h;
        long double p = phi[i];
        num += w * static_cast<long double>(pots.b[i]) * p * p;
        den += w * static_cast<long double>(pots.c[i]) * p * p;
    }
    for (int i = 0; i + 1 < n; ++i) {
        long double d = static_cast<long double>(phi[i + 1]) - phi[i];
        den += static_cast<long double>(d_I) * d * d / h;
    }
    return static_cast<double>(num / den);
}

} // namespace

TEST_CASE("reproduction number maximizer attains the value and beats rival profiles") {
    auto grid = build_grid(100);
    auto coeffs = preset_fig0a(grid);
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    for (ModelKind kind : {ModelKind::MW, ModelKind::MO, ModelKind::SO, ModelKind::SW}) {
        for (double d_I : {1e-3, 1.0, 1e3}) {
            double d_S = 0.5;
            R0Result r = compute_r0(kind, d_I, d_S, coeffs, grid);
            R0Potentials pots = r0_potentials(kind, d_S, coeffs, grid);
            CHECK(std::abs(quotient_ld(pots, d_I, r.maximizer, grid) - r.value) <=
                  1e-12 * r.value);
            CHECK(min_value(r.maximizer) > 0.0);
            CHECK(max_value(r.maximizer) == 1.0);
            CHECK(r.value > 0.0);
            // The value is the supremum of the quotient: no rival profile exceeds it.
            for (int trial = 0; trial < 8; ++trial) {
                Field rival = make_field(grid, 0.0);
                for (int i = 0; i < rival.size(); ++i) rival[i] = unif(rng);
                CHECK(quotient_ld(pots, d_I, rival, grid) <= r.value * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("standard-incidence value exceeds the integral-ratio bound on fig0a") {
    auto grid = build_grid(200);
    auto coeffs = preset_fig0a(grid);
    for (double d_I : {1e-2, 1.0, 1e2})
        CHECK(compute_r0(ModelKind::SO, d_I, 1.0, coeffs, grid).value > 1.25);
}

TEST_CASE("conserved mass-action value equals the standard value at unit mass") {
    auto grid = build_grid(128);
    auto coeffs = preset_fig0a(grid); // total_mass = 1, |domain| = 1
    for (double d_I : {1e-2, 1.0, 1e2}) {
        R0Result mo = compute_r0(ModelKind::MO, d_I, 1.0, coeffs, grid);
        R0Result so = compute_r0(ModelKind::SO, d_I, 1.0, coeffs, grid);
        CHECK(mo.value == so.value); // bitwise: identical pencils by construction
        CHECK_FALSE(mo.d_S.has_value());
    }
    auto no_mass = preset_homogeneous(grid, 3.0, 1.0, 1.0, 1.0);
    CHECK_THROWS_AS((void)compute_r0(ModelKind::MO, 1.0, 1.0, no_mass, grid), ValidationError);
}

TEST_CASE("only the birth-death mass-action value depends on d_S") {
    auto grid = build_grid(100);
    CoefficientSet het = coeffs_from_expressions(grid, "2 + cos(2*pi*x)", "1.5 + sin(2*pi*x)",
                                                 "1.2 + cos(2*pi*x)", "0.5 + x", 1.0);
    double d_I = 0.7;
    for (ModelKind kind : {ModelKind::MO, ModelKind::SO, ModelKind::SW}) {
        R0Result a = compute_r0(kind, d_I, 0.1, het, grid);
        R0Result b = compute_r0(kind, d_I, 1.0, het, grid);
        R0Result c = compute_r0(kind, d_I, 10.0, het, grid);
        CHECK(a.value == b.value);
        CHECK(b.value == c.value);
    }
    R0Result a = compute_r0(ModelKind::MW, d_I, 0.1, het, grid);
    R0Result b = compute_r0(ModelKind::MW, d_I, 10.0, het, grid);
    CHECK(a.value != b.value);
}

TEST_CASE("reproduction number decreases in d_I and is flat for homogeneous data") {
    auto grid = build_grid(200);
    auto coeffs = preset_fig0a(grid);
    double prev = 0.0;
    bool first = true;
    for (double d_I = 1e-3; d_I <= 1e3 + 1.0; d_I *= 10.0) {
        double v = compute_r0(ModelKind::MW, d_I, 1.0, coeffs, grid).value;
        if (!first)
            CHECK(v < prev);
        prev = v;
        first = false;
    }
    auto hom = preset_homogeneous(grid, 3.0, 1.0, 1.0, 1.0);
    double base = compute_r0(ModelKind::MW, 1e-3, 1.0, hom, grid).value;
    for (double d_I = 1e-2; d_I <= 1e3 + 1.0; d_I *= 10.0)
        CHECK(compute_r0(ModelKind::MW, d_I, 1.0, hom, grid).value ==
              doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("sign of R0 - 1 is opposite to the sign of the principal eigenvalue") {
    auto grid = build_grid(80);
    std::mt19937_64 rng(31337);
    int checked = 0;
    for (int k = 0; k < 20; ++k) {
        CoefficientSet c = random_set(grid, rng);
        for (double d_I : {0.01, 0.1, 1.0, 10.0}) {
            for (ModelKind kind : {ModelKind::MW, ModelKind::MO, ModelKind::SO, ModelKind::SW}) {
                double r0 = compute_r0(kind, d_I, 1.0, c, grid).value;
                if (std::abs(r0 - 1.0) <= 1e-6)
                    continue;
                double ls = lambda_star(kind, d_I, 1.0, c, grid).eigenvalue;
                INFO("kind ", model_name(kind), " d_I ", d_I, " R0 ", r0, " lambda* ", ls);
                CHECK(((r0 > 1.0 && ls < 0.0) || (r0 < 1.0 && ls > 0.0)));
                ++checked;
            }
        }
    }
    CHECK(checked > 100); // the filter must not eat the sample
}

TEST_CASE("closed-form diffusion limits of the reproduction number") {
    auto grid = build_grid(400);
    auto hom = preset_homogeneous(grid, 3.0, 1.0, 1.0, 1.0);
    R0Limits lh = r0_limits(ModelKind::MW, 1.0, hom, grid);
    CHECK(lh.low == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(lh.high == doctest::Approx(1.5).epsilon(1e-14));

    auto coeffs = preset_fig0a(grid);
    R0Limits lso = r0_limits(ModelKind::SO, 1.0, coeffs, grid);
    CHECK(lso.high == doctest::Approx(1.25).epsilon(1e-12));

    // nodal maximum of b/c computed directly
    double d_S = 1e-3;
    R0Potentials pots = r0_potentials(ModelKind::MW, d_S, coeffs, grid);
    double want_low = 0.0;
    for (int i = 0; i < grid->n_nodes(); ++i)
        want_low = std::max(want_low, pots.b[i] / pots.c[i]);
    R0Limits lmw = r0_limits(ModelKind::MW, d_S, coeffs, grid);
    CHECK(lmw.low == want_low);
    CHECK(lmw.high == doctest::Approx(integrate(grid, pots.b) / integrate(grid, pots.c))
                          .epsilon(1e-15));

    // finite-diffusivity values approach the limits
    CHECK(compute_r0(ModelKind::MW, 1e-6, d_S, coeffs, grid).value ==
          doctest::Approx(lmw.low).epsilon(0.02));
    CHECK(compute_r0(ModelKind::MW, 1e6, d_S, coeffs, grid).value ==
          doctest::Approx(lmw.high).epsilon(0.02));
}

TEST_CASE("threshold diffusivity: bisection agrees with a dense scan") {
    auto grid = build_grid(128);
    // engineered so b - c changes sign and ∫b < ∫c: recruitment 3, death 2.2
    // (recovery 1), transmission 1 + 0.9 sin(2*pi*x): potential in [-2.9, 2.5],
    // means 3 < 3.2
    CoefficientSet c = coeffs_from_expressions(grid, "3", "1 + 0.9*sin(2*pi*x)", "1", "2.2");

    double dstar = find_threshold_di(ModelKind::MW, 1.0, c, grid, {1e-2, 1e2});
    double r_at = compute_r0(ModelKind::MW, dstar, 1.0, c, grid).value;
    CHECK(std::abs(r_at - 1.0) <= 1e-8);
    CHECK(std::abs(lambda_star(ModelKind::MW, dstar, 1.0, c, grid).eigenvalue) <= 1e-6);

    // dense scan: strictly decreasing, exactly one crossing, and it brackets dstar
    double prev = 0.0;
    int crossings = 0;
    double lo_cross = 0.0, hi_cross = 0.0;
    bool first = true;
    for (int k = 0; k <= 12; ++k) {
        double d_I = 1e-3 * std::pow(10.0, 0.5 * k);
        double v = compute_r0(ModelKind::MW, d_I, 1.0, c, grid).value;
        if (!first) {
            CHECK(v < prev);
            if (prev > 1.0 && v <= 1.0) {
                ++crossings;
                lo_cross = d_I / std::sqrt(10.0);
                hi_cross = d_I;
            }
        }
        prev = v;
        first = false;
    }
    CHECK(crossings == 1);
    CHECK(dstar >= lo_cross);
    CHECK(dstar <= hi_cross);

    // auto-expansion finds the crossing from a bad initial bracket
    double dstar2 = find_threshold_di(ModelKind::MW, 1.0, c, grid, {1e-4, 2e-4});
    CHECK(std::abs(compute_r0(ModelKind::MW, dstar2, 1.0, c, grid).value - 1.0) <= 1e-8);
}

TEST_CASE("threshold diffusivity refuses one-sided configurations") {
    auto grid = build_grid(64);

    // potential positive everywhere: R0 > 1 for every d_I
    auto hom = preset_homogeneous(grid, 3.0, 1.0, 1.0, 1.0);
    CHECK_THROWS_WITH_AS((void)find_threshold_di(ModelKind::MW, 1.0, hom, grid, {1e-2, 1e2}),
                         doctest::Contains("every d_I"), ValidationError);

    // potential negative everywhere: R0 < 1 for every d_I
    auto low = preset_homogeneous(grid, 1.0, 0.5, 1.0, 1.0);
    CHECK_THROWS_WITH_AS((void)find_threshold_di(ModelKind::MW, 1.0, low, grid, {1e-2, 1e2}),
                         doctest::Contains("every d_I"), ValidationError);

    // sign change but ∫b > ∫c: still no crossing (fig0a data)
    auto coeffs = preset_fig0a(grid);
    CHECK_THROWS_WITH_AS((void)find_threshold_di(ModelKind::MW, 1.0, coeffs, grid, {1e-2, 1e2}),
                         doctest::Contains("∫b"), ValidationError);

    // malformed bracket
    CoefficientSet ok = coeffs_from_expressions(grid, "3", "1 + 0.9*sin(2*pi*x)", "1", "2.2");
    CHECK_THROWS_AS((void)find_threshold_di(ModelKind::MW, 1.0, ok, grid, {2.0, 1.0}),
                    ValidationError);
}
