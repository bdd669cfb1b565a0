#include "sislab/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sislab/errors.hpp"

using namespace sislab;
using std::numbers::pi;

namespace {

Field random_field(const GridPtr& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f = make_field(g, 0.0);
    for (int i = 0; i < f.size(); ++i) f[i] = u(rng);
    return f;
}

} // namespace

TEST_CASE("build_grid validates its arguments") {
    CHECK_THROWS_AS(build_grid(3), ValidationError);
    CHECK_THROWS_AS(build_grid(0), ValidationError);
    CHECK_THROWS_AS(build_grid(-4), ValidationError);
    CHECK_THROWS_AS(build_grid(10, 0.0), ValidationError);
    CHECK_THROWS_AS(build_grid(10, -1.0), ValidationError);
}

TEST_CASE("grid nodes are equispaced and weights sum to the domain length") {
    for (auto [n, len] : {std::pair{7, 1.0}, {400, 1.0}, {16, 2.5}}) {
        auto g = build_grid(n, len);
        REQUIRE(g->n_nodes() == n + 1);
        CHECK(g->nodes.front() == 0.0);
        CHECK(g->nodes.back() == len);
        for (int i = 0; i + 1 <= n; ++i) {
            double d = g->nodes[i + 1] - g->nodes[i];
            CHECK(std::abs(d - g->h) <= 4e-16 * len);
            CHECK(d > 0.0);
        }
        double wsum = 0.0;
        for (double w : g->weights) wsum += w;
        CHECK(std::abs(wsum - len) <= 1e-13 * len);
    }
}

TEST_CASE("integrate is exact for affine nodal data") {
    auto g = build_grid(37, 2.0);
    Field f = sample_field(g, [](double x) { return 3.25 - 1.75 * x; });
    double exact = 3.25 * 2.0 - 1.75 * 2.0 * 2.0 / 2.0;
    CHECK(std::abs(integrate(g, f) - exact) <= 1e-13 * std::abs(exact) + 1e-15);
}

TEST_CASE("integrate rejects fields bound to a different grid") {
    auto g1 = build_grid(20);
    auto g2 = build_grid(20); // structurally identical, distinct object
    Field f = make_field(g2, 1.0);
    CHECK_THROWS_AS(integrate(g1, f), ValidationError);
    Field short_field{g1, std::vector<double>(5, 1.0)};
    CHECK_THROWS_AS(integrate(g1, short_field), ValidationError);
}

TEST_CASE("quadrature matches a Richardson-extrapolated reference") {
    auto f = [](double x) { return (1.2 + std::cos(2 * pi * x)) / (1.5 + std::sin(2 * pi * x)); };
    double ref = oracle::richardson_reference(f, 6400);
    auto g = build_grid(800);
    double got = integrate(g, sample_field(g, f));
    CHECK(std::abs(got - ref) <= 1e-6);
}

TEST_CASE("quadrature error decays at second order for non-periodic data") {
    auto f = [](double x) { return std::exp(x); };
    double exact = std::exp(1.0) - 1.0;
    double err[3];
    int n = 50;
    for (int k = 0; k < 3; ++k, n *= 2) {
        auto g = build_grid(n);
        err[k] = std::abs(integrate(g, sample_field(g, f)) - exact);
    }
    CHECK(err[0] / err[1] > 3.5);
    CHECK(err[0] / err[1] < 4.5);
    CHECK(err[1] / err[2] > 3.5);
    CHECK(err[1] / err[2] < 4.5);
}

TEST_CASE("laplacian of x^2 is constant 2 in the interior") {
    auto g = build_grid(200);
    auto lap = make_neumann_laplacian(g);
    Field u = sample_field(g, [](double x) { return x * x; });
    Field lu = apply_laplacian(lap, u);
    for (int i = 1; i + 1 < lu.size(); ++i) CHECK(std::abs(lu[i] - 2.0) < 1e-8);
}

TEST_CASE("laplacian of cos(pi x) approximates -pi^2 cos(pi x)") {
    auto g = build_grid(400);
    auto lap = make_neumann_laplacian(g);
    Field u = sample_field(g, [](double x) { return std::cos(pi * x); });
    Field lu = apply_laplacian(lap, u);
    double max_err = 0.0;
    for (int i = 1; i + 1 < lu.size(); ++i)
        max_err = std::max(max_err, std::abs(lu[i] + pi * pi * std::cos(pi * g->nodes[i])));
    CHECK(max_err <= 1e-3);
}

// Both identities below are exact in real arithmetic.  In floating point the
// evaluated terms carry a 1/h amplification (|w_i (L u)_i| ~ 4|u|/h), so the
// achievable cancellation scales with the grid size; the 1e-12 constants hold
// with margin up to n ~ 100 and the n = 400 check uses the h-scaled floor.

TEST_CASE("laplacian is symmetric in the weighted inner product") {
    std::mt19937_64 rng(48);
    for (int n : {64, 100}) {
        auto g = build_grid(n);
        auto lap = make_neumann_laplacian(g);
        for (int trial = 0; trial < 50; ++trial) {
            Field u = random_field(g, rng), v = random_field(g, rng);
            double a = weighted_dot(g, apply_laplacian(lap, u), v);
            double b = weighted_dot(g, u, apply_laplacian(lap, v));
            CHECK(std::abs(a - b) <= 1e-12);
        }
    }
    auto g = build_grid(400);
    auto lap = make_neumann_laplacian(g);
    for (int trial = 0; trial < 50; ++trial) {
        Field u = random_field(g, rng), v = random_field(g, rng);
        double a = weighted_dot(g, apply_laplacian(lap, u), v);
        double b = weighted_dot(g, u, apply_laplacian(lap, v));
        CHECK(std::abs(a - b) <= 1e-11);
    }
}

TEST_CASE("laplacian weighted column sums vanish (discrete divergence theorem)") {
    std::mt19937_64 rng(49);
    for (int n : {64, 100}) {
        auto g = build_grid(n);
        auto lap = make_neumann_laplacian(g);
        for (int trial = 0; trial < 50; ++trial) {
            Field u = random_field(g, rng);
            double total = integrate(g, apply_laplacian(lap, u));
            double umax = std::max(std::abs(max_value(u)), std::abs(min_value(u)));
            CHECK(std::abs(total) <= 1e-12 * (umax + 1e-300));
        }
    }
    auto g = build_grid(400);
    auto lap = make_neumann_laplacian(g);
    for (int trial = 0; trial < 50; ++trial) {
        Field u = random_field(g, rng);
        double total = integrate(g, apply_laplacian(lap, u));
        double umax = std::max(std::abs(max_value(u)), std::abs(min_value(u)));
        CHECK(std::abs(total) <= 1e-11 * (umax + 1e-300));
    }
}

TEST_CASE("dirichlet energy equals the stiffness quadratic form") {
    std::mt19937_64 rng(50);
    auto g = build_grid(128);
    auto lap = make_neumann_laplacian(g);
    for (int trial = 0; trial < 20; ++trial) {
        Field u = random_field(g, rng);
        double a = dirichlet_energy(g, u);
        double b = -weighted_dot(g, apply_laplacian(lap, u), u);
        CHECK(std::abs(a - b) <= 1e-9 * (std::abs(a) + 1.0));
    }
}
