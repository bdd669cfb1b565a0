#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sislab/coeffs.hpp"
#include "sislab/csv.hpp"
#include "sislab/errors.hpp"
#include "sislab/expr.hpp"

using namespace sislab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("expression evaluator matches direct evaluation") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> ux(0.0, 1.0);

    struct Case {
        const char* text;
        double (*fn)(double);
    };
    const Case cases[] = {
        {"1.5 + sin(2*pi*x)", [](double x) { return 1.5 + std::sin(2.0 * kPi * x); }},
        {"1.2 + cos(2*pi*x)", [](double x) { return 1.2 + std::cos(2.0 * kPi * x); }},
        {"(x+1)^2 / (3 - x)", [](double x) { return std::pow(x + 1.0, 2.0) / (3.0 - x); }},
        {"max(0, x - 0.5) + min(x, 0.25)",
         [](double x) { return std::max(0.0, x - 0.5) + std::min(x, 0.25); }},
        {"-x^2 + 2^-2", [](double x) { return -std::pow(x, 2.0) + std::pow(2.0, -2.0); }},
        {"exp(-abs(x - 0.3)) * sqrt(x + 4)",
         [](double x) { return std::exp(-std::abs(x - 0.3)) * std::sqrt(x + 4.0); }},
        {"log(e) + tan(x/4)", [](double x) { return 1.0 + std::tan(x / 4.0); }},
        {"pow(x + 1, 3)", [](double x) { return std::pow(x + 1.0, 3.0); }},
        {"1 - 2 - 3 * x", [](double x) { return 1.0 - 2.0 - 3.0 * x; }},
        {"12 / 4 / 3", [](double) { return 1.0; }},
    };
    for (const auto& c : cases) {
        Expression e = Expression::parse(c.text);
        for (int k = 0; k < 50; ++k) {
            double x = ux(rng);
            double want = c.fn(x);
            INFO("expr: ", c.text, " at x = ", x);
            CHECK(e.eval(x) == doctest::Approx(want).epsilon(1e-14));
        }
    }
    CHECK(Expression::parse("pi").eval(0.5) == doctest::Approx(kPi).epsilon(1e-16));
}

TEST_CASE("expression parser rejects malformed input") {
    const char* bad[] = {"1.5 +", "sin(", "foo(x)", "x 3", "()", "", "min(1)", "2 ** 3",
                         "cos(x))", "x + @"};
    for (const char* text : bad) {
        INFO("expr: ", text);
        CHECK_THROWS_AS((void)Expression::parse(text), ValidationError);
    }
}

TEST_CASE("full-precision csv formatting round-trips doubles") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        double v = u(rng) * std::pow(10.0, (k % 13) - 6);
        CHECK(csvio::parse_double(csvio::format_full(v), "v") == v);
    }
    CHECK(csvio::format_full(0.1) == "0.1");
    CHECK(csvio::format_full(3.0) == "3");
    CHECK_THROWS_AS((void)csvio::parse_double("1.2.3", "v"), ValidationError);
    CHECK_THROWS_AS((void)csvio::parse_double("abc", "v"), ValidationError);
    CHECK_THROWS_AS((void)csvio::parse_double("1.5x", "v"), ValidationError);
}

TEST_CASE("csv table reader splits cells and skips comments") {
    std::istringstream in("# comment\n a,b , c\n\n1, 2,3\n");
    auto rows = csvio::read_table(in);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("fig0a preset samples its closed forms") {
    auto grid = build_grid(400);
    auto c = preset_fig0a(grid);

    CHECK(c.beta[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(c.gamma[0] == doctest::Approx(2.2).epsilon(1e-15));
    CHECK(c.lambda[0] == 3.0);
    CHECK(c.mu[0] == doctest::Approx(0.5).epsilon(1e-15));

    // x = 0.25 is node 100 on this grid
    CHECK(grid->nodes[100] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(c.beta[100] == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(c.gamma[100] == doctest::Approx(1.2).epsilon(1e-14));

    CHECK(min_value(c.beta) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(min_value(c.gamma) == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(c.total_mass.has_value());
    CHECK(*c.total_mass == 1.0);
    CHECK_NOTHROW(validate_coeffs(c, grid));
    CHECK_FALSE(is_homogeneous(c));
}

TEST_CASE("fig0a integrals of beta and gamma hit their means") {
    // The oscillating parts integrate to zero over a full period, so the
    // integrals equal the constant offsets; the trapezoid rule is exact for
    // periodic smooth integrands up to rounding.
    auto grid = build_grid(400);
    auto c = preset_fig0a(grid);
    CHECK(integrate(grid, c.beta) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(integrate(grid, c.gamma) == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("moderate preset matches its piecewise definition") {
    auto grid = build_grid(16);
    auto c = preset_moderate(grid);

    auto at = [&](double x) -> int {
        for (int i = 0; i < grid->n_nodes(); ++i)
            if (std::abs(grid->nodes[static_cast<std::size_t>(i)] - x) < 1e-14)
                return i;
        FAIL("node not found");
        return 0;
    };
    CHECK(c.beta[at(0.0)] == 1.0);
    CHECK(c.gamma[at(0.0)] == 1.5);
    CHECK(c.beta[at(0.25)] == 1.0);
    CHECK(c.gamma[at(0.25)] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.beta[at(0.5)] == 1.0);
    CHECK(c.gamma[at(0.5)] == 1.0);
    CHECK(c.beta[at(0.75)] == 1.0);
    CHECK(c.gamma[at(0.75)] == 1.0);
    CHECK(c.beta[at(1.0)] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(c.gamma[at(1.0)] == 1.0);
    CHECK(c.lambda[at(0.5)] == 3.0);
    CHECK(c.mu[at(0.5)] == 1.0);
    CHECK_NOTHROW(validate_coeffs(c, grid));

    // Trapezoid quadrature is exact for piecewise-linear data whose
    // breakpoints are nodes; both integrals are 1.0625 analytically.
    auto fine = build_grid(400);
    auto cf = preset_moderate(fine);
    CHECK(integrate(fine, cf.beta) == doctest::Approx(1.0625).epsilon(1e-13));
    CHECK(integrate(fine, cf.gamma) == doctest::Approx(1.0625).epsilon(1e-13));
}

TEST_CASE("moderate preset requires breakpoint-aligned grids") {
    CHECK_THROWS_WITH_AS((void)preset_moderate(build_grid(10)),
                         doctest::Contains("divisible by 4"), ValidationError);
    CHECK_NOTHROW((void)preset_moderate(build_grid(12)));
}

TEST_CASE("homogeneous preset validates constants and builds constant fields") {
    auto grid = build_grid(32);
    auto c = preset_homogeneous(grid, 3.0, 1.0, 1.0, 1.0);
    CHECK(is_homogeneous(c));
    CHECK(max_value(c.lambda) == 3.0);
    CHECK(min_value(c.lambda) == 3.0);
    CHECK_FALSE(c.total_mass.has_value());

    CHECK_THROWS_AS((void)preset_homogeneous(grid, 1.0, 1.0, 1.0, -1.0), ValidationError);
    CHECK_THROWS_AS((void)preset_homogeneous(grid, 0.0, 1.0, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS((void)preset_homogeneous(grid, 1.0, -2.0, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS((void)preset_homogeneous(grid, 1.0, 1.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS((void)preset_homogeneous(grid, 3.0, 1.0, 1.0, 1.0, -2.0), ValidationError);
}

TEST_CASE("risk classification partitions nodes by sign of beta minus gamma") {
    auto grid = build_grid(100);

    auto cf = preset_fig0a(grid);
    auto rf = classify_risk(cf);
    CHECK(!rf.low_risk.empty());
    CHECK(!rf.high_risk.empty());
    CHECK(static_cast<int>(rf.low_risk.size() + rf.high_risk.size() + rf.moderate.size()) ==
          grid->n_nodes());
    for (int i : rf.high_risk)
        CHECK(cf.beta[i] > cf.gamma[i]);
    for (int i : rf.low_risk)
        CHECK(cf.beta[i] < cf.gamma[i]);

    auto cm = preset_moderate(grid);
    auto rm = classify_risk(cm, 1e-12);
    // plateau where beta == gamma == 1 is exactly [0.25, 0.75]: indices 25..75
    REQUIRE(rm.moderate.size() == 51);
    CHECK(rm.moderate.front() == 25);
    CHECK(rm.moderate.back() == 75);
    for (int i : rm.high_risk)
        CHECK(grid->nodes[static_cast<std::size_t>(i)] > 0.75);
    for (int i : rm.low_risk)
        CHECK(grid->nodes[static_cast<std::size_t>(i)] < 0.25);

    auto ch = preset_homogeneous(grid, 1.0, 2.0, 1.0, 1.0);
    auto rh = classify_risk(ch);
    CHECK(static_cast<int>(rh.high_risk.size()) == grid->n_nodes());
    CHECK(rh.low_risk.empty());
    CHECK(rh.moderate.empty());

    CHECK_THROWS_AS((void)classify_risk(cf, -1.0), ValidationError);
}

TEST_CASE("risk tolerance forms a dead band") {
    auto grid = build_grid(8);
    auto c = preset_homogeneous(grid, 1.0, 1.0 + 1e-10, 1.0, 1.0);
    CHECK(static_cast<int>(classify_risk(c, 1e-9).moderate.size()) == grid->n_nodes());
    CHECK(static_cast<int>(classify_risk(c, 1e-11).high_risk.size()) == grid->n_nodes());
}

TEST_CASE("coefficients from expression strings match the preset formulas") {
    auto grid = build_grid(64);
    auto want = preset_fig0a(grid, std::nullopt);
    auto got = coeffs_from_expressions(grid, "3", "1.5 + sin(2*pi*x)", "1.2 + cos(2*pi*x)",
                                       "0.5 + x");
    for (int i = 0; i < grid->n_nodes(); ++i) {
        CHECK(got.lambda[i] == want.lambda[i]);
        CHECK(got.beta[i] == doctest::Approx(want.beta[i]).epsilon(1e-15));
        CHECK(got.gamma[i] == doctest::Approx(want.gamma[i]).epsilon(1e-15));
        CHECK(got.mu[i] == want.mu[i]);
    }
    CHECK_FALSE(got.total_mass.has_value());

    // positivity and finiteness are enforced at load
    CHECK_THROWS_AS((void)coeffs_from_expressions(grid, "3", "x - 0.5", "1", "1"),
                    ValidationError);
    CHECK_THROWS_AS((void)coeffs_from_expressions(grid, "3", "1", "log(x)", "1"),
                    ValidationError);
}

TEST_CASE("total mass accessor reports missing mass by caller") {
    auto grid = build_grid(8);
    auto with = preset_fig0a(grid, 2.5);
    CHECK(require_total_mass(with, "conserved-mass run") == 2.5);
    auto without = preset_homogeneous(grid, 1.0, 1.0, 1.0, 1.0);
    CHECK_THROWS_WITH_AS((void)require_total_mass(without, "conserved-mass run"),
                         doctest::Contains("conserved-mass run"), ValidationError);
}

TEST_CASE("coefficient csv round-trips bitwise and validates its contract") {
    auto grid = build_grid(16);
    auto c = preset_fig0a(grid, std::nullopt);

    std::ostringstream out;
    save_coeffs_csv(out, c);
    std::string text = out.str();
    CHECK(text.rfind("x,lambda,beta,gamma,mu\n", 0) == 0);

    std::istringstream in(text);
    auto back = load_coeffs_csv(grid, in, 2.0);
    for (int i = 0; i < grid->n_nodes(); ++i) {
        CHECK(back.lambda[i] == c.lambda[i]);
        CHECK(back.beta[i] == c.beta[i]);
        CHECK(back.gamma[i] == c.gamma[i]);
        CHECK(back.mu[i] == c.mu[i]);
    }
    REQUIRE(back.total_mass.has_value());
    CHECK(*back.total_mass == 2.0);

    auto load_text = [&](const std::string& s) {
        std::istringstream is(s);
        return load_coeffs_csv(grid, is);
    };
    CHECK_THROWS_WITH_AS((void)load_text("x,lambda,beta,mu,gamma\n"),
                         doctest::Contains("header"), ValidationError);
    // row count mismatch: drop the last data row
    std::string short_text = text.substr(0, text.find_last_of('\n', text.size() - 2) + 1);
    CHECK_THROWS_WITH_AS((void)load_text(short_text), doctest::Contains("data rows"),
                         ValidationError);
    // perturb the first x beyond the 1e-12 gate
    std::string moved = text;
    moved.replace(moved.find("\n0,"), 3, "\n1e-9,");
    CHECK_THROWS_WITH_AS((void)load_text(moved), doctest::Contains("1e-12"), ValidationError);
    // non-numeric cell
    std::string junk = text;
    junk.replace(junk.find("\n0,") + 1, 1, "z");
    CHECK_THROWS_AS((void)load_text(junk), ValidationError);
    // negative coefficient
    std::string neg = "x,lambda,beta,gamma,mu\n";
    for (std::size_t i = 0; i < grid->nodes.size(); ++i)
        neg += csvio::format_full(grid->nodes[i]) + ",3,-1,1,1\n";
    CHECK_THROWS_WITH_AS((void)load_text(neg), doctest::Contains("beta"), ValidationError);

    CHECK_THROWS_AS((void)load_coeffs_csv_file(grid, "/nonexistent/coeffs.csv"),
                    ValidationError);
}

TEST_CASE("coefficient validation catches foreign grids") {
    auto g1 = build_grid(16);
    auto g2 = build_grid(16);
    auto c = preset_fig0a(g1);
    CHECK_THROWS_AS(validate_coeffs(c, g2), ValidationError);
}
