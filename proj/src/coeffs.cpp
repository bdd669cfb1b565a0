#include "sislab/coeffs.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "sislab/csv.hpp"
#include "sislab/errors.hpp"
#include "sislab/expr.hpp"

namespace sislab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_total_mass(const std::optional<double>& total_mass) {
    if (total_mass && !(std::isfinite(*total_mass) && *total_mass > 0.0))
        throw ValidationError("total_mass must be a finite positive number");
}

void check_positive_field(const Field& f, const char* name) {
    for (int i = 0; i < f.size(); ++i)
        if (!(f[i] > 0.0))
            throw ValidationError(std::string(name) + " must be strictly positive at every node; node " +
                                  std::to_string(i) + " has value " + std::to_string(f[i]));
}

} // namespace

CoefficientSet preset_fig0a(const GridPtr& grid, std::optional<double> total_mass) {
    check_total_mass(total_mass);
    CoefficientSet c;
    c.lambda = sample_field(grid, [](double) { return 3.0; });
    c.beta = sample_field(grid, [](double x) { return 1.5 + std::sin(2.0 * kPi * x); });
    c.gamma = sample_field(grid, [](double x) { return 1.2 + std::cos(2.0 * kPi * x); });
    c.mu = sample_field(grid, [](double x) { return 0.5 + x; });
    c.total_mass = total_mass;
    return c;
}

CoefficientSet preset_moderate(const GridPtr& grid, std::optional<double> total_mass) {
    check_total_mass(total_mass);
    if (!grid)
        throw ValidationError("preset_moderate: null grid");
    if (grid->n_cells % 4 != 0)
        throw ValidationError("preset_moderate: n_cells must be divisible by 4 so the "
                              "piecewise breakpoints at x = 0.25 and x = 0.75 fall on nodes");
    CoefficientSet c;
    c.lambda = sample_field(grid, [](double) { return 3.0; });
    c.mu = sample_field(grid, [](double x) { return 0.5 + x; });
    // Piecewise pieces are selected by node index, not by comparing floating
    // x against the breakpoints, so the plateau boundaries are classified
    // exactly (both pieces agree there anyway).
    const int q1 = grid->n_cells / 4, q3 = 3 * (grid->n_cells / 4);
    c.beta = make_field(grid, 0.0);
    c.gamma = make_field(grid, 0.0);
    for (int i = 0; i < grid->n_nodes(); ++i) {
        double x = grid->nodes[static_cast<std::size_t>(i)];
        c.beta[i] = i <= q3 ? 1.0 : 2.0 * x - 0.5;
        c.gamma[i] = i <= q1 ? 1.5 - 2.0 * x : 1.0;
    }
    c.total_mass = total_mass;
    return c;
}

CoefficientSet preset_homogeneous(const GridPtr& grid, double lambda, double beta, double gamma,
                                  double mu, std::optional<double> total_mass) {
    check_total_mass(total_mass);
    auto check = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0))
            throw ValidationError(std::string("preset_homogeneous: ") + name +
                                  " must be strictly positive, got " + std::to_string(v));
    };
    check(lambda, "lambda");
    check(beta, "beta");
    check(gamma, "gamma");
    check(mu, "mu");
    CoefficientSet c;
    c.lambda = sample_field(grid, [=](double) { return lambda; });
    c.beta = sample_field(grid, [=](double) { return beta; });
    c.gamma = sample_field(grid, [=](double) { return gamma; });
    c.mu = sample_field(grid, [=](double) { return mu; });
    c.total_mass = total_mass;
    return c;
}

CoefficientSet coeffs_from_expressions(const GridPtr& grid, const std::string& lambda,
                                       const std::string& beta, const std::string& gamma,
                                       const std::string& mu, std::optional<double> total_mass) {
    auto sample_expr = [&](const std::string& text, const char* name) {
        Expression e = Expression::parse(text);
        Field f;
        try {
            f = sample_field(grid, [&](double x) { return e.eval(x); });
        } catch (const ValidationError&) {
            throw ValidationError(std::string(name) + " expression \"" + text +
                                  "\" produced a non-finite value on the grid");
        }
        return f;
    };
    CoefficientSet c;
    c.lambda = sample_expr(lambda, "lambda");
    c.beta = sample_expr(beta, "beta");
    c.gamma = sample_expr(gamma, "gamma");
    c.mu = sample_expr(mu, "mu");
    c.total_mass = total_mass;
    validate_coeffs(c, grid);
    return c;
}

void validate_coeffs(const CoefficientSet& coeffs, const GridPtr& grid) {
    if (!grid)
        throw ValidationError("validate_coeffs: null grid");
    require_bound(grid, coeffs.lambda, "lambda");
    require_bound(grid, coeffs.beta, "beta");
    require_bound(grid, coeffs.gamma, "gamma");
    require_bound(grid, coeffs.mu, "mu");
    check_positive_field(coeffs.lambda, "lambda");
    check_positive_field(coeffs.beta, "beta");
    check_positive_field(coeffs.gamma, "gamma");
    check_positive_field(coeffs.mu, "mu");
    check_total_mass(coeffs.total_mass);
}

double require_total_mass(const CoefficientSet& coeffs, const std::string& who) {
    if (!coeffs.total_mass)
        throw ValidationError(who + " conserves the population mass and therefore needs "
                              "total_mass set on the coefficient set");
    check_total_mass(coeffs.total_mass);
    return *coeffs.total_mass;
}

bool is_homogeneous(const CoefficientSet& coeffs, double rtol) {
    auto constant = [rtol](const Field& f) {
        double lo = min_value(f), hi = max_value(f);
        double scale = std::max(std::abs(lo), std::abs(hi));
        return hi - lo <= rtol * scale;
    };
    return constant(coeffs.lambda) && constant(coeffs.beta) && constant(coeffs.gamma) &&
           constant(coeffs.mu);
}

RiskClassification classify_risk(const CoefficientSet& coeffs, double tolerance) {
    if (!(tolerance >= 0.0))
        throw ValidationError("classify_risk: tolerance must be nonnegative");
    if (coeffs.beta.size() != coeffs.gamma.size())
        throw ValidationError("classify_risk: beta and gamma sizes differ");
    RiskClassification r;
    for (int i = 0; i < coeffs.beta.size(); ++i) {
        double diff = coeffs.beta[i] - coeffs.gamma[i];
        if (std::abs(diff) <= tolerance)
            r.moderate.push_back(i);
        else if (diff > 0.0)
            r.high_risk.push_back(i);
        else
            r.low_risk.push_back(i);
    }
    return r;
}

CoefficientSet load_coeffs_csv(const GridPtr& grid, std::istream& in,
                               std::optional<double> total_mass) {
    if (!grid)
        throw ValidationError("load_coeffs_csv: null grid");
    auto rows = csvio::read_table(in);
    if (rows.empty())
        throw ValidationError("coefficient csv: empty file");
    const std::vector<std::string> expected = {"x", "lambda", "beta", "gamma", "mu"};
    if (rows.front() != expected)
        throw ValidationError("coefficient csv: header must be exactly 'x,lambda,beta,gamma,mu'");
    if (rows.size() - 1 != static_cast<std::size_t>(grid->n_nodes()))
        throw ValidationError("coefficient csv: expected " + std::to_string(grid->n_nodes()) +
                              " data rows (one per node), got " + std::to_string(rows.size() - 1));
    CoefficientSet c;
    c.lambda = make_field(grid, 0.0);
    c.beta = make_field(grid, 0.0);
    c.gamma = make_field(grid, 0.0);
    c.mu = make_field(grid, 0.0);
    for (int i = 0; i < grid->n_nodes(); ++i) {
        const auto& row = rows[static_cast<std::size_t>(i) + 1];
        if (row.size() != 5)
            throw ValidationError("coefficient csv: row " + std::to_string(i + 1) +
                                  " has " + std::to_string(row.size()) + " cells, expected 5");
        double x = csvio::parse_double(row[0], "x");
        if (std::abs(x - grid->nodes[static_cast<std::size_t>(i)]) > 1e-12)
            throw ValidationError("coefficient csv: x in row " + std::to_string(i + 1) +
                                  " is " + row[0] + " but the grid node is " +
                                  csvio::format_full(grid->nodes[static_cast<std::size_t>(i)]) +
                                  " (must match to 1e-12)");
        c.lambda[i] = csvio::parse_double(row[1], "lambda");
        c.beta[i] = csvio::parse_double(row[2], "beta");
        c.gamma[i] = csvio::parse_double(row[3], "gamma");
        c.mu[i] = csvio::parse_double(row[4], "mu");
    }
    c.total_mass = total_mass;
    validate_coeffs(c, grid);
    return c;
}

CoefficientSet load_coeffs_csv_file(const GridPtr& grid, const std::string& path,
                                    std::optional<double> total_mass) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open coefficient csv: " + path);
    return load_coeffs_csv(grid, in, total_mass);
}

void save_coeffs_csv(std::ostream& out, const CoefficientSet& coeffs) {
    const Grid& g = *coeffs.beta.grid;
    csvio::write_columns(out, {"x", "lambda", "beta", "gamma", "mu"},
                         {g.nodes, coeffs.lambda.values, coeffs.beta.values, coeffs.gamma.values,
                          coeffs.mu.values});
}

} // namespace sislab
