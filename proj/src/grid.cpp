#include "sislab/grid.hpp"

#include <cmath>
#include <string>

#include "sislab/errors.hpp"

namespace sislab {

GridPtr build_grid(int n_cells, double length) {
    if (n_cells < 4)
        throw ValidationError("build_grid: n_cells must be at least 4, got " +
                              std::to_string(n_cells));
    if (!(length > 0.0) || !std::isfinite(length))
        throw ValidationError("build_grid: length must be positive and finite");

    auto g = std::make_shared<Grid>();
    g->n_cells = n_cells;
    g->length = length;
    g->h = length / n_cells;
    g->nodes.resize(static_cast<size_t>(n_cells) + 1);
    g->weights.resize(static_cast<size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) {
        g->nodes[static_cast<size_t>(i)] = i * g->h;
        g->weights[static_cast<size_t>(i)] = (i == 0 || i == n_cells) ? 0.5 * g->h : g->h;
    }
    // Pin the endpoints so nodes span [0, length] exactly.
    g->nodes.back() = length;
    return g;
}

Field make_field(const GridPtr& grid, double fill) {
    if (!grid) throw ValidationError("make_field: null grid");
    if (!std::isfinite(fill)) throw ValidationError("make_field: non-finite fill value");
    return Field{grid, std::vector<double>(static_cast<size_t>(grid->n_nodes()), fill)};
}

Field sample_field(const GridPtr& grid, const std::function<double(double)>& f) {
    if (!grid) throw ValidationError("sample_field: null grid");
    Field out{grid, std::vector<double>(static_cast<size_t>(grid->n_nodes()))};
    for (int i = 0; i < grid->n_nodes(); ++i) {
        double v = f(grid->nodes[static_cast<size_t>(i)]);
        if (!std::isfinite(v))
            throw ValidationError("sample_field: sampled non-finite value at node " +
                                  std::to_string(i));
        out[i] = v;
    }
    return out;
}

void require_bound(const GridPtr& grid, const Field& f, const char* what) {
    if (!grid) throw ValidationError(std::string(what) + ": null grid");
    if (f.grid.get() != grid.get())
        throw ValidationError(std::string(what) + ": field is bound to a different grid");
    if (f.size() != grid->n_nodes())
        throw ValidationError(std::string(what) + ": field size does not match grid");
    for (int i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i]))
            throw ValidationError(std::string(what) + ": non-finite value at node " +
                                  std::to_string(i));
}

double max_value(const Field& f) {
    double m = f[0];
    for (int i = 1; i < f.size(); ++i) m = std::max(m, f[i]);
    return m;
}

double min_value(const Field& f) {
    double m = f[0];
    for (int i = 1; i < f.size(); ++i) m = std::min(m, f[i]);
    return m;
}

namespace {

// Neumaier compensated summation: keeps quadrature cancellation error at the
// level of a couple of ulps of the largest partial term, independent of n.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace

double integrate(const GridPtr& grid, const Field& f) {
    require_bound(grid, f, "integrate");
    CompensatedSum s;
    for (int i = 0; i < f.size(); ++i)
        s.add(grid->weights[static_cast<size_t>(i)] * f[i]);
    return s.value();
}

double weighted_dot(const GridPtr& grid, const Field& u, const Field& v) {
    require_bound(grid, u, "weighted_dot");
    require_bound(grid, v, "weighted_dot");
    CompensatedSum s;
    for (int i = 0; i < u.size(); ++i)
        s.add(grid->weights[static_cast<size_t>(i)] * u[i] * v[i]);
    return s.value();
}

double dirichlet_energy(const GridPtr& grid, const Field& u) {
    require_bound(grid, u, "dirichlet_energy");
    CompensatedSum s;
    for (int i = 0; i + 1 < u.size(); ++i) {
        double d = u[i + 1] - u[i];
        s.add(d * d / grid->h);
    }
    return s.value();
}

NeumannLaplacian make_neumann_laplacian(const GridPtr& grid) {
    if (!grid) throw ValidationError("make_neumann_laplacian: null grid");
    int n = grid->n_nodes();
    double ih2 = 1.0 / (grid->h * grid->h);
    NeumannLaplacian lap;
    lap.grid = grid;
    lap.sub.assign(static_cast<size_t>(n), ih2);
    lap.diag.assign(static_cast<size_t>(n), -2.0 * ih2);
    lap.sup.assign(static_cast<size_t>(n), ih2);
    lap.sub.front() = 0.0;        // row 0 has no left neighbour
    lap.sup.front() = 2.0 * ih2;  // ghost reflection u_{-1} = u_1
    lap.sup.back() = 0.0;
    lap.sub.back() = 2.0 * ih2;   // ghost reflection u_{n+1} = u_{n-1}
    return lap;
}

Field apply_laplacian(const NeumannLaplacian& lap, const Field& u) {
    require_bound(lap.grid, u, "apply_laplacian");
    int n = u.size();
    Field out{lap.grid, std::vector<double>(static_cast<size_t>(n))};
    for (int i = 0; i < n; ++i) {
        double v = lap.diag[static_cast<size_t>(i)] * u[i];
        if (i > 0) v += lap.sub[static_cast<size_t>(i)] * u[i - 1];
        if (i + 1 < n) v += lap.sup[static_cast<size_t>(i)] * u[i + 1];
        out[i] = v;
    }
    return out;
}

} // namespace sislab
