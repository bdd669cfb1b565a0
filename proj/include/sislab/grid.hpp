#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace sislab {

/// Uniform 1-D grid on [0, length] with nodes at the cell edges
/// (n_cells + 1 nodes).  Quadrature weights are the trapezoid rule:
/// h/2 at the two boundary nodes, h in the interior.  Immutable once
/// built; shared between fields and safe to use across threads.
struct Grid {
    int n_cells = 0;
    double length = 0.0;
    double h = 0.0;
    std::vector<double> nodes;   // nodes[i] = i * h, strictly increasing
    std::vector<double> weights; // trapezoid weights, sum == length

    int n_nodes() const { return n_cells + 1; }
    bool operator==(const Grid&) const = default;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Build a grid with n_cells >= 4 cells on [0, length], length > 0.
GridPtr build_grid(int n_cells, double length = 1.0);

/// Nodal scalar field bound to a grid.  All values must stay finite;
/// operations that combine fields require identical grid bindings.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
};

/// Constant field.
Field make_field(const GridPtr& grid, double fill);

/// Field sampled from f at the grid nodes.
Field sample_field(const GridPtr& grid, const std::function<double(double)>& f);

/// Throw ValidationError unless f is bound to grid and has one value per node
/// and every value is finite.  `what` names the offending argument.
void require_bound(const GridPtr& grid, const Field& f, const char* what);

double max_value(const Field& f);
double min_value(const Field& f);

/// Trapezoid quadrature of nodal data: sum_i w_i f_i, compensated summation.
/// Exact (to roundoff) for affine nodal data.
double integrate(const GridPtr& grid, const Field& f);

/// Weighted inner product <u, v>_w = sum_i w_i u_i v_i.
double weighted_dot(const GridPtr& grid, const Field& u, const Field& v);

/// Discrete Dirichlet energy: sum over edges of (u_{i+1} - u_i)^2 / h,
/// the quadratic form of the stiffness operator (equals <-L u, u>_w).
double dirichlet_energy(const GridPtr& grid, const Field& u);

/// Second-difference Laplacian with homogeneous Neumann closure by ghost-node
/// reflection (u_{-1} = u_1, u_{n+1} = u_{n-1}).  Stored as the three stencil
/// bands so implicit solvers can reuse them.  Weighted-symmetric:
/// <L u, v>_w = <u, L v>_w, and weighted column sums vanish, so
/// integrate(apply_laplacian(u)) = 0 — the discrete divergence theorem that
/// makes the conserved-mass models conserve exactly.
struct NeumannLaplacian {
    GridPtr grid;
    std::vector<double> sub;  // sub[i]:  coefficient of u_{i-1} in row i
    std::vector<double> diag; // diag[i]: coefficient of u_i
    std::vector<double> sup;  // sup[i]:  coefficient of u_{i+1}
};

NeumannLaplacian make_neumann_laplacian(const GridPtr& grid);

Field apply_laplacian(const NeumannLaplacian& lap, const Field& u);

} // namespace sislab
