#pragma once

#include <utility>
#include <vector>

namespace sislab {

/// Thomas algorithm for tridiagonal systems without pivoting.  Only safe for
/// diagonally dominant matrices (implicit diffusion steps, resolvent solves);
/// throws SolverError on a vanishing pivot.  sub[0] and sup[n-1] are ignored.
std::vector<double> thomas_solve(const std::vector<double>& sub,
                                 const std::vector<double>& diag,
                                 const std::vector<double>& sup,
                                 std::vector<double> rhs);

/// General tridiagonal solve with partial pivoting (LU with row interchanges,
/// one fill-in superdiagonal).  Safe for indefinite matrices such as shifted
/// eigenvalue systems.  Throws SolverError if the matrix is exactly singular.
std::vector<double> gtsv_solve(std::vector<double> sub,
                               std::vector<double> diag,
                               std::vector<double> sup,
                               std::vector<double> rhs);

struct SymTridiagEigen {
    double value = 0.0;          // smallest eigenvalue
    std::vector<double> vector;  // unit 2-norm eigenvector
    int iterations = 0;          // bisection steps + inverse-iteration steps
    double residual = 0.0;       // ||T x - value x||_2
};

/// Smallest eigenpair of a symmetric tridiagonal matrix (diagonal d, n >= 1;
/// off-diagonal e, size n-1).  The eigenvalue is located by Sturm-count
/// bisection to floating-point interval width, then the eigenvector is
/// recovered by shifted inverse power iteration with the converged shift.
/// rel_tol is the residual target relative to the matrix scale.
SymTridiagEigen smallest_eigenpair_sym_tridiag(const std::vector<double>& d,
                                               const std::vector<double>& e,
                                               double rel_tol = 1e-13,
                                               int max_iterations = 400);

/// Banded LU with partial pivoting, LAPACK-style column storage, with an
/// optional dense border row/column for one-constraint bordered systems
///
///     [ A  b ] [x ]   [rhs]
///     [ c' d ] [xi] = [rho]
///
/// where A is banded (half-bandwidths kl, ku) and possibly rank-deficient by
/// one; the trailing 2x2 block is solved with complete pivoting so a tiny
/// final pivot of A is harmless as long as the bordered matrix is regular.
class BandedLU {
public:
    BandedLU(int n, int kl, int ku);

    /// Add v to A(i,j).  Only entries with -ku <= i-j <= kl are storable.
    void add(int i, int j, double v);
    void set(int i, int j, double v);
    double get(int i, int j) const;

    /// Enable bordered mode before factor().  col/row have length n.
    void set_border(std::vector<double> col, std::vector<double> row, double corner);

    void factor();

    /// Plain solve; requires factor() and no border.
    std::vector<double> solve(std::vector<double> rhs) const;

    /// Bordered solve; requires factor() and a border.
    std::pair<std::vector<double>, double> solve_bordered(std::vector<double> rhs,
                                                          double rho) const;

    int size() const { return n_; }

private:
    double& ref(int i, int j);
    double cref(int i, int j) const;
    void forward(std::vector<double>& rhs) const;

    int n_, kl_, ku_, ldab_;
    std::vector<double> ab_;     // factored band: U above, L multipliers below
    std::vector<int> ipiv_;
    bool factored_ = false;
    bool bordered_ = false;
    std::vector<double> bcol_;   // border column, overwritten by L^{-1} P b
    std::vector<double> brow_;   // border row, overwritten by elimination
    std::vector<double> bmult_;  // multipliers used to eliminate the border row
    double corner_ = 0.0;
};

} // namespace sislab
