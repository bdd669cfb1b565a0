#include "sislab/linalg.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sislab/errors.hpp"

using namespace sislab;

namespace {

std::vector<std::vector<double>> tridiag_dense(const std::vector<double>& sub,
                                               const std::vector<double>& diag,
                                               const std::vector<double>& sup) {
    size_t n = diag.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        A[i][i] = diag[i];
        if (i > 0) A[i][i - 1] = sub[i];
        if (i + 1 < n) A[i][i + 1] = sup[i];
    }
    return A;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("thomas solve matches dense elimination on diagonally dominant systems") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 3 + static_cast<int>(rng() % 48);
        std::vector<double> sub(n), diag(n), sup(n), rhs(n);
        for (int i = 0; i < n; ++i) {
            sub[i] = u(rng);
            sup[i] = u(rng);
            diag[i] = 3.0 + u(rng); // strictly dominant
            rhs[i] = u(rng);
        }
        sub[0] = sup[n - 1] = 0.0;
        auto x = thomas_solve(sub, diag, sup, rhs);
        auto xd = oracle::dense_solve(tridiag_dense(sub, diag, sup), rhs);
        CHECK(max_abs_diff(x, xd) < 1e-12);
    }
}

TEST_CASE("pivoted tridiagonal solve handles indefinite systems") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng() % 60);
        std::vector<double> sub(n), diag(n), sup(n), rhs(n);
        for (int i = 0; i < n; ++i) {
            sub[i] = u(rng);
            sup[i] = u(rng);
            diag[i] = 0.3 * u(rng); // small diagonal: pivoting required
            rhs[i] = u(rng);
        }
        sub[0] = sup[n - 1] = 0.0;
        auto x = gtsv_solve(sub, diag, sup, rhs);
        // Verify by residual to avoid penalizing genuinely ill-conditioned draws.
        double scale = 0.0, res = 0.0;
        for (int i = 0; i < n; ++i) {
            double ax = diag[i] * x[i];
            if (i > 0) ax += sub[i] * x[i - 1];
            if (i + 1 < n) ax += sup[i] * x[i + 1];
            res = std::max(res, std::abs(ax - rhs[i]));
            scale = std::max(scale, std::abs(x[i]));
        }
        CHECK(res < 1e-11 * (1.0 + scale));
    }
}

TEST_CASE("pivoted tridiagonal solve rejects an exactly singular matrix") {
    std::vector<double> sub{0.0, 0.0, 0.0}, diag{0.0, 0.0, 0.0}, sup{0.0, 0.0, 0.0},
        rhs{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(gtsv_solve(sub, diag, sup, rhs), SolverError);
}

TEST_CASE("smallest symmetric tridiagonal eigenpair matches dense Jacobi") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 80; ++trial) {
        int n = 3 + static_cast<int>(rng() % 40);
        std::vector<double> d(n), e(n - 1);
        for (int i = 0; i < n; ++i) d[i] = 4.0 * u(rng);
        for (int i = 0; i + 1 < n; ++i) e[i] = 2.0 * u(rng);
        auto got = smallest_eigenpair_sym_tridiag(d, e);
        std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            A[i][i] = d[i];
            if (i + 1 < n) A[i][i + 1] = A[i + 1][i] = e[i];
        }
        auto ev = oracle::jacobi_eigenvalues(A);
        CHECK(std::abs(got.value - ev.front()) < 1e-11 * (1.0 + std::abs(ev.front())));
        // Eigenvector residual.
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            double v = d[i] * got.vector[i];
            if (i > 0) v += e[i - 1] * got.vector[i - 1];
            if (i + 1 < n) v += e[i] * got.vector[i + 1];
            res = std::max(res, std::abs(v - got.value * got.vector[i]));
        }
        CHECK(res < 1e-10);
    }
}

TEST_CASE("smallest eigenpair survives clustered eigenvalues") {
    // Nearly-diagonal matrix with two close smallest entries.
    std::vector<double> d{1.0, 1.0 + 1e-9, 2.0, 3.0, 4.0};
    std::vector<double> e{1e-8, 1e-8, 1e-8, 1e-8};
    auto got = smallest_eigenpair_sym_tridiag(d, e);
    CHECK(got.value < 1.0 + 1e-8);
    CHECK(got.value > 1.0 - 1e-6);
}

TEST_CASE("banded LU with partial pivoting matches dense elimination") {
    std::mt19937_64 rng(45);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 150; ++trial) {
        int n = 5 + static_cast<int>(rng() % 36);
        int kl = 1 + static_cast<int>(rng() % 3);
        int ku = 1 + static_cast<int>(rng() % 3);
        BandedLU lu(n, kl, ku);
        std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) {
            rhs[i] = u(rng);
            for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
                double v = u(rng);
                if (i == j) v += 0.5; // keep draws comfortably nonsingular
                A[i][j] = v;
                lu.set(i, j, v);
            }
        }
        lu.factor();
        auto x = lu.solve(rhs);
        auto xd = oracle::dense_solve(A, rhs);
        CHECK(max_abs_diff(x, xd) < 1e-9);
    }
}

TEST_CASE("bordered banded solve matches dense elimination on regular cores") {
    std::mt19937_64 rng(46);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 5 + static_cast<int>(rng() % 30);
        int kl = 2, ku = 2;
        BandedLU lu(n, kl, ku);
        std::vector<std::vector<double>> M(n + 1, std::vector<double>(n + 1, 0.0));
        std::vector<double> rhs(n), bc(n), br(n);
        for (int i = 0; i < n; ++i) {
            rhs[i] = u(rng);
            bc[i] = u(rng);
            br[i] = u(rng);
            M[i][n] = bc[i];
            M[n][i] = br[i];
            for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
                double v = u(rng);
                if (i == j) v += 0.7;
                M[i][j] = v;
                lu.set(i, j, v);
            }
        }
        double rho = u(rng);
        lu.set_border(bc, br, 0.0);
        lu.factor();
        auto [x, xi] = lu.solve_bordered(rhs, rho);
        std::vector<double> rhs_full = rhs;
        rhs_full.push_back(rho);
        auto xd = oracle::dense_solve(M, rhs_full);
        double err = std::abs(xi - xd[n]);
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(x[i] - xd[i]));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("bordered solve handles a rank-deficient core") {
    // Weighted stiffness matrix: rows sum to zero (null vector = ones), the
    // exact structure of the conserved-mass steady systems.  The border is the
    // quadrature weight vector, which regularizes it.
    int n = 40;
    double h = 1.0 / (n - 1);
    BandedLU lu(n, 2, 2);
    std::vector<std::vector<double>> M(n + 1, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < n; ++i) {
        double dcoef = (i == 0 || i == n - 1) ? 1.0 / h : 2.0 / h;
        M[i][i] = dcoef;
        lu.set(i, i, dcoef);
        if (i + 1 < n) {
            M[i][i + 1] = -1.0 / h;
            M[i + 1][i] = -1.0 / h;
            lu.set(i, i + 1, -1.0 / h);
            lu.set(i + 1, i, -1.0 / h);
        }
    }
    std::vector<double> w(n, h);
    w.front() = w.back() = h / 2.0;
    for (int i = 0; i < n; ++i) {
        M[i][n] = w[i];
        M[n][i] = w[i];
    }
    lu.set_border(w, w, 0.0);
    lu.factor();

    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = u(rng);
    double rho = 0.37;
    auto [x, xi] = lu.solve_bordered(rhs, rho);

    // Verify by residual of the full bordered system.
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
        double ax = M[i][i] * x[i] + w[i] * xi;
        if (i > 0) ax += M[i][i - 1] * x[i - 1];
        if (i + 1 < n) ax += M[i][i + 1] * x[i + 1];
        res = std::max(res, std::abs(ax - rhs[i]));
    }
    double cx = 0.0;
    for (int i = 0; i < n; ++i) cx += w[i] * x[i];
    res = std::max(res, std::abs(cx - rho));
    CHECK(res < 1e-9);
}
