#include "sislab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sislab/errors.hpp"

namespace sislab {

std::vector<double> thomas_solve(const std::vector<double>& sub,
                                 const std::vector<double>& diag,
                                 const std::vector<double>& sup,
                                 std::vector<double> rhs) {
    const size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n)
        throw ValidationError("thomas_solve: band/rhs size mismatch");
    std::vector<double> c(n), x(n);
    double piv = diag[0];
    if (piv == 0.0) throw SolverError("thomas_solve: zero pivot at row 0");
    c[0] = sup[0] / piv;
    x[0] = rhs[0] / piv;
    for (size_t i = 1; i < n; ++i) {
        piv = diag[i] - sub[i] * c[i - 1];
        if (piv == 0.0)
            throw SolverError("thomas_solve: zero pivot at row " + std::to_string(i));
        c[i] = sup[i] / piv;
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / piv;
    }
    for (size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

std::vector<double> gtsv_solve(std::vector<double> sub,
                               std::vector<double> diag,
                               std::vector<double> sup,
                               std::vector<double> rhs) {
    const size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n)
        throw ValidationError("gtsv_solve: band/rhs size mismatch");
    if (n == 1) {
        if (diag[0] == 0.0) throw SolverError("gtsv_solve: singular 1x1 system");
        rhs[0] /= diag[0];
        return rhs;
    }
    // dl[i] = A(i+1, i) for the elimination below; reuse dl slots for the
    // second superdiagonal fill created by row interchanges.
    std::vector<double> dl(n - 1), du(n - 1), du2(n - 2, 0.0);
    for (size_t i = 0; i + 1 < n; ++i) {
        dl[i] = sub[i + 1];
        du[i] = sup[i];
    }
    for (size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(diag[i]) >= std::abs(dl[i])) {
            if (diag[i] == 0.0)
                throw SolverError("gtsv_solve: singular pivot at row " + std::to_string(i));
            double fact = dl[i] / diag[i];
            diag[i + 1] -= fact * du[i];
            rhs[i + 1] -= fact * rhs[i];
            if (i + 2 < n) {
                // no fill-in without interchange
            }
        } else {
            double fact = diag[i] / dl[i];
            diag[i] = dl[i];
            double temp = diag[i + 1];
            diag[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            temp = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = temp - fact * rhs[i + 1];
        }
    }
    if (diag[n - 1] == 0.0)
        throw SolverError("gtsv_solve: singular pivot at last row");
    rhs[n - 1] /= diag[n - 1];
    if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / diag[n - 2];
    for (size_t i = n - 2; i-- > 0;)
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / diag[i];
    return rhs;
}

namespace {

// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly below
// sigma, by the LDL^T pivot sign count with the standard pivot floor.
int sturm_count(const std::vector<double>& d, const std::vector<double>& e,
                double sigma, double pivmin) {
    int count = 0;
    double q = d[0] - sigma;
    if (q < 0.0) ++count;
    for (size_t k = 1; k < d.size(); ++k) {
        if (std::abs(q) < pivmin) q = -pivmin;
        q = d[k] - sigma - e[k - 1] * e[k - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

// Deterministic fallback start vector (xorshift), used if the all-ones start
// is accidentally orthogonal to the target eigenvector.
std::vector<double> pseudo_random_vector(size_t n, uint64_t seed) {
    std::vector<double> v(n);
    uint64_t s = seed;
    for (size_t i = 0; i < n; ++i) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        v[i] = 0.5 + static_cast<double>(s % 1000003) / 1000003.0;
    }
    return v;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

SymTridiagEigen smallest_eigenpair_sym_tridiag(const std::vector<double>& d,
                                               const std::vector<double>& e,
                                               double rel_tol, int max_iterations) {
    const size_t n = d.size();
    if (n == 0) throw ValidationError("smallest_eigenpair_sym_tridiag: empty matrix");
    if (e.size() + 1 != n)
        throw ValidationError("smallest_eigenpair_sym_tridiag: off-diagonal size mismatch");
    if (n == 1) return {d[0], {1.0}, 0, 0.0};

    // Gershgorin bracket and scales.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double max_e2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
        if (i + 1 < n) max_e2 = std::max(max_e2, e[i] * e[i]);
    }
    const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, max_e2);
    const double eps = std::numeric_limits<double>::epsilon();

    // Bisection for the smallest eigenvalue: keep count(lo) == 0, count(hi) >= 1.
    lo -= 2.0 * eps * scale + pivmin;
    hi += 2.0 * eps * scale + pivmin;
    int iters = 0;
    while (hi - lo > 4.0 * eps * std::max(std::abs(lo), std::abs(hi)) + 2.0 * pivmin &&
           iters < 220) {
        double mid = 0.5 * (lo + hi);
        if (sturm_count(d, e, mid, pivmin) >= 1)
            hi = mid;
        else
            lo = mid;
        ++iters;
    }
    double sigma = 0.5 * (lo + hi);

    // Shifted inverse power iteration at the converged shift.
    const double op_scale = [&] {
        double m = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double r = std::abs(d[i]) + (i > 0 ? std::abs(e[i - 1]) : 0.0) +
                       (i + 1 < n ? std::abs(e[i]) : 0.0);
            m = std::max(m, r);
        }
        return std::max(m, 1e-300);
    }();

    std::vector<double> sub(n, 0.0), sup(n, 0.0), dm(n);
    for (size_t i = 0; i + 1 < n; ++i) {
        sub[i + 1] = e[i];
        sup[i] = e[i];
    }

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double rho = sigma, res = std::numeric_limits<double>::infinity();
    int inv_iters = 0;
    double shift = sigma;
    int reseeds = 0;
    while (inv_iters < max_iterations) {
        for (size_t i = 0; i < n; ++i) dm[i] = d[i] - shift;
        std::vector<double> y;
        try {
            y = gtsv_solve(sub, dm, sup, x);
        } catch (const SolverError&) {
            shift -= 4.0 * eps * scale + 2.0 * pivmin; // nudge off the exact eigenvalue
            ++inv_iters;
            continue;
        }
        double ny = norm2(y);
        if (!std::isfinite(ny) || ny == 0.0) {
            shift -= 4.0 * eps * scale + 2.0 * pivmin;
            ++inv_iters;
            continue;
        }
        for (size_t i = 0; i < n; ++i) y[i] /= ny;
        // Rayleigh quotient and residual of the candidate.
        double num = 0.0;
        std::vector<double> ty(n);
        for (size_t i = 0; i < n; ++i) {
            double v = d[i] * y[i];
            if (i > 0) v += e[i - 1] * y[i - 1];
            if (i + 1 < n) v += e[i] * y[i + 1];
            ty[i] = v;
            num += y[i] * v;
        }
        rho = num;
        double r2 = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double ri = ty[i] - rho * y[i];
            r2 += ri * ri;
        }
        res = std::sqrt(r2);
        x = y;
        ++inv_iters;
        if (res <= rel_tol * op_scale) break;
        if (inv_iters == 6 && res > 0.01 * op_scale && reseeds == 0) {
            x = pseudo_random_vector(n, 0x9e3779b97f4a7c15ull);
            double nx = norm2(x);
            for (size_t i = 0; i < n; ++i) x[i] /= nx;
            ++reseeds;
        }
    }
    if (res > std::max(rel_tol * op_scale * 100.0, 1e-8 * op_scale))
        throw SolverError("smallest_eigenpair_sym_tridiag: inverse iteration stalled, residual " +
                          std::to_string(res));
    return {rho, std::move(x), iters + inv_iters, res};
}

BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<size_t>(n) * static_cast<size_t>(2 * kl + ku + 1), 0.0),
      ipiv_(static_cast<size_t>(n), 0) {
    if (n < 2 || kl < 0 || ku < 0)
        throw ValidationError("BandedLU: invalid dimensions");
}

double& BandedLU::ref(int i, int j) {
    return ab_[static_cast<size_t>(j) * static_cast<size_t>(ldab_) +
               static_cast<size_t>(kl_ + ku_ + i - j)];
}

double BandedLU::cref(int i, int j) const {
    return ab_[static_cast<size_t>(j) * static_cast<size_t>(ldab_) +
               static_cast<size_t>(kl_ + ku_ + i - j)];
}

void BandedLU::add(int i, int j, double v) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
        throw ValidationError("BandedLU::add: entry outside band");
    ref(i, j) += v;
}

void BandedLU::set(int i, int j, double v) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
        throw ValidationError("BandedLU::set: entry outside band");
    ref(i, j) = v;
}

double BandedLU::get(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_ + kl_)
        return 0.0;
    return cref(i, j);
}

void BandedLU::set_border(std::vector<double> col, std::vector<double> row, double corner) {
    if (static_cast<int>(col.size()) != n_ || static_cast<int>(row.size()) != n_)
        throw ValidationError("BandedLU::set_border: border size mismatch");
    bcol_ = std::move(col);
    brow_ = std::move(row);
    corner_ = corner;
    bordered_ = true;
}

void BandedLU::factor() {
    if (factored_) throw ValidationError("BandedLU::factor: already factored");
    for (int k = 0; k < n_; ++k) {
        int pend = std::min(k + kl_, n_ - 1);
        int p = k;
        double pmax = std::abs(cref(k, k));
        for (int i = k + 1; i <= pend; ++i)
            if (std::abs(cref(i, k)) > pmax) { pmax = std::abs(cref(i, k)); p = i; }
        ipiv_[static_cast<size_t>(k)] = p;
        int jend = std::min(k + ku_ + kl_, n_ - 1);
        if (p != k) {
            for (int j = k; j <= jend; ++j) std::swap(ref(k, j), ref(p, j));
            if (bordered_) std::swap(bcol_[static_cast<size_t>(k)], bcol_[static_cast<size_t>(p)]);
        }
        double piv = cref(k, k);
        if (piv == 0.0) {
            // A rank deficiency of one is expected for mass-constrained systems
            // and surfaces in the final pivot; the bordered 2x2 finale absorbs
            // it.  Anywhere else the factorization cannot continue.
            if (!(bordered_ && k == n_ - 1))
                throw SolverError("BandedLU::factor: zero pivot at column " + std::to_string(k));
            continue;
        }
        for (int i = k + 1; i <= pend; ++i) {
            double m = cref(i, k) / piv;
            ref(i, k) = m;
            if (m != 0.0) {
                for (int j = k + 1; j <= jend; ++j) ref(i, j) -= m * cref(k, j);
                if (bordered_) bcol_[static_cast<size_t>(i)] -= m * bcol_[static_cast<size_t>(k)];
            }
        }
    }
    if (bordered_) {
        // Eliminate the dense border row against all but the final pivot.
        bmult_.assign(static_cast<size_t>(n_), 0.0);
        for (int k = 0; k + 1 < n_; ++k) {
            double piv = cref(k, k);
            double f = brow_[static_cast<size_t>(k)] / piv;
            bmult_[static_cast<size_t>(k)] = f;
            if (f != 0.0) {
                int jend = std::min(k + ku_ + kl_, n_ - 1);
                for (int j = k + 1; j <= jend; ++j)
                    brow_[static_cast<size_t>(j)] -= f * cref(k, j);
                corner_ -= f * bcol_[static_cast<size_t>(k)];
            }
        }
    }
    factored_ = true;
}

void BandedLU::forward(std::vector<double>& rhs) const {
    for (int k = 0; k < n_; ++k) {
        int p = ipiv_[static_cast<size_t>(k)];
        if (p != k) std::swap(rhs[static_cast<size_t>(k)], rhs[static_cast<size_t>(p)]);
        double rk = rhs[static_cast<size_t>(k)];
        if (rk != 0.0) {
            int iend = std::min(k + kl_, n_ - 1);
            for (int i = k + 1; i <= iend; ++i)
                rhs[static_cast<size_t>(i)] -= cref(i, k) * rk;
        }
    }
}

std::vector<double> BandedLU::solve(std::vector<double> rhs) const {
    if (!factored_) throw ValidationError("BandedLU::solve: not factored");
    if (bordered_) throw ValidationError("BandedLU::solve: bordered system needs solve_bordered");
    if (static_cast<int>(rhs.size()) != n_)
        throw ValidationError("BandedLU::solve: rhs size mismatch");
    forward(rhs);
    for (int k = n_ - 1; k >= 0; --k) {
        double v = rhs[static_cast<size_t>(k)];
        int jend = std::min(k + ku_ + kl_, n_ - 1);
        for (int j = k + 1; j <= jend; ++j) v -= cref(k, j) * rhs[static_cast<size_t>(j)];
        double piv = cref(k, k);
        if (piv == 0.0) throw SolverError("BandedLU::solve: zero pivot in back substitution");
        rhs[static_cast<size_t>(k)] = v / piv;
    }
    return rhs;
}

std::pair<std::vector<double>, double> BandedLU::solve_bordered(std::vector<double> rhs,
                                                                double rho) const {
    if (!factored_) throw ValidationError("BandedLU::solve_bordered: not factored");
    if (!bordered_) throw ValidationError("BandedLU::solve_bordered: no border set");
    if (static_cast<int>(rhs.size()) != n_)
        throw ValidationError("BandedLU::solve_bordered: rhs size mismatch");
    forward(rhs);
    for (int k = 0; k + 1 < n_; ++k)
        rho -= bmult_[static_cast<size_t>(k)] * rhs[static_cast<size_t>(k)];

    // Trailing 2x2 system in (x_{n-1}, xi), solved with complete pivoting so a
    // vanishing final pivot of A is handled through the border.
    const int m = n_ - 1;
    double a[2][2] = {{cref(m, m), bcol_[static_cast<size_t>(m)]},
                      {brow_[static_cast<size_t>(m)], corner_}};
    double b[2] = {rhs[static_cast<size_t>(m)], rho};
    int pr = 0, pc = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (std::abs(a[i][j]) > std::abs(a[pr][pc])) { pr = i; pc = j; }
    if (a[pr][pc] == 0.0)
        throw SolverError("BandedLU::solve_bordered: bordered system is singular");
    int or_ = 1 - pr, oc = 1 - pc;
    double l = a[or_][pc] / a[pr][pc];
    double denom = a[or_][oc] - l * a[pr][oc];
    if (denom == 0.0 || !std::isfinite(denom))
        throw SolverError("BandedLU::solve_bordered: bordered system is singular");
    double x[2];
    x[oc] = (b[or_] - l * b[pr]) / denom;
    x[pc] = (b[pr] - a[pr][oc] * x[oc]) / a[pr][pc];
    double xm = x[0], xi = x[1];
    rhs[static_cast<size_t>(m)] = xm;
    for (int k = n_ - 2; k >= 0; --k) {
        double v = rhs[static_cast<size_t>(k)] - bcol_[static_cast<size_t>(k)] * xi;
        int jend = std::min(k + ku_ + kl_, n_ - 1);
        for (int j = k + 1; j <= jend; ++j) v -= cref(k, j) * rhs[static_cast<size_t>(j)];
        double piv = cref(k, k);
        if (piv == 0.0)
            throw SolverError("BandedLU::solve_bordered: zero pivot in back substitution");
        rhs[static_cast<size_t>(k)] = v / piv;
    }
    return {std::move(rhs), xi};
}

} // namespace sislab
