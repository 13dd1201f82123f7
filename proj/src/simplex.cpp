#include "geostream/simplex.hpp"

#include <cmath>
#include <vector>

namespace geostream {

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kZeroTol = 1e-10;

// Tableau simplex on: maximize obj over A y = b, y >= 0, starting from the
// given basis. Artificial columns (>= art_begin) may never re-enter.
// Returns false on unboundedness.
bool run_simplex(Matrix& T, std::vector<int>& basis, int n_cols, int art_begin) {
    const int m = static_cast<int>(T.rows()) - 1;
    const int obj = m;  // objective row index
    long iter = 0;
    const long bland_after = 2000, max_iter = 200000;
    while (true) {
        if (++iter > max_iter)
            throw algo_error("SimplexStall", "simplex iteration cap exceeded");
        // pick entering column with positive reduced profit
        int enter = -1;
        if (iter < bland_after) {
            double best = kPivTol;
            for (int j = 0; j < n_cols; ++j) {
                if (j >= art_begin) continue;
                double rc = -T(obj, j);
                if (rc > best) {
                    best = rc;
                    enter = j;
                }
            }
        } else {
            for (int j = 0; j < n_cols; ++j) {
                if (j >= art_begin) continue;
                if (-T(obj, j) > kPivTol) {
                    enter = j;
                    break;
                }
            }
        }
        if (enter < 0) return true;  // optimal
        // ratio test
        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            double aij = T(i, enter);
            if (aij > kPivTol) {
                double ratio = T(i, n_cols) / aij;
                if (leave < 0 || ratio < best_ratio - kZeroTol ||
                    (std::abs(ratio - best_ratio) <= kZeroTol && basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0) return false;  // unbounded
        // pivot
        double piv = T(leave, enter);
        T.row(leave) /= piv;
        for (int i = 0; i <= m; ++i) {
            if (i == leave) continue;
            double f = T(i, enter);
            if (f != 0.0) T.row(i) -= f * T.row(leave);
        }
        basis[static_cast<size_t>(leave)] = enter;
    }
}

}  // namespace

LpSolution solve_lp_max(const Vector& c, const Matrix& G, const Vector& h) {
    const int m = static_cast<int>(G.rows());
    const int d = static_cast<int>(G.cols());
    if (h.size() != m) throw config_error("ShapeMismatch", "constraint RHS length mismatch");
    if (c.size() != d) throw config_error("ShapeMismatch", "objective length mismatch");

    // y = [x+ (d), x- (d), slack (m), artificial (m)]
    const int nx = 2 * d, ns = m, base_cols = nx + ns;
    int n_art = 0;
    std::vector<int> art_of_row(static_cast<size_t>(m), -1);
    for (int i = 0; i < m; ++i)
        if (h(i) < 0.0) art_of_row[static_cast<size_t>(i)] = n_art++;
    const int n_cols = base_cols + n_art;

    Matrix T = Matrix::Zero(m + 1, n_cols + 1);
    std::vector<int> basis(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        double sgn = (h(i) < 0.0) ? -1.0 : 1.0;
        for (int j = 0; j < d; ++j) {
            T(i, j) = sgn * G(i, j);
            T(i, d + j) = -sgn * G(i, j);
        }
        T(i, nx + i) = sgn;  // slack
        T(i, n_cols) = sgn * h(i);
        if (art_of_row[static_cast<size_t>(i)] >= 0) {
            T(i, base_cols + art_of_row[static_cast<size_t>(i)]) = 1.0;
            basis[static_cast<size_t>(i)] = base_cols + art_of_row[static_cast<size_t>(i)];
        } else {
            basis[static_cast<size_t>(i)] = nx + i;
        }
    }

    LpSolution sol;
    if (n_art > 0) {
        // phase 1: maximize -sum(artificials)
        for (int j = base_cols; j < n_cols; ++j) T(m, j) = 1.0;
        for (int i = 0; i < m; ++i)
            if (basis[static_cast<size_t>(i)] >= base_cols) T.row(m) -= T.row(i);
        if (!run_simplex(T, basis, n_cols, n_cols))
            throw algo_error("SimplexStall", "phase 1 unbounded");
        if (T(m, n_cols) < -1e-7) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // pivot remaining artificials out where possible
        for (int i = 0; i < m; ++i) {
            if (basis[static_cast<size_t>(i)] < base_cols) continue;
            int enter = -1;
            for (int j = 0; j < base_cols; ++j)
                if (std::abs(T(i, j)) > kPivTol) {
                    enter = j;
                    break;
                }
            if (enter < 0) continue;  // redundant row
            double piv = T(i, enter);
            T.row(i) /= piv;
            for (int r = 0; r <= m; ++r) {
                if (r == i) continue;
                double f = T(r, enter);
                if (f != 0.0) T.row(r) -= f * T.row(i);
            }
            basis[static_cast<size_t>(i)] = enter;
        }
    }

    // phase 2 objective: maximize c^T (x+ - x-)
    T.row(m).setZero();
    for (int j = 0; j < d; ++j) {
        T(m, j) = -c(j);
        T(m, d + j) = c(j);
    }
    for (int i = 0; i < m; ++i) {
        int bj = basis[static_cast<size_t>(i)];
        double f = T(m, bj);
        if (f != 0.0) T.row(m) -= f * T.row(i);
    }
    if (!run_simplex(T, basis, n_cols, base_cols)) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    Vector y = Vector::Zero(n_cols);
    for (int i = 0; i < m; ++i) y(basis[static_cast<size_t>(i)]) = T(i, n_cols);
    sol.x = Vector(d);
    for (int j = 0; j < d; ++j) sol.x(j) = y(j) - y(d + j);
    sol.value = c.dot(sol.x);
    return sol;
}

}  // namespace geostream
