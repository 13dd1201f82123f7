// Test-only reference implementations: brute-force and independent oracles the
// unit and acceptance suites compare the library against. These deliberately
// avoid the library's computation paths wherever the value being checked is in
// question (eigendecompositions instead of SVDs, nets and enumeration instead
// of closed forms).
#pragma once

#include "geostream/common.hpp"
#include "geostream/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

using geostream::Index;
using geostream::Matrix;
using geostream::Vector;

inline double lp_norm(const Vector& v, double p) {
    return std::pow(v.array().abs().pow(p).sum(), 1.0 / p);
}

inline Matrix random_int_matrix(geostream::rng::Stream& s, Index n, Index d, int bound) {
    Matrix A(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j)
            A(i, j) = static_cast<double>(s.uniform_index(2 * bound + 1) - bound);
    return A;
}

inline Matrix random_gauss_matrix(geostream::rng::Stream& s, Index n, Index d) {
    Matrix A(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) A(i, j) = s.gaussian();
    return A;
}

inline Vector random_unit(geostream::rng::Stream& s, Index d) {
    Vector x(d);
    for (Index i = 0; i < d; ++i) x(i) = s.gaussian();
    double n = x.norm();
    return n > 0.0 ? Vector(x / n) : Vector(Vector::Unit(d, 0));
}

// pseudoinverse of A^T A through an eigendecomposition (independent of the
// library's SVD path)
inline Matrix eigen_gram_pinv(const Matrix& A) {
    Matrix G = A.transpose() * A;
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    const Vector& ev = es.eigenvalues();
    double lmax = std::max(ev(ev.size() - 1), 0.0);
    Matrix P = Matrix::Zero(G.rows(), G.cols());
    for (Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 1e-12 * lmax)
            P += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / ev(i);
    return P;
}

inline Vector eigen_leverage_oracle(const Matrix& A) {
    Matrix P = eigen_gram_pinv(A);
    Vector tau(A.rows());
    for (Index i = 0; i < A.rows(); ++i) tau(i) = A.row(i) * P * A.row(i).transpose();
    return tau;
}

// enumerate unit vectors in up to three dimensions
inline void foreach_sphere_net(Index d, int res, const std::function<void(const Vector&)>& f) {
    if (d == 1) {
        Vector x(1);
        x << 1.0;
        f(x);
        return;
    }
    if (d == 2) {
        for (int i = 0; i < res; ++i) {
            double t = M_PI * i / res;
            Vector x(2);
            x << std::cos(t), std::sin(t);
            f(x);
        }
        return;
    }
    for (int i = 0; i <= res; ++i) {
        double th = M_PI * i / res;
        for (int j = 0; j < 2 * res; ++j) {
            double ph = M_PI * j / res;
            Vector x(3);
            x << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
            f(x);
        }
    }
}

// sup over the net of |<a,x>|^p / ||Bx||_p^p
inline double net_lp_sensitivity(const Vector& a, const Matrix& B, double p, int res = 360) {
    double best = 0.0;
    foreach_sphere_net(a.size(), res, [&](const Vector& x) {
        double den = std::pow(lp_norm(B * x, p), p);
        if (den <= 0.0) return;
        best = std::max(best, std::pow(std::abs(a.dot(x)), p) / den);
    });
    return best;
}

inline double net_l2_sensitivity(const Vector& a, const Matrix& B, int res = 720) {
    double best = 0.0;
    foreach_sphere_net(a.size(), res, [&](const Vector& x) {
        double den = (B * x).squaredNorm();
        if (den <= 0.0) return;
        double num = a.dot(x);
        best = std::max(best, num * num / den);
    });
    return best;
}

// (k+1)-st largest |<a_i,x>|
inline double brute_k_robust(const Matrix& A, const Vector& x, int k) {
    std::vector<double> v;
    for (Index i = 0; i < A.rows(); ++i) v.push_back(std::abs(A.row(i).dot(x)));
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v[static_cast<size_t>(k)];
}

// long-run projected subgradient descent for min ||Bx - c||_q
inline double subgradient_lq_min(const Matrix& B, const Vector& c, double q, int iters = 20000) {
    Vector x = B.colPivHouseholderQr().solve(c);
    double best = lp_norm(B * x - c, q);
    double step0 = 1.0 / std::max(1.0, B.operatorNorm());
    Vector xb = x;
    for (int t = 1; t <= iters; ++t) {
        Vector r = B * x - c;
        double nq = lp_norm(r, q);
        if (nq <= 0.0) return 0.0;
        Vector g = B.transpose() *
                   (r.array().sign() * r.array().abs().pow(q - 1.0)).matrix() /
                   std::pow(nq, q - 1.0);
        x -= step0 / std::sqrt(static_cast<double>(t)) * g;
        double v = lp_norm(B * x - c, q);
        if (v < best) {
            best = v;
            xb = x;
        }
    }
    return best;
}

// golden-section search for scalar lp regression min_x ||a x - b||_p
inline double scalar_lp_regression_min(const Vector& a, const Vector& b, double p) {
    auto cost = [&](double x) { return lp_norm(a * x - b, p); };
    double lo = -1e3, hi = 1e3;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = cost(x1), f2 = cost(x2);
    for (int i = 0; i < 200; ++i) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = cost(x2);
        }
    }
    return std::min(f1, f2);
}

// exact LP max <c,x> s.t. |<a_i,x>| <= 1 by vertex enumeration (d <= 3)
inline double vertex_enum_lp_max(const Vector& c, const Matrix& A) {
    const Index d = A.cols(), m = A.rows();
    Matrix G(2 * m, d);
    G.topRows(m) = A;
    G.bottomRows(m) = -A;
    double best = 0.0;  // x = 0 feasible
    std::vector<Index> idx(static_cast<size_t>(d));
    std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
        if (depth == d) {
            Matrix S(d, d);
            Vector rhs = Vector::Ones(d);
            for (Index j = 0; j < d; ++j) S.row(j) = G.row(idx[static_cast<size_t>(j)]);
            Eigen::FullPivLU<Matrix> lu(S);
            if (!lu.isInvertible()) return;
            Vector x = lu.solve(rhs);
            if (((G * x).array() <= 1.0 + 1e-8).all()) best = std::max(best, c.dot(x));
            return;
        }
        for (Index i = start; i < 2 * m; ++i) {
            idx[static_cast<size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

// min over a grid of centers of (max dist - min dist) to the points
inline double grid_shell_opt(const Matrix& pts, int res = 200) {
    Vector lo = pts.colwise().minCoeff().transpose();
    Vector hi = pts.colwise().maxCoeff().transpose();
    Vector pad = 0.25 * (hi - lo);
    lo -= pad;
    hi += pad;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= res; ++i)
        for (int j = 0; j <= res; ++j) {
            Vector c(2);
            c << lo(0) + (hi(0) - lo(0)) * i / res, lo(1) + (hi(1) - lo(1)) * j / res;
            double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
            for (Index r = 0; r < pts.rows(); ++r) {
                double dist = (pts.row(r).transpose() - c).norm();
                dmin = std::min(dmin, dist);
                dmax = std::max(dmax, dist);
            }
            best = std::min(best, dmax - dmin);
        }
    return best;
}

// Kolmogorov-Smirnov statistic against the Exp(1) CDF
inline double ks_vs_exponential(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double cdf = 1.0 - std::exp(-samples[i]);
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
    }
    return ks;
}

inline void foreach_combination(Index n, int k, const std::function<void(const std::vector<Index>&)>& f) {
    std::vector<Index> idx(static_cast<size_t>(k));
    std::function<void(Index, int)> rec = [&](Index start, int depth) {
        if (depth == k) {
            f(idx);
            return;
        }
        for (Index i = start; i <= n - (k - depth); ++i) {
            idx[static_cast<size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

}  // namespace oracles
