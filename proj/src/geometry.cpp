#include "geostream/geometry.hpp"

#include "geostream/parallel.hpp"
#include "geostream/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace geostream {

std::optional<Vector> SymmetrizedStream::feed(const Vector& a) {
    require_finite(a, "SymmetrizedStream::feed");
    ++count_;
    if (!base_) {
        base_ = a;
        return std::nullopt;
    }
    return a - *base_;
}

const Vector& SymmetrizedStream::base_point() const {
    if (!base_) throw data_error("EmptyStream", "no point fed yet");
    return *base_;
}

double directional_width(const Matrix& points, const Vector& x) {
    if (points.rows() == 0) throw data_error("EmptyStream", "width of an empty point set");
    Vector ip = points * x;
    return ip.maxCoeff() - ip.minCoeff();
}

double symmetrized_height(const Matrix& points, const Vector& x) {
    if (points.rows() == 0) throw data_error("EmptyStream", "height of an empty point set");
    Vector base = points.row(0).transpose();
    double h = 0.0;
    for (Index i = 0; i < points.rows(); ++i)
        h = std::max(h, std::abs((points.row(i).transpose() - base).dot(x)));
    return h;
}

double hull_support(const Coreset& c, const Vector& u) { return c.query_linf(u); }

bool Ellipsoid::contains(const Vector& x, double tol) const {
    return x.dot(H * x) <= 1.0 + tol;
}

Ellipsoid Ellipsoid::polar() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const Vector& ev = es.eigenvalues();
    double lmax = ev(ev.size() - 1);
    Matrix Hp = Matrix::Zero(H.rows(), H.cols());
    if (lmax > 0.0) {
        for (Index i = 0; i < ev.size(); ++i)
            if (ev(i) > kPsdCutoff * lmax)
                Hp += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / ev(i);
    }
    return Ellipsoid{Hp};
}

EllipsoidResult ellipsoid_from_coreset(const Coreset& c, EllipsoidTarget target) {
    if (c.size() == 0) throw algo_error("EmptyCoreset", "no rows stored");
    EllipsoidResult out;
    out.delta = c.distortion();
    Matrix H = c.gram();
    if (target == EllipsoidTarget::Polytope) {
        out.E = Ellipsoid{H};
        return out;
    }
    SpectralFactorization f = SpectralFactorization::compute(c.weighted_rows_matrix());
    out.span_restricted = f.rank < c.dim();
    out.E = Ellipsoid{H}.polar();
    return out;
}

double log_volume(const Matrix& rows) {
    if (rows.rows() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(rows);
    double acc = 0.0;
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
        double s = svd.singularValues()(i);
        acc += std::log(std::max(s, 1e-300));
    }
    return acc;
}

namespace {

void combinations(Index n, int k, const std::function<void(const std::vector<Index>&)>& visit) {
    std::vector<Index> idx(static_cast<size_t>(k));
    std::function<void(Index, int)> rec = [&](Index start, int depth) {
        if (depth == k) {
            visit(idx);
            return;
        }
        for (Index i = start; i <= n - (k - depth); ++i) {
            idx[static_cast<size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

std::vector<Index> greedy_max_volume(const Matrix& rows, int k) {
    // pivoted selection: largest orthogonal residual first
    std::vector<Index> chosen;
    Matrix residual = rows;
    for (int step = 0; step < k; ++step) {
        Index best = -1;
        double best_norm = -1.0;
        for (Index i = 0; i < residual.rows(); ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            double nrm = residual.row(i).norm();
            if (nrm > best_norm) {
                best_norm = nrm;
                best = i;
            }
        }
        if (best < 0) break;
        chosen.push_back(best);
        double nn = residual.row(best).squaredNorm();
        if (nn > 0.0) {
            Vector dir = residual.row(best).transpose() / std::sqrt(nn);
            residual -= (residual * dir) * dir.transpose();
        }
    }
    return chosen;
}

}  // namespace

VolmaxResult volmax_select(const Matrix& A, int k, int r, std::uint64_t seed, VolmaxMode mode,
                           const VolmaxOptions& opts) {
    require_finite(A, "volmax_select");
    const Index d = A.cols();
    if (k < 1 || k > d) throw config_error("SizeLimit", "volmax needs 1 <= k <= d");

    Matrix sketched;
    Index sketch_dim;
    if (r >= d) {
        sketched = A;
        sketch_dim = d;
    } else {
        Matrix G(d, r);
        rng::Stream stream = rng::substream(seed, {0x766d6178ULL});
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < r; ++j) G(i, j) = stream.gaussian() / std::sqrt(static_cast<double>(r));
        sketched = A * G;
        sketch_dim = r;
    }

    Coreset core(sketch_dim);
    for (Index i = 0; i < sketched.rows(); ++i) core.ingest(sketched.row(i).transpose());
    Matrix rows = core.rows_matrix();
    const auto& src = core.indices();

    VolmaxResult out;
    out.coreset_size = core.size();
    out.sketch_dim = sketch_dim;
    if (static_cast<int>(core.size()) < k)
        throw algo_error("InsufficientRows", "coreset smaller than k");

    std::vector<Index> local;
    if (mode == VolmaxMode::Exact) {
        if (static_cast<int>(core.size()) > opts.exact_limit)
            throw config_error("SizeLimit", "coreset too large for exact enumeration");
        double best = -std::numeric_limits<double>::infinity();
        combinations(rows.rows(), k, [&](const std::vector<Index>& comb) {
            Matrix sel(k, sketch_dim);
            for (int j = 0; j < k; ++j) sel.row(j) = rows.row(comb[static_cast<size_t>(j)]);
            double lv = log_volume(sel);
            if (lv > best) {
                best = lv;
                local = comb;
            }
        });
        out.log_volume = best;
    } else {
        local = greedy_max_volume(rows, k);
        Matrix sel(static_cast<Index>(local.size()), sketch_dim);
        for (size_t j = 0; j < local.size(); ++j) sel.row(static_cast<Index>(j)) = rows.row(local[j]);
        out.log_volume = log_volume(sel);
    }
    for (Index i : local) out.indices.push_back(src[static_cast<size_t>(i)]);
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

namespace {

struct ShellEstimator {
    // coreset rows of b = [-2 p, |p|^2] and b'' = [b, 1], translated coords
    Matrix b_rows;    // |Sb| x (d+1)
    Matrix points2;   // points recovered from the b'' coreset, |S''| x d
    size_t size_b, size_b2;
    Index d;

    // exact max/min of <b_i, [c,1]> over stored b rows plus the implicit 0 row
    std::pair<double, double> b_range(const Vector& c) const {
        double mx = 0.0, mn = 0.0;
        for (Index i = 0; i < b_rows.rows(); ++i) {
            double v = b_rows.row(i).head(d).dot(c) + b_rows(i, d);
            mx = std::max(mx, v);
            mn = std::min(mn, v);
        }
        return {mx, mn};
    }

    double max_dist2(const Vector& c) const {
        double m = c.squaredNorm();  // implicit origin point
        for (Index i = 0; i < points2.rows(); ++i)
            m = std::max(m, (points2.row(i).transpose() - c).squaredNorm());
        return m;
    }

    // optimizer objective: est(R^2 - r^2) / est(R)
    double objective(const Vector& c) const {
        auto [mx, mn] = b_range(c);
        double r2 = std::sqrt(std::max(max_dist2(c), 1e-300));
        return (mx - mn) / r2;
    }

    // exact width over the stored points at center c
    double stored_width(const Vector& c) const {
        double lo = c.norm(), hi = c.norm();
        for (Index i = 0; i < points2.rows(); ++i) {
            double dist = (points2.row(i).transpose() - c).norm();
            lo = std::min(lo, dist);
            hi = std::max(hi, dist);
        }
        return hi - lo;
    }
};

Vector coordinate_descent(const ShellEstimator& est, Vector c, double scale, int evals,
                          const std::function<double(const Vector&)>& f) {
    double step = 0.25 * scale;
    double cur = f(c);
    int used = 0;
    while (used < evals && step > 1e-12 * std::max(scale, 1.0)) {
        bool improved = false;
        for (Index j = 0; j < c.size() && used < evals; ++j) {
            for (double sgn : {+1.0, -1.0}) {
                Vector cand = c;
                cand(j) += sgn * step;
                double v = f(cand);
                ++used;
                if (v < cur) {
                    cur = v;
                    c = cand;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return c;
}

}  // namespace

ShellResult shell_solve(const Matrix& points, const ShellOptions& opts) {
    require_finite(points, "shell_solve");
    const Index n = points.rows(), d = points.cols();
    if (n < 2) throw data_error("DegenerateInput", "shell needs at least two points");

    Vector base = points.row(0).transpose();
    bool distinct = false;
    Coreset core_b(d + 1), core_b2(d + 2);
    {
        Vector b2_base = Vector::Zero(d + 2);
        b2_base(d + 1) = 1.0;
        core_b2.ingest(b2_base);
    }
    for (Index i = 1; i < n; ++i) {
        Vector p = points.row(i).transpose() - base;
        if (p.norm() > 0.0) distinct = true;
        Vector b(d + 1);
        b.head(d) = -2.0 * p;
        b(d) = p.squaredNorm();
        if (b.norm() > 0.0) core_b.ingest(b);
        Vector b2(d + 2);
        b2.head(d + 1) = b;
        b2(d + 1) = 1.0;
        core_b2.ingest(b2);
    }
    if (!distinct) throw data_error("DegenerateInput", "all points coincide");

    ShellEstimator est;
    est.d = d;
    est.b_rows = core_b.rows_matrix();
    est.size_b = core_b.size();
    est.size_b2 = core_b2.size();
    // recover translated points from the b'' coreset rows [-2p, |p|^2, 1]
    Matrix b2_rows = core_b2.rows_matrix();
    est.points2 = Matrix(b2_rows.rows(), d);
    for (Index i = 0; i < b2_rows.rows(); ++i)
        est.points2.row(i) = -0.5 * b2_rows.row(i).head(d);

    // multi-start seeds: centroid of the recovered points plus perturbations
    Vector centroid = Vector::Zero(d);
    for (Index i = 0; i < est.points2.rows(); ++i) centroid += est.points2.row(i).transpose();
    centroid /= static_cast<double>(est.points2.rows() + 1);
    double spread = std::sqrt(est.max_dist2(centroid));

    std::vector<Vector> results(static_cast<size_t>(opts.starts));
    std::vector<double> scores(static_cast<size_t>(opts.starts));
    auto run_start = [&](int s) {
        Vector c0 = centroid;
        if (s > 0) {
            rng::Stream stream = rng::substream(opts.seed, {static_cast<std::uint64_t>(s)});
            for (Index j = 0; j < d; ++j) c0(j) += 0.5 * spread * stream.gaussian();
        }
        Vector c = coordinate_descent(est, c0, std::max(spread, 1e-6), opts.evals_per_start,
                                      [&](const Vector& x) { return est.objective(x); });
        results[static_cast<size_t>(s)] = c;
        scores[static_cast<size_t>(s)] = est.objective(c);
    };
    parallel_for(opts.starts, run_start);

    int best = 0;
    for (int s = 1; s < opts.starts; ++s)
        if (scores[static_cast<size_t>(s)] < scores[static_cast<size_t>(best)]) best = s;

    // polish directly on the exact stored-point width
    Vector c = coordinate_descent(est, results[static_cast<size_t>(best)],
                                  std::max(spread, 1e-6), opts.evals_per_start,
                                  [&](const Vector& x) { return est.stored_width(x); });

    ShellResult out;
    out.coreset_size_b = est.size_b;
    out.coreset_size_b2 = est.size_b2;
    out.delta = std::sqrt(static_cast<double>(std::max<size_t>(1, std::max(est.size_b, est.size_b2))));
    out.center = c + base;
    double lo = c.norm(), hi = c.norm();
    for (Index i = 0; i < est.points2.rows(); ++i) {
        double dist = (est.points2.row(i).transpose() - c).norm();
        lo = std::min(lo, dist);
        hi = std::max(hi, dist);
    }
    out.inner = lo;
    out.outer = hi;
    // coreset-certified radii valid for every streamed point
    auto [mx, mn] = est.b_range(c);
    double m_abs = std::max(mx, -mn);
    double sb = std::sqrt(static_cast<double>(std::max<size_t>(est.size_b, 1)));
    out.certified_inner = std::sqrt(std::max(0.0, c.squaredNorm() - sb * m_abs));
    double sb2 = std::sqrt(static_cast<double>(std::max<size_t>(est.size_b2, 1)));
    out.certified_outer = std::sqrt(sb2 * est.max_dist2(c));
    return out;
}

LpSolveResult lp_maximize(const Vector& c_obj, const Coreset& c) {
    if (c.size() == 0) throw algo_error("EmptyCoreset", "lp_maximize needs a nonempty coreset");
    Matrix rows = c.weighted_rows_matrix();
    if (c_obj.norm() > 0.0) {
        ResidualSplit split = orthogonal_residual(c_obj, rows);
        if (!split.in_span)
            throw algo_error("Unbounded", "objective leaves the coreset rowspan");
    }
    const Index m = rows.rows();
    Matrix G(2 * m, rows.cols());
    G.topRows(m) = rows;
    G.bottomRows(m) = -rows;
    Vector h = Vector::Ones(2 * m);
    LpSolution sol = solve_lp_max(c_obj, G, h);
    if (sol.status == LpStatus::Unbounded)
        throw algo_error("Unbounded", "objective unbounded over the coreset polytope");
    if (sol.status != LpStatus::Optimal)
        throw algo_error("SimplexStall", "LP solve failed");
    LpSolveResult out;
    out.delta = c.distortion();
    out.x_star = sol.x;
    out.value_star = sol.value;
    out.x_hat = sol.x / out.delta;
    out.value = c_obj.dot(out.x_hat);
    return out;
}

}  // namespace geostream
