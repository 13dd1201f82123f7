#include "geostream/regression.hpp"

#include "geostream/rng.hpp"
#include "geostream/simplex.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace geostream {

namespace {

double lp_norm_vec(const Vector& v, double p) {
    return std::pow(v.array().abs().pow(p).sum(), 1.0 / p);
}

double entrywise_p_cost(const Matrix& R, double p) {
    return R.array().abs().pow(p).sum();
}

Vector least_squares(const Matrix& B, const Vector& c) {
    return B.colPivHouseholderQr().solve(c);
}

}  // namespace

IrlsResult irls_solve(const Matrix& B, const Vector& c, double q, double eps, int max_iters) {
    require_finite(B, "irls_solve");
    require_finite(c, "irls_solve");
    if (q < 2.0) throw config_error("BadIndex", "irls_solve needs q >= 2");
    if (B.rows() != c.size()) throw config_error("ShapeMismatch", "row count mismatch");

    IrlsResult out;
    out.x = least_squares(B, c);
    out.residual = lp_norm_vec(B * out.x - c, q);
    out.residual_history.push_back(out.residual);
    out.iterations = 1;
    if (q == 2.0) {
        out.converged = true;
        return out;
    }

    const double scale = std::max(lp_norm_vec(c, q), 1e-300);
    int flat_rounds = 0;
    for (int it = 1; it < max_iters; ++it) {
        Vector r = B * out.x - c;
        if (out.residual <= 1e-14 * scale) {
            out.converged = true;
            break;
        }
        Vector u = r.array().abs().pow(q - 2.0).matrix();
        double umax = u.maxCoeff();
        if (umax <= 0.0) {
            out.converged = true;
            break;
        }
        // weighted least squares step with backtracking damping
        Vector su = (u / umax).cwiseSqrt();
        Matrix Bw = su.asDiagonal() * B;
        Vector cw = su.asDiagonal() * c;
        Vector x_wls = least_squares(Bw, cw);

        double t = 1.0;
        bool accepted = false;
        while (t > 1e-10) {
            Vector cand = out.x + t * (x_wls - out.x);
            double res = lp_norm_vec(B * cand - c, q);
            if (res <= out.residual) {
                double gain = out.residual - res;
                out.x = cand;
                out.residual = res;
                accepted = true;
                flat_rounds = (gain <= (eps / 8.0) * std::max(res, 1e-300)) ? flat_rounds + 1 : 0;
                break;
            }
            t *= 0.5;
        }
        out.residual_history.push_back(out.residual);
        ++out.iterations;
        if (!accepted || flat_rounds >= 2) {
            out.converged = true;
            break;
        }
    }
    return out;
}

json RegressionResult::to_json() const {
    json j;
    j["residual_p"] = residual_p;
    j["certified_factor"] = certified_factor;
    switch (route) {
        case RegressionRoute::Offline: j["route"] = "offline"; break;
        case RegressionRoute::StreamingCoreset: j["route"] = "streaming_coreset"; break;
        case RegressionRoute::LinfLP: j["route"] = "linf_lp"; break;
    }
    j["x_hat"] = vector_to_json(x_hat);
    return j;
}

RegressionResult sketch_solve_regression(const Matrix& A, const Vector& b, double p, double q,
                                         double eps, std::uint64_t seed) {
    if (A.rows() != b.size()) throw config_error("ShapeMismatch", "row count mismatch");
    const Index d = A.cols();
    Matrix Ab(A.rows(), d + 1);
    Ab << A, b;
    Index budget = std::min<Index>(
        static_cast<Index>(std::ceil(40.0 * std::pow(static_cast<double>(d + 1), std::max(1.0, q / 2.0)) *
                                     std::log(static_cast<double>(d) + 2.0) / (eps * eps))),
        std::max<Index>(8 * A.rows(), 4 * (d + 1)));
    LpLqEmbedding emb = lp_to_lq_embed(Ab, p, q, eps, seed, budget);

    Matrix SA = emb.SA.leftCols(d);
    Vector Sb = emb.SA.col(d);
    IrlsResult small = irls_solve(SA, Sb, q, eps);

    RegressionResult out;
    out.route = RegressionRoute::Offline;
    out.x_hat = small.x;
    out.residual_p = lp_norm_vec(A * small.x - b, p);
    out.certified_factor = emb.kappa_reported * (1.0 + eps);
    return out;
}

RegressionResult streaming_regression_coreset(const Matrix& Ab, double p, Index n_declared,
                                              double eps, std::uint64_t seed) {
    if (Ab.cols() < 2) throw config_error("ShapeMismatch", "need at least one feature column");
    const Index dp = Ab.cols(), d = dp - 1;
    LpQuadraticSketch sketch(dp, p, n_declared);
    Matrix weighted(Ab.rows(), dp);
    for (Index i = 0; i < Ab.rows(); ++i) {
        double wp = sketch.ingest(Ab.row(i).transpose());
        weighted.row(i) = wp * Ab.row(i);
    }
    OnlineSpectralResult oss =
        online_spectral_sample(weighted, eps, rng::substream(seed, {0x737263ULL}).next_u64());
    const Matrix& M = oss.sample.rows;
    if (M.rows() == 0) throw algo_error("DegenerateWeights", "online sampler kept no rows");

    Vector x = least_squares(M.leftCols(d), M.col(d));
    RegressionResult out;
    out.route = RegressionRoute::StreamingCoreset;
    out.x_hat = x;
    out.residual_p = lp_norm_vec(Ab.leftCols(d) * x - Ab.col(d), p);
    out.certified_factor =
        sketch.certified_distortion() * std::sqrt((1.0 + eps) / (1.0 - eps));
    return out;
}

RegressionResult linf_regression(const Coreset& coreset_of_Ab) {
    if (coreset_of_Ab.size() == 0) throw algo_error("EmptyCoreset", "empty regression coreset");
    Matrix R = coreset_of_Ab.weighted_rows_matrix();
    const Index d = R.cols() - 1, m = R.rows();
    Matrix As = R.leftCols(d);
    Vector bs = R.col(d);

    // minimize t s.t. |<a_i, x> - b_i| <= t
    Vector obj = Vector::Zero(d + 1);
    obj(d) = -1.0;
    Matrix G(2 * m, d + 1);
    Vector h(2 * m);
    G.topLeftCorner(m, d) = As;
    G.bottomLeftCorner(m, d) = -As;
    G.col(d).setConstant(-1.0);
    h.head(m) = bs;
    h.tail(m) = -bs;
    LpSolution sol = solve_lp_max(obj, G, h);
    if (sol.status != LpStatus::Optimal)
        throw algo_error("SimplexStall", "l_inf regression LP failed");

    RegressionResult out;
    out.route = RegressionRoute::LinfLP;
    out.x_hat = sol.x.head(d);
    out.residual_p = (As * out.x_hat - bs).cwiseAbs().maxCoeff();
    out.certified_factor = coreset_of_Ab.distortion();
    return out;
}

json CssResult::to_json() const {
    json j;
    j["selected"] = selected;
    j["cost"] = cost;
    j["kappa"] = kappa;
    j["guesses_tried"] = guesses_tried;
    j["retry_exhausted"] = retry_exhausted;
    j["seed"] = seed;
    return j;
}

double css_cost(const Matrix& A, const std::vector<Index>& selected, double p) {
    if (selected.empty()) return entrywise_p_cost(A, p);
    Matrix As(A.rows(), static_cast<Index>(selected.size()));
    for (size_t j = 0; j < selected.size(); ++j) As.col(static_cast<Index>(j)) = A.col(selected[j]);
    double cost = 0.0;
    for (Index i = 0; i < A.cols(); ++i) {
        if (std::find(selected.begin(), selected.end(), i) != selected.end()) continue;
        IrlsResult fit = irls_solve(As, A.col(i), p, 1e-4, 300);
        cost += std::pow(fit.residual, p);
    }
    return cost;
}

namespace {

struct CssContext {
    const Matrix& A;
    double p, q;
    double threshold_scale;  // kappa^p (k+1)^{p-1} / d_cols * guess
    int k;
    std::uint64_t seed;
    const CssOptions& opts;
    bool retry_exhausted = false;
    std::uint64_t draw_counter = 0;

    double fit_cost(const std::vector<Index>& R, Index col) {
        Matrix Ar(A.rows(), static_cast<Index>(R.size()));
        for (size_t j = 0; j < R.size(); ++j) Ar.col(static_cast<Index>(j)) = A.col(R[j]);
        RegressionResult fit = sketch_solve_regression(
            Ar, A.col(col), p, q, opts.regression_eps,
            rng::substream(seed, {0x637373ULL, draw_counter++}).next_u64());
        return std::pow(fit.residual_p, p);
    }

    void select(std::vector<Index> cols, std::vector<Index>& out) {
        if (static_cast<int>(cols.size()) <= 2 * k) {
            out.insert(out.end(), cols.begin(), cols.end());
            return;
        }
        std::vector<Index> best_R;
        std::vector<Index> best_uncovered;
        size_t best_covered = 0;
        for (int attempt = 0; attempt < opts.max_draws; ++attempt) {
            rng::Stream stream = rng::substream(seed, {0x647261ULL, draw_counter++});
            std::vector<Index> pool = cols;
            std::vector<Index> R;
            for (int j = 0; j < 2 * k; ++j) {
                Index at = stream.uniform_index(static_cast<Index>(pool.size()));
                R.push_back(pool[static_cast<size_t>(at)]);
                pool.erase(pool.begin() + at);
            }
            std::vector<Index> uncovered;
            size_t covered = 0;
            for (Index col : pool) {
                if (fit_cost(R, col) <= threshold_scale)
                    ++covered;
                else
                    uncovered.push_back(col);
            }
            if (covered >= static_cast<size_t>(std::ceil(0.1 * static_cast<double>(cols.size())))) {
                out.insert(out.end(), R.begin(), R.end());
                select(std::move(uncovered), out);
                return;
            }
            if (covered >= best_covered) {
                best_covered = covered;
                best_R = R;
                best_uncovered = uncovered;
            }
        }
        retry_exhausted = true;  // reported; continue with the best attempt
        out.insert(out.end(), best_R.begin(), best_R.end());
        select(std::move(best_uncovered), out);
    }
};

}  // namespace

CssResult css_select(const Matrix& A, double p, int k, double q, std::uint64_t seed,
                     const CssOptions& opts) {
    require_finite(A, "css_select");
    if (p <= 2.0) throw config_error("BadIndex", "css_select needs p > 2");
    if (k < 1 || 2 * k >= A.cols() * 2) throw config_error("SizeLimit", "bad rank parameter");

    CssResult out;
    out.seed = seed;
    out.kappa = opts.kappa_constant * std::pow(static_cast<double>(k), 0.5 * (1.0 - q / p));

    const Index d_cols = A.cols();
    if (d_cols <= 2 * k) {
        for (Index j = 0; j < d_cols; ++j) out.selected.push_back(j);
        out.cost = 0.0;
        out.guesses_tried = 0;
        return out;
    }

    // geometric guesses of ||Delta||_p^p between the rank-k SVD reference and
    // the full matrix cost
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Matrix Ak = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal() *
                svd.matrixV().leftCols(k).transpose();
    double full_cost = entrywise_p_cost(A, p);
    double svd_cost = entrywise_p_cost(A - Ak, p);
    double lo = std::max(svd_cost / 4.0, full_cost * 1e-12);
    double hi = std::max(full_cost, lo * 2.0);

    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<Index> best_sel;
    bool best_retry = false;
    for (int g = 0; g < opts.guesses; ++g) {
        double guess =
            (opts.guesses == 1)
                ? hi
                : lo * std::pow(hi / lo, static_cast<double>(g) / static_cast<double>(opts.guesses - 1));
        CssContext ctx{A, p, q,
                       std::pow(out.kappa, p) *
                           std::pow(static_cast<double>(k + 1), p - 1.0) /
                           static_cast<double>(d_cols) * guess,
                       k, rng::substream(seed, {0x67ULL, static_cast<std::uint64_t>(g)}).next_u64(),
                       opts};
        std::vector<Index> cols;
        for (Index j = 0; j < d_cols; ++j) cols.push_back(j);
        std::vector<Index> sel;
        ctx.select(std::move(cols), sel);
        std::sort(sel.begin(), sel.end());
        sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
        double cost = css_cost(A, sel, p);
        ++out.guesses_tried;
        if (cost < best_cost || (cost == best_cost && sel.size() < best_sel.size())) {
            best_cost = cost;
            best_sel = sel;
            best_retry = ctx.retry_exhausted;
        }
    }
    out.selected = best_sel;
    out.cost = best_cost;
    out.retry_exhausted = best_retry;
    return out;
}

}  // namespace geostream
