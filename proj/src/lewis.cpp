#include "geostream/lewis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace geostream {

namespace {

// Inverse of a PSD matrix; throws when numerically rank-deficient.
Matrix psd_inverse(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const Vector& ev = es.eigenvalues();
    double lmax = ev(ev.size() - 1);
    if (!(lmax > 0.0) || ev(0) <= kPsdCutoff * lmax)
        throw algo_error("SingularQuadratic", "quadratic form is numerically singular");
    return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

// Pseudoinverse with a relative cutoff: the fixed-point iterations stay
// well-defined on rank-deficient inputs (lifted matrices in particular).
Matrix psd_pseudo_inverse(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const Vector& ev = es.eigenvalues();
    double lmax = ev(ev.size() - 1);
    if (!(lmax > 0.0))
        throw algo_error("SingularQuadratic", "quadratic form vanished");
    Matrix P = Matrix::Zero(M.rows(), M.cols());
    for (Index i = 0; i < ev.size(); ++i)
        if (ev(i) > kPsdCutoff * lmax)
            P += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / ev(i);
    return P;
}

Matrix build_quadratic(const Matrix& A, const Vector& w, double p) {
    const double expo = 1.0 - 2.0 / p;
    Matrix M = Matrix::Zero(A.cols(), A.cols());
    for (Index i = 0; i < A.rows(); ++i) {
        if (A.row(i).norm() == 0.0) continue;
        double wi = w(i);
        double f = (expo == 0.0) ? 1.0 : std::pow(wi, expo);
        M.noalias() += f * A.row(i).transpose() * A.row(i);
    }
    return M;
}

double round_to_grid(double x, double delta) {
    return delta * std::ceil(x / delta);
}

}  // namespace

json LewisWeights::to_json() const {
    json j;
    j["p"] = p;
    j["gamma"] = gamma;
    j["alpha"] = alpha;
    switch (kind) {
        case WeightKind::Exact: j["kind"] = "exact"; break;
        case WeightKind::OneSided: j["kind"] = "one_sided"; break;
        case WeightKind::Overestimate: j["kind"] = "overestimate"; break;
    }
    j["fixed_point_residual"] = fixed_point_residual;
    j["iterations"] = iterations;
    j["w"] = vector_to_json(w);
    return j;
}

LewisWeights lewis_fixed_point(const Matrix& A, double p, const FixedPointOptions& opts) {
    require_finite(A, "lewis_fixed_point");
    if (p <= 0.0) throw config_error("BadIndex", "Lewis weights need p > 0");
    const Index n = A.rows();
    LewisWeights out;
    out.p = p;
    out.gamma = opts.gamma;
    out.kind = opts.gamma > 0.0 ? WeightKind::OneSided : WeightKind::Exact;

    // plain iteration contracts for p < 4; damp in log space beyond that
    const double theta = (p < 4.0) ? 1.0 : 2.0 / p;
    Vector w = Vector::Ones(n);
    for (Index i = 0; i < n; ++i)
        if (A.row(i).norm() == 0.0) w(i) = opts.gamma;

    Matrix Minv;
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        Minv = psd_pseudo_inverse(build_quadratic(A, w, p));
        Vector wn(n);
        double change = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (A.row(i).norm() == 0.0) {
                wn(i) = opts.gamma;
                continue;
            }
            double quad = A.row(i) * Minv * A.row(i).transpose();
            double raw = std::pow(std::max(quad, 0.0), p / 2.0);
            double next;
            if (theta == 1.0 || raw == 0.0 || w(i) == 0.0)
                next = raw;
            else
                next = std::exp((1.0 - theta) * std::log(w(i)) + theta * std::log(raw));
            wn(i) = std::max(opts.gamma, next);
            change = std::max(change, std::abs(wn(i) - w(i)));
        }
        w = wn;
        if (change <= 0.5 * opts.tol) {
            ++it;
            break;
        }
    }
    // exact fixed-point residual against the final quadratic
    Minv = psd_pseudo_inverse(build_quadratic(A, w, p));
    double resid = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (A.row(i).norm() == 0.0) continue;
        double quad = A.row(i) * Minv * A.row(i).transpose();
        double tau = std::pow(std::max(w(i), 0.0), 1.0 - 2.0 / p) * quad;
        resid = std::max(resid, std::abs(w(i) - std::max(opts.gamma, tau)));
    }
    out.w = w;
    out.fixed_point_residual = resid;
    out.iterations = it;
    out.alpha = (A.cols() > 0) ? w.sum() / static_cast<double>(A.cols()) : 1.0;
    return out;
}

LewisQuadratic lewis_quadratic_from(const Matrix& A, const LewisWeights& lw) {
    LewisQuadratic q;
    q.M = build_quadratic(A, lw.w, lw.p);
    q.p = lw.p;
    q.gamma = lw.gamma;
    return q;
}

LewisWeights lewis_averaged(const Matrix& A, double p, int rounds, double floor_scale) {
    require_finite(A, "lewis_averaged");
    if (p < 2.0) throw config_error("BadIndex", "averaged iterate needs p >= 2");
    const Index n = A.rows(), d = A.cols();
    if (n == 0 || d == 0) throw data_error("EmptyStream", "lewis_averaged needs a nonempty matrix");
    const double f = floor_scale * static_cast<double>(d) / static_cast<double>(n);
    const double delta = round_down_pow2(f / 16.0);
    int T = rounds > 0 ? rounds
                       : static_cast<int>(std::ceil(std::log2(
                             std::max(2.0, static_cast<double>(n) / static_cast<double>(d))))) + 4;

    Vector w_prev = Vector::Constant(n, f);
    Vector acc = Vector::Zero(n);
    for (int t = 0; t < T; ++t) {
        Matrix Minv = psd_pseudo_inverse(build_quadratic(A, w_prev, p));
        Vector w_t(n);
        for (Index i = 0; i < n; ++i) {
            if (A.row(i).norm() == 0.0) {
                w_t(i) = round_to_grid(f, delta);
                continue;
            }
            double quad = A.row(i) * Minv * A.row(i).transpose();
            double tau = std::pow(w_prev(i), 1.0 - 2.0 / p) * quad;
            w_t(i) = round_to_grid(std::max(f, tau), delta);
        }
        acc += w_t;
        w_prev = w_t;
    }
    LewisWeights out;
    out.w = (1.5 / static_cast<double>(T)) * acc;
    out.p = p;
    out.gamma = f;
    out.kind = WeightKind::Overestimate;
    out.alpha = out.w.sum() / static_cast<double>(d);
    out.iterations = T;
    return out;
}

double recover_weight(const LewisQuadratic& q, const Vector& a) {
    require_finite(a, "recover_weight");
    Matrix Minv = psd_inverse(q.M);
    double quad = a.dot(Minv * a);
    return std::max(q.gamma, std::pow(std::max(quad, 0.0), q.p / 2.0));
}

SwitchReport switch_weights(const Matrix& A, double p, double q, double tol) {
    SwitchReport rep;
    FixedPointOptions opts;
    opts.tol = tol * 1e-2;
    opts.max_iters = 256;
    LewisWeights wp = lewis_fixed_point(A, p, opts);

    Matrix B(A.rows(), A.cols());
    const double expo = 1.0 / q - 1.0 / p;
    for (Index i = 0; i < A.rows(); ++i)
        B.row(i) = std::pow(std::max(wp.w(i), 0.0), expo) * A.row(i);
    LewisWeights wq = lewis_fixed_point(B, q, opts);

    for (Index i = 0; i < A.rows(); ++i) {
        double denom = std::max(wp.w(i), 1e-300);
        rep.max_rel_discrepancy =
            std::max(rep.max_rel_discrepancy, std::abs(wq.w(i) - wp.w(i)) / denom);
    }

    // one-sided variant: averaged-iterate weights keep the property after switching
    LewisWeights v = lewis_averaged(A, std::max(p, 2.0));
    Matrix Bv(A.rows(), A.cols());
    const double expov = 1.0 / q - 1.0 / std::max(p, 2.0);
    for (Index i = 0; i < A.rows(); ++i)
        Bv.row(i) = std::pow(v.w(i), expov) * A.row(i);
    Matrix Minv = psd_pseudo_inverse(build_quadratic(Bv, v.w, q));
    for (Index i = 0; i < A.rows(); ++i) {
        if (Bv.row(i).norm() == 0.0) continue;
        double quad = Bv.row(i) * Minv * Bv.row(i).transpose();
        double tau = std::pow(v.w(i), 1.0 - 2.0 / q) * quad;
        rep.one_sided_violation = std::max(rep.one_sided_violation, tau - v.w(i));
    }
    return rep;
}

double ChangeOfDensityResult::estimate(const Vector& x) const {
    return estimator_scale * std::pow((B * x).array().abs().pow(q).sum(), 1.0 / q);
}

ChangeOfDensityResult change_of_density(const Matrix& A, double p, double q,
                                        const LewisWeights& lw) {
    require_finite(A, "change_of_density");
    if (p <= 0.0 || q <= 0.0) throw config_error("BadIndex", "change_of_density needs p, q > 0");
    if (lw.w.size() != A.rows()) throw config_error("ShapeMismatch", "weight vector length mismatch");
    if (lw.p != p) throw config_error("KindMismatch", "weights were computed for a different index p");

    double eff_sum;
    switch (lw.kind) {
        case WeightKind::Exact: eff_sum = static_cast<double>(A.cols()); break;
        case WeightKind::OneSided: eff_sum = lw.w.sum(); break;
        case WeightKind::Overestimate: eff_sum = lw.alpha * static_cast<double>(A.cols()); break;
        default: eff_sum = lw.w.sum(); break;
    }
    eff_sum = std::max(eff_sum, 1.0);

    ChangeOfDensityResult out;
    out.p = p;
    out.q = q;
    out.B = Matrix(A.rows(), A.cols());
    const double expo = 1.0 / q - 1.0 / p;
    for (Index i = 0; i < A.rows(); ++i) {
        double wi = std::max(lw.w(i), 0.0);
        double f = (expo == 0.0) ? 1.0 : std::pow(wi, expo);
        out.B.row(i) = f * A.row(i);
    }
    if (p >= q) {
        out.kappa = std::pow(eff_sum, 1.0 / q - 1.0 / p);
        out.lambda = std::pow(eff_sum, std::max(0.0, 0.5 - 1.0 / q) * (p - q) / p);
        out.estimator_scale = out.lambda;
    } else {
        out.kappa = std::pow(eff_sum, 1.0 / p - 1.0 / q);
        out.lambda = std::pow(eff_sum, std::max(0.0, 0.5 - 1.0 / p) * (q - p) / q);
        out.estimator_scale = out.kappa;
    }
    return out;
}

StreamLewisResult stream_lewis_quadratic(ReplayableRowSource& src, double p,
                                         StreamLewisMode mode, const StreamLewisOptions& opts) {
    if (p <= 0.0) throw config_error("BadIndex", "Lewis quadratic needs p > 0");
    if (mode == StreamLewisMode::FewPass && p >= 4.0)
        throw config_error("UnsupportedIndex", "FewPass contraction holds only for p < 4");
    const Index n = src.row_count(), d = src.dim();
    if (n == 0 || d == 0) throw data_error("EmptyStream", "empty row source");
    const double f = static_cast<double>(d) / static_cast<double>(n);

    StreamLewisResult res;
    res.p = p;
    res.mode = mode;
    res.floor_value = f;
    res.quadratic.p = p;
    res.quadratic.gamma = opts.gamma > 0.0 ? opts.gamma : f;

    auto check_pass_budget = [&]() {
        if (src.passes() >= opts.pass_cap)
            throw algo_error("PassBudgetExceeded", "pass cap hit before the algorithm finished");
    };

    Vector a;
    if (mode == StreamLewisMode::FewPass) {
        const double expo = 1.0 - 2.0 / p;
        const double range_lo = std::min(1.0, std::pow(f, expo));
        const double delta = round_down_pow2(range_lo / 32.0);
        res.delta = delta;
        int T = opts.rounds > 0
                    ? opts.rounds
                    : static_cast<int>(std::ceil(std::log2(
                          std::max(2.0, std::log2(std::max(4.0, static_cast<double>(n))))))) + 6;
        res.rounds = T;

        check_pass_budget();
        src.rewind();
        Matrix M = Matrix::Zero(d, d);
        while (src.next(a)) M.noalias() += a * a.transpose();

        for (int t = 0; t < T; ++t) {
            Matrix Minv = psd_inverse(M);
            check_pass_budget();
            src.rewind();
            Matrix Q = Matrix::Zero(d, d);
            while (src.next(a)) {
                if (a.norm() == 0.0) continue;
                double quad = a.dot(Minv * a);
                double weight = std::max(f, std::pow(std::max(quad, 0.0), p / 2.0));
                double v = (expo == 0.0) ? 1.0
                                         : round_to_grid(std::pow(weight, expo), delta);
                Q.noalias() += v * a * a.transpose();
            }
            M = Q;
        }
        res.quadratic.M = M;
        res.passes = src.passes();
        return res;
    }

    // LogPass: keep every round's quadratic; weights are recovered by replaying
    // the per-row chain against the stored iterates.
    if (p < 2.0) throw config_error("UnsupportedIndex", "LogPass needs p >= 2");
    const double delta = round_down_pow2(f / 16.0);
    res.delta = delta;
    int T = opts.rounds > 0
                ? opts.rounds
                : static_cast<int>(std::ceil(std::log2(
                      std::max(2.0, static_cast<double>(n) / static_cast<double>(d))))) + 4;
    res.rounds = T;

    check_pass_budget();
    src.rewind();
    Matrix Q0 = Matrix::Zero(d, d);
    while (src.next(a)) Q0.noalias() += std::pow(f, 1.0 - 2.0 / p) * a * a.transpose();
    res.round_quadratics.push_back(Q0);

    std::vector<Matrix> inverses;
    inverses.push_back(psd_inverse(Q0));
    for (int t = 1; t <= T; ++t) {
        check_pass_budget();
        src.rewind();
        Matrix Qt = Matrix::Zero(d, d);
        while (src.next(a)) {
            if (a.norm() == 0.0) continue;
            double w = f;
            for (int k = 1; k <= t; ++k) {
                double quad = a.dot(inverses[static_cast<size_t>(k - 1)] * a);
                double tau = std::pow(w, 1.0 - 2.0 / p) * quad;
                w = round_to_grid(std::max(f, tau), delta);
            }
            Qt.noalias() += std::pow(w, 1.0 - 2.0 / p) * a * a.transpose();
        }
        res.round_quadratics.push_back(Qt);
        inverses.push_back(psd_inverse(Qt));
    }
    res.quadratic.M = res.round_quadratics.back();
    res.passes = src.passes();
    return res;
}

double recover_stream_weight(const StreamLewisResult& r, const Vector& a) {
    require_finite(a, "recover_stream_weight");
    if (a.norm() == 0.0) return r.quadratic.gamma;
    if (r.mode == StreamLewisMode::FewPass) return recover_weight(r.quadratic, a);
    const double f = r.floor_value;
    double w = f, acc = 0.0;
    const int T = r.rounds;
    for (int k = 1; k <= T; ++k) {
        Matrix Minv = psd_inverse(r.round_quadratics[static_cast<size_t>(k - 1)]);
        double quad = a.dot(Minv * a);
        double tau = std::pow(w, 1.0 - 2.0 / r.p) * quad;
        w = r.delta * std::ceil(std::max(f, tau) / r.delta);
        acc += w;
    }
    return 1.5 * acc / static_cast<double>(T);
}

LiftedLewisRecipe lewis_lifted_weights(const Matrix& A, double p, Index size_limit) {
    if (p < 4.0) throw config_error("BadIndex", "the lift recipe targets p >= 4");
    LiftedLewisRecipe rec;
    rec.k = static_cast<int>(std::floor(p / 4.0)) + 1;
    rec.lifted_p = p / static_cast<double>(rec.k);
    Matrix lift = khatri_rao_lift(A, rec.k, size_limit);
    rec.weights = lewis_fixed_point(lift, rec.lifted_p);
    return rec;
}

}  // namespace geostream
