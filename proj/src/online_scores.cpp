#include "geostream/online_scores.hpp"

#include "geostream/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace geostream {

json AuditReport::to_json() const {
    json j;
    j["sum"] = sum;
    j["bound"] = bound;
    j["constant"] = constant;
    j["pass"] = pass;
    j["used_condition_number"] = used_condition_number;
    if (used_condition_number) j["online_condition_number"] = online_condition_number;
    return j;
}

namespace {

double lp_norm(const Vector& v, double p) {
    return std::pow(v.array().abs().pow(p).sum(), 1.0 / p);
}

// log |<c,z>| - log ||Mz||_p on the unit sphere
double ratio_log(const Vector& c, const Matrix& M, double p, const Vector& z) {
    double num = std::abs(c.dot(z));
    if (num <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(num) - std::log(lp_norm(M * z, p));
}

double sphere_net_max(const Vector& c, const Matrix& M, double p, int res) {
    const Index r = c.size();
    double best = -std::numeric_limits<double>::infinity();
    auto consider = [&](const Vector& z) {
        double v = ratio_log(c, M, p, z);
        if (v > best) best = v;
    };
    if (r == 1) {
        Vector z(1);
        z << 1.0;
        consider(z);
    } else if (r == 2) {
        for (int i = 0; i < res; ++i) {
            double t = M_PI * i / res;
            Vector z(2);
            z << std::cos(t), std::sin(t);
            consider(z);
        }
    } else {
        for (int i = 0; i <= res; ++i) {
            double th = M_PI * i / res;  // polar
            for (int j = 0; j < 2 * res; ++j) {
                double ph = M_PI * j / res;  // azimuth, half turn x2 = full
                Vector z(3);
                z << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
                consider(z);
            }
        }
    }
    return std::exp(best);
}

double ascent_max(const Vector& c, const Matrix& M, double p, const LpSensitivityOptions& opts) {
    const Index r = c.size();
    rng::Stream stream(0x6c70617363656e74ULL);  // fixed: estimator is deterministic
    double best = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < opts.starts; ++s) {
        Vector z;
        if (s == 0) {
            z = c.normalized();
        } else {
            z = Vector(r);
            for (Index i = 0; i < r; ++i) z(i) = stream.gaussian();
            z += 0.5 * c.normalized() * z.norm();
            if (z.norm() == 0.0) z = c;
            z.normalize();
        }
        double t = opts.step;
        double cur = ratio_log(c, M, p, z);
        for (int it = 0; it < opts.iterations; ++it) {
            double ip = c.dot(z);
            if (ip == 0.0) {
                z = (z + 1e-3 * c.normalized()).normalized();
                cur = ratio_log(c, M, p, z);
                continue;
            }
            Vector mz = M * z;
            double npp = mz.array().abs().pow(p).sum();
            Vector sgn = (mz.array().sign() * mz.array().abs().pow(p - 1.0)).matrix();
            Vector grad = c * (1.0 / ip) - (M.transpose() * sgn) / npp;
            grad -= z * z.dot(grad);  // tangent projection
            if (grad.norm() < 1e-14) break;
            bool stepped = false;
            while (t > 1e-12) {
                Vector zn = (z + t * grad).normalized();
                double vn = ratio_log(c, M, p, zn);
                if (vn > cur) {
                    z = zn;
                    cur = vn;
                    t = std::min(t * 1.5, 1.0);
                    stepped = true;
                    break;
                }
                t *= 0.5;
            }
            if (!stepped) break;
        }
        best = std::max(best, cur);
    }
    return std::exp(best);
}

}  // namespace

double lp_sensitivity_estimate(const Vector& a, const Matrix& B, double p,
                               const LpSensitivityOptions& opts) {
    require_finite(a, "lp_sensitivity_estimate");
    if (p <= 0.0) throw config_error("BadIndex", "lp sensitivity needs p > 0");
    if (B.rows() == 0) return 1.0;
    SpectralFactorization f = SpectralFactorization::compute(B);
    if (a.norm() == 0.0) return 0.0;
    if (!f.in_rowspan(a)) return 1.0;
    if (opts.exact_oracle && f.rank > 3)
        throw config_error("OracleLimit", "sphere-net oracle gated to rank <= 3");
    // optimize in span coordinates z, x = V z
    Vector c = f.V.transpose() * a;
    Matrix M = B * f.V;
    double ratio = opts.exact_oracle ? sphere_net_max(c, M, p, opts.net_resolution)
                                     : ascent_max(c, M, p, opts);
    double sens = std::pow(ratio, p);
    return std::min(sens, 1.0);
}

OnlineScoreState::OnlineScoreState(Index d, std::optional<double> p)
    : gram_(d), prefix_(0, d), p_(p) {}

void OnlineScoreState::track_condition_number() {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram_.gram());
    const Vector& ev = es.eigenvalues();
    double lmax = ev(ev.size() - 1);
    if (lmax <= 0.0) return;
    sigma_max_ = std::max(sigma_max_, std::sqrt(lmax));
    double lmin = lmax;
    for (Index i = 0; i < ev.size(); ++i)
        if (ev(i) > kPsdCutoff * lmax) lmin = std::min(lmin, ev(i));
    max_inv_sigma_min_ = std::max(max_inv_sigma_min_, 1.0 / std::sqrt(lmin));
}

double OnlineScoreState::observe_online_leverage(const Vector& a) {
    require_finite(a, "observe_online_leverage");
    double score;
    if (a.norm() == 0.0)
        score = 0.0;
    else if (!gram_.in_span(a))
        score = 1.0;
    else
        score = std::min(gram_.quad_pinv(a), 1.0);
    gram_.add_row(a);
    ++count_;
    score_sum_ += score;
    scores_.push_back(score);
    if (count_ % kCondCheckPeriod == 0 || count_ == 1) track_condition_number();
    return score;
}

double OnlineScoreState::observe_online_lp_sensitivity(const Vector& a,
                                                       const LpSensitivityOptions& opts) {
    require_finite(a, "observe_online_lp_sensitivity");
    if (!p_) throw config_error("BadIndex", "state was not constructed with a sensitivity index p");
    double score;
    if (a.norm() == 0.0)
        score = 0.0;
    else
        score = lp_sensitivity_estimate(a, prefix_, *p_, opts);
    prefix_.conservativeResize(prefix_.rows() + 1, Eigen::NoChange);
    prefix_.row(prefix_.rows() - 1) = a.transpose();
    gram_.add_row(a);
    ++count_;
    score_sum_ += score;
    scores_.push_back(score);
    if (count_ % kCondCheckPeriod == 0 || count_ == 1) track_condition_number();
    return score;
}

double OnlineScoreState::online_condition_number() const {
    // kappa^OL = ||A||_2 * max_i ||A_i^-||_2, sampled at checkpoints
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram_.gram());
    double lmax = es.eigenvalues()(es.eigenvalues().size() - 1);
    double smax = std::max(sigma_max_, lmax > 0.0 ? std::sqrt(lmax) : 0.0);
    if (smax <= 0.0 || max_inv_sigma_min_ <= 0.0) return 1.0;
    return std::max(1.0, smax * max_inv_sigma_min_);
}

AuditReport OnlineScoreState::audit_sums(Index n, Index d, std::optional<double> integer_bound,
                                         double constant) const {
    AuditReport rep;
    rep.sum = score_sum_;
    rep.constant = constant;
    double logn = std::log(std::max<double>(static_cast<double>(n), 2.0));
    double base;
    if (integer_bound) {
        base = constant * static_cast<double>(d) * logn;
    } else {
        rep.used_condition_number = true;
        rep.online_condition_number = online_condition_number();
        base = constant * static_cast<double>(d) *
               std::log(std::max(2.0, static_cast<double>(n) * rep.online_condition_number));
    }
    rep.bound = p_ ? std::pow(base, *p_ / 2.0) : base;
    rep.pass = rep.sum <= rep.bound;
    return rep;
}

double uniform_lp_bound(double gamma, Index d, Index n, double p) {
    if (p < 2.0) throw config_error("BadIndex", "uniform_lp_bound needs p >= 2");
    if (gamma < 1.0) throw config_error("BadIndex", "uniform_lp_bound needs gamma >= 1");
    return std::pow(gamma * static_cast<double>(d), p / 2.0) / static_cast<double>(n);
}

}  // namespace geostream
