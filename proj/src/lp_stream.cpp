#include "geostream/lp_stream.hpp"

#include "geostream/rng.hpp"

#include <algorithm>
#include <cmath>

namespace geostream {

LpQuadraticSketch::LpQuadraticSketch(Index d, double p, Index n_declared)
    : d_(d), p_(p), n_declared_(n_declared), gram_(d) {
    if (p < 2.0) throw config_error("BadIndex", "quadratic sketch needs p >= 2");
    if (n_declared < 1) throw config_error("SizeLimit", "n_declared must be >= 1");
}

double LpQuadraticSketch::ingest(const Vector& a) {
    require_finite(a, "LpQuadraticSketch::ingest");
    if (a.size() != d_) throw config_error("ShapeMismatch", "row dimension mismatch");
    if (rows_seen_ >= n_declared_)
        throw data_error("StreamOverflow", "stream exceeded the declared length");
    ++rows_seen_;

    double s_raw;
    if (a.norm() == 0.0)
        s_raw = 0.0;
    else if (!gram_.in_span(a))
        s_raw = 1.0;
    else
        s_raw = std::min(gram_.quad_pinv(a), 1.0);
    double s = std::max(s_raw, 1.0 / static_cast<double>(n_declared_));
    double w = std::pow(s, p_ / 4.0 - 0.5);
    double wp = round_up_pow2(w);

    s_pow_sum_ += std::pow(s, p_ / 2.0);
    if (p_ > 2.0) wprime_pow_sum_ += std::pow(wp, 2.0 * p_ / (p_ - 2.0));
    weight_log_.push_back(wp);
    gram_.add_row(wp * a);
    return wp;
}

double LpQuadraticSketch::query(const Vector& x) const {
    double q = x.dot(gram_.gram() * x);
    return std::sqrt(std::max(q, 0.0));
}

double LpQuadraticSketch::certified_distortion() const {
    if (p_ == 2.0) return 1.0;
    return std::pow(wprime_pow_sum_, (1.0 - 2.0 / p_) / 2.0);
}

LpQuadraticSketch LpQuadraticSketch::merge(const LpQuadraticSketch& a, const LpQuadraticSketch& b) {
    if (a.d_ != b.d_ || a.p_ != b.p_ || a.n_declared_ != b.n_declared_)
        throw config_error("ShapeMismatch", "sketches disagree on d, p, or n_declared");
    LpQuadraticSketch out(a.d_, a.p_, a.n_declared_);
    out.rows_seen_ = a.rows_seen_ + b.rows_seen_;
    out.s_pow_sum_ = a.s_pow_sum_ + b.s_pow_sum_;
    out.wprime_pow_sum_ = a.wprime_pow_sum_ + b.wprime_pow_sum_;
    out.weight_log_ = a.weight_log_;
    out.weight_log_.insert(out.weight_log_.end(), b.weight_log_.begin(), b.weight_log_.end());
    // Q = Q_a + Q_b via an eigendecomposition of the summed Gram
    Matrix sum = a.gram_.gram() + b.gram_.gram();
    Eigen::SelfAdjointEigenSolver<Matrix> es(sum);
    for (Index i = 0; i < sum.rows(); ++i) {
        double ev = es.eigenvalues()(i);
        if (ev > 0.0) out.gram_.add_row(std::sqrt(ev) * es.eigenvectors().col(i));
    }
    return out;
}

json LpQuadraticSketch::to_json() const {
    json j;
    j["p"] = p_;
    j["d"] = d_;
    j["n_declared"] = n_declared_;
    j["rows_seen"] = rows_seen_;
    j["certified_distortion"] = certified_distortion();
    j["sensitivity_power_sum"] = s_pow_sum_;
    j["Q"] = matrix_to_json(gram_.gram());
    return j;
}

LqTradeoffSketch::LqTradeoffSketch(Index d, double p, double q, Index n_declared,
                                   std::uint64_t seed)
    : LqTradeoffSketch(d, p, q, n_declared, seed, Options{}) {}

LqTradeoffSketch::LqTradeoffSketch(Index d, double p, double q, Index n_declared,
                                   std::uint64_t seed, const Options& opts)
    : d_(d), p_(p), q_(q), n_declared_(n_declared), opts_(opts),
      inner_(d, q, opts.block_size, opts.inner_epsilon, seed) {
    if (!(q >= 2.0 && q < p)) throw config_error("BadIndex", "trade-off sketch needs 2 <= q < p");
    if (n_declared < 1) throw config_error("SizeLimit", "n_declared must be >= 1");
}

double LqTradeoffSketch::ingest(const Vector& a) {
    require_finite(a, "LqTradeoffSketch::ingest");
    if (rows_seen_ >= n_declared_)
        throw data_error("StreamOverflow", "stream exceeded the declared length");
    ++rows_seen_;

    Matrix prefix = inner_.summary_rows();
    double est;
    if (a.norm() == 0.0)
        est = 0.0;
    else if (prefix.rows() == 0)
        est = 1.0;
    else if (q_ == 2.0) {
        auto s2 = generalized_sensitivity(a, prefix);
        est = s2 ? std::min(*s2, 1.0) : 1.0;
    } else
        est = lp_sensitivity_estimate(a, prefix, q_, opts_.estimator);

    double s = std::min(1.0, opts_.inflation * std::max(est, 1.0 / static_cast<double>(n_declared_)));
    double w = std::pow(s, (p_ / q_ - 1.0) / q_);
    double wp = round_up_pow2(w);
    weight_log_.push_back(wp);
    inner_.ingest(wp * a);
    return wp;
}

double LqTradeoffSketch::query(const Vector& x) const { return inner_.query(x); }

ExpEmbedSketch::ExpEmbedSketch(Index d, double p, std::uint64_t seed, int replicas)
    : p_(p), seed_(seed) {
    if (replicas < 1) throw config_error("SizeLimit", "need at least one replica");
    if (!(p > 0.0)) throw config_error("BadIndex", "exp embedding needs p > 0 (or infinity)");
    for (int r = 0; r < replicas; ++r) replicas_.emplace_back(d);
}

void ExpEmbedSketch::ingest(const Vector& a) {
    require_finite(a, "ExpEmbedSketch::ingest");
    const Index i = row_index_++;
    const bool weighted = std::isfinite(p_);
    for (size_t r = 0; r < replicas_.size(); ++r) {
        double w = 1.0;
        if (weighted) {
            double e = rng::substream(seed_, {static_cast<std::uint64_t>(r),
                                              static_cast<std::uint64_t>(i)})
                           .exponential();
            w = std::pow(std::max(e, 1e-300), -1.0 / p_);
        }
        replicas_[r].ingest(a, w);
    }
}

double ExpEmbedSketch::query_replica(int replica, const Vector& x) const {
    return replicas_.at(static_cast<size_t>(replica)).query_linf(x);
}

double ExpEmbedSketch::query_median(const Vector& x) const {
    std::vector<double> vals;
    vals.reserve(replicas_.size());
    for (const auto& c : replicas_) vals.push_back(c.query_linf(x));
    std::sort(vals.begin(), vals.end());
    size_t m = vals.size();
    return (m % 2 == 1) ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
}

}  // namespace geostream
