#include "geostream/sampling.hpp"

#include "geostream/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geostream {

json SampledMatrix::to_json() const {
    json j;
    j["p"] = p;
    j["seed"] = seed;
    j["source_indices"] = source_indices;
    j["scales"] = vector_to_json(scales);
    j["rows"] = matrix_to_json(rows);
    return j;
}

SampledMatrix lewis_sample(const Matrix& A, double p, const Vector& weights, Index s,
                           std::uint64_t seed) {
    require_finite(A, "lewis_sample");
    if (weights.size() != A.rows())
        throw config_error("ShapeMismatch", "weight vector length mismatch");
    if (s < 1) throw config_error("SizeLimit", "sample budget must be >= 1");
    double total = weights.sum();
    if (!(total > 0.0)) throw algo_error("DegenerateWeights", "weights sum to zero");

    // cumulative distribution over rows
    std::vector<double> cdf(static_cast<size_t>(A.rows()));
    double acc = 0.0;
    for (Index i = 0; i < A.rows(); ++i) {
        acc += std::max(weights(i), 0.0) / total;
        cdf[static_cast<size_t>(i)] = acc;
    }
    cdf.back() = 1.0;

    rng::Stream stream = rng::substream(seed, {0x6c657769ULL});
    SampledMatrix out;
    out.p = p;
    out.seed = seed;
    out.rows = Matrix(s, A.cols());
    out.scales = Vector(s);
    out.source_indices.resize(static_cast<size_t>(s));
    for (Index t = 0; t < s; ++t) {
        double u = stream.uniform01();
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        Index i = static_cast<Index>(it - cdf.begin());
        double qi = std::max(weights(i), 0.0) / total;
        double scale = std::pow(static_cast<double>(s) * qi, -1.0 / p);
        out.rows.row(t) = scale * A.row(i);
        out.scales(t) = scale;
        out.source_indices[static_cast<size_t>(t)] = i;
    }
    return out;
}

MergeTreeSummary::MergeTreeSummary(Index d, double p, Index block_size, double epsilon,
                                   std::uint64_t seed)
    : d_(d), p_(p), block_size_(block_size), epsilon_(epsilon), seed_(seed) {
    if (block_size < 1) throw config_error("SizeLimit", "block size must be >= 1");
}

Matrix MergeTreeSummary::reduce_pair(const Matrix& a, const Matrix& b) {
    Matrix stacked(a.rows() + b.rows(), d_);
    stacked << a, b;
    LewisWeights lw = (p_ == 2.0) ? [&] {
        LewisWeights l;
        l.w = leverage_scores(stacked);
        l.p = 2.0;
        l.kind = WeightKind::Exact;
        return l;
    }()
                                  : lewis_fixed_point(stacked, p_);
    SampledMatrix s = lewis_sample(stacked, p_, lw.w, block_size_,
                                   rng::substream(seed_, {0x726564ULL, reduce_counter_++}).next_u64());
    return s.rows;  // scales already folded in
}

void MergeTreeSummary::track_inventory() {
    size_t inv = buffer_.empty() ? 0 : 1;
    for (const auto& l : levels_)
        if (l) ++inv;
    max_inventory_ = std::max(max_inventory_, inv);
}

void MergeTreeSummary::push_block(Matrix block, size_t level) {
    while (true) {
        if (levels_.size() <= level) levels_.resize(level + 1);
        if (!levels_[level]) {
            levels_[level] = std::move(block);
            track_inventory();
            return;
        }
        Matrix sibling = std::move(*levels_[level]);
        levels_[level].reset();
        track_inventory();
        block = reduce_pair(sibling, block);
        ++level;
    }
}

void MergeTreeSummary::ingest(const Vector& a) {
    require_finite(a, "MergeTreeSummary::ingest");
    if (a.size() != d_) throw config_error("ShapeMismatch", "row dimension mismatch");
    buffer_.push_back(a);
    ++n_ingested_;
    track_inventory();
    if (static_cast<Index>(buffer_.size()) == block_size_) {
        Matrix block(block_size_, d_);
        for (Index i = 0; i < block_size_; ++i) block.row(i) = buffer_[static_cast<size_t>(i)].transpose();
        buffer_.clear();
        push_block(std::move(block), 0);
    }
}

Matrix MergeTreeSummary::summary_rows() const {
    Index total = static_cast<Index>(buffer_.size());
    for (const auto& l : levels_)
        if (l) total += l->rows();
    Matrix out(total, d_);
    Index at = 0;
    for (const auto& l : levels_)
        if (l) {
            out.middleRows(at, l->rows()) = *l;
            at += l->rows();
        }
    for (const auto& r : buffer_) out.row(at++) = r.transpose();
    return out;
}

double MergeTreeSummary::query(const Vector& x) const {
    Matrix s = summary_rows();
    if (s.rows() == 0) return 0.0;
    return std::pow((s * x).array().abs().pow(p_).sum(), 1.0 / p_);
}

size_t MergeTreeSummary::block_inventory() const {
    size_t inv = buffer_.empty() ? 0 : 1;
    for (const auto& l : levels_)
        if (l) ++inv;
    return inv;
}

MergeTreeSummary MergeTreeSummary::merge(const MergeTreeSummary& a, const MergeTreeSummary& b) {
    if (a.d_ != b.d_ || a.p_ != b.p_ || a.block_size_ != b.block_size_)
        throw config_error("ShapeMismatch", "summaries disagree on d, p, or block size");
    MergeTreeSummary out(a.d_, a.p_, a.block_size_, std::min(a.epsilon_, b.epsilon_),
                         a.seed_ ^ (b.seed_ << 1));
    out.reduce_counter_ = a.reduce_counter_ + b.reduce_counter_ + 1;
    out.n_ingested_ = a.n_ingested_ + b.n_ingested_;
    for (size_t lvl = 0; lvl < a.levels_.size(); ++lvl)
        if (a.levels_[lvl]) out.push_block(*a.levels_[lvl], lvl);
    for (size_t lvl = 0; lvl < b.levels_.size(); ++lvl)
        if (b.levels_[lvl]) out.push_block(*b.levels_[lvl], lvl);
    for (const auto& r : a.buffer_) out.ingest(r);
    for (const auto& r : b.buffer_) out.ingest(r);
    out.n_ingested_ = a.n_ingested_ + b.n_ingested_;
    return out;
}

OnlineSpectralResult online_spectral_sample(const Matrix& A, double eps, std::uint64_t seed) {
    require_finite(A, "online_spectral_sample");
    if (!(eps > 0.0) || eps >= 1.0)
        throw config_error("BadIndex", "online spectral sampling needs eps in (0,1)");
    const Index d = A.cols();
    const double c = 8.0 * std::log(std::max<double>(static_cast<double>(d), 2.0)) / (eps * eps);

    OnlineSpectralResult out;
    out.c = c;
    out.keep_probabilities = Vector(A.rows());
    out.sample.p = 2.0;
    out.sample.seed = seed;

    GramPseudoInverse gram(d);
    std::vector<Vector> kept;
    std::vector<Index> kept_idx;
    std::vector<double> kept_scale;
    for (Index i = 0; i < A.rows(); ++i) {
        Vector a = A.row(i).transpose();
        double l_tilde;
        if (a.norm() == 0.0)
            l_tilde = 0.0;
        else if (!gram.in_span(a))
            l_tilde = 1.0;
        else
            l_tilde = std::min((1.0 + eps) * gram.quad_pinv(a), 1.0);
        double pi = std::min(c * l_tilde, 1.0);
        out.keep_probabilities(i) = pi;
        double u = rng::substream(seed, {0x6f6e6cULL, static_cast<std::uint64_t>(i)}).uniform01();
        if (pi > 0.0 && u < pi) {
            double scale = 1.0 / std::sqrt(pi);
            kept.push_back(scale * a);
            kept_idx.push_back(i);
            kept_scale.push_back(scale);
            gram.add_row(scale * a);
        }
    }
    out.sample.rows = Matrix(static_cast<Index>(kept.size()), d);
    out.sample.scales = Vector(static_cast<Index>(kept.size()));
    for (size_t j = 0; j < kept.size(); ++j) {
        out.sample.rows.row(static_cast<Index>(j)) = kept[j].transpose();
        out.sample.scales(static_cast<Index>(j)) = kept_scale[j];
    }
    out.sample.source_indices = std::move(kept_idx);
    return out;
}

LpLqEmbedding lp_to_lq_embed(const Matrix& A, double p, double q, double eps,
                             std::uint64_t seed, Index sample_budget) {
    if (!(p >= q && q >= 2.0))
        throw config_error("BadIndex", "lp_to_lq_embed needs p >= q >= 2");
    LewisWeights wp = lewis_fixed_point(A, p);
    ChangeOfDensityResult cod = change_of_density(A, p, q, wp);

    LewisWeights wq = (q == 2.0) ? [&] {
        LewisWeights l;
        l.w = leverage_scores(cod.B);
        l.p = 2.0;
        l.kind = WeightKind::Exact;
        return l;
    }()
                                 : lewis_fixed_point(cod.B, q);

    Index s = sample_budget;
    if (s <= 0) {
        double dd = static_cast<double>(A.cols());
        s = static_cast<Index>(std::ceil(
            40.0 * std::pow(dd, std::max(1.0, q / 2.0)) * std::log(dd + 2.0) / (eps * eps)));
    }
    SampledMatrix R = lewis_sample(cod.B, q, wq.w, s, rng::substream(seed, {0x656d62ULL}).next_u64());

    LpLqEmbedding out;
    out.p = p;
    out.q = q;
    out.eps = eps;
    out.sample_budget = s;
    out.seed = seed;
    // the lower side of the sandwich pays the sampling fluctuation up front
    double scale = cod.estimator_scale / (1.0 - eps);
    out.SA = scale * R.rows;
    out.kappa_core = cod.kappa * cod.lambda;
    out.kappa_reported = cod.kappa * cod.lambda * (1.0 + eps) / (1.0 - eps);
    return out;
}

KhatriRaoSpectralCoreset::KhatriRaoSpectralCoreset(Index d, int k, Index block_size,
                                                   std::uint64_t seed, Index lift_limit)
    : d_(d), k_(k), block_size_(block_size), seed_(seed), lift_limit_(lift_limit) {
    if (k < 1) throw config_error("SizeLimit", "lift order must be >= 1");
    double dk = std::pow(static_cast<double>(d), k);
    if (dk > static_cast<double>(lift_limit))
        throw config_error("SizeLimit", "d^k exceeds the configured lift limit");
}

Matrix KhatriRaoSpectralCoreset::reduce_pair(const Matrix& a, const Matrix& b) {
    Matrix stacked(a.rows() + b.rows(), d_);
    stacked << a, b;
    Matrix lifted = khatri_rao_lift(stacked, k_, lift_limit_);
    Vector tau = leverage_scores(lifted);
    SampledMatrix s =
        lewis_sample(lifted, 2.0, tau, block_size_,
                     rng::substream(seed_, {0x6b72ULL, reduce_counter_++}).next_u64());
    // fold the lifted scale c back onto the base row as c^{1/k}
    Matrix out(s.rows.rows(), d_);
    for (Index i = 0; i < out.rows(); ++i) {
        Index src = s.source_indices[static_cast<size_t>(i)];
        out.row(i) = std::pow(s.scales(i), 1.0 / static_cast<double>(k_)) * stacked.row(src);
    }
    return out;
}

void KhatriRaoSpectralCoreset::ingest(const Vector& a) {
    require_finite(a, "KhatriRaoSpectralCoreset::ingest");
    if (a.size() != d_) throw config_error("ShapeMismatch", "row dimension mismatch");
    buffer_.push_back(a);
    if (static_cast<Index>(buffer_.size()) < block_size_) return;
    Matrix block(block_size_, d_);
    for (Index i = 0; i < block_size_; ++i) block.row(i) = buffer_[static_cast<size_t>(i)].transpose();
    buffer_.clear();
    size_t level = 0;
    while (true) {
        if (levels_.size() <= level) levels_.resize(level + 1);
        if (!levels_[level]) {
            levels_[level] = std::move(block);
            return;
        }
        Matrix sibling = std::move(*levels_[level]);
        levels_[level].reset();
        block = reduce_pair(sibling, block);
        ++level;
    }
}

Matrix KhatriRaoSpectralCoreset::base_rows() const {
    Index total = static_cast<Index>(buffer_.size());
    for (const auto& l : levels_)
        if (l) total += l->rows();
    Matrix out(total, d_);
    Index at = 0;
    for (const auto& l : levels_)
        if (l) {
            out.middleRows(at, l->rows()) = *l;
            at += l->rows();
        }
    for (const auto& r : buffer_) out.row(at++) = r.transpose();
    return out;
}

Matrix KhatriRaoSpectralCoreset::lifted_rows() const {
    return khatri_rao_lift(base_rows(), k_, lift_limit_);
}

}  // namespace geostream
