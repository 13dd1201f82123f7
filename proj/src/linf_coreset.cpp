#include "geostream/linf_coreset.hpp"

#include <algorithm>
#include <cmath>

namespace geostream {

namespace {
// Sensitivity ties at 1.0 are kept; the slack absorbs pseudoinverse rounding.
constexpr double kTieTol = 1e-9;
}

Coreset::Coreset(Index d) : d_(d), gram_(d) {}

Ingest Coreset::ingest(const Vector& a, double weight) {
    return ingest_at(n_seen_, a, weight);
}

Ingest Coreset::ingest_at(Index stream_position, const Vector& a, double weight) {
    require_finite(a, "Coreset::ingest");
    if (a.size() != d_) throw config_error("ShapeMismatch", "row dimension mismatch");
    const Index position = stream_position;
    ++n_seen_;
    if (a.norm() == 0.0 || weight == 0.0) return Ingest::Discarded;
    Vector v = weight * a;
    bool keep;
    if (!gram_.in_span(v)) {
        keep = true;
    } else {
        keep = gram_.quad_pinv(v) >= 1.0 - kTieTol;
    }
    if (!keep) return Ingest::Discarded;
    indices_.push_back(position);
    rows_.push_back(a);
    weights_.push_back(weight);
    gram_.add_row(v);
    return Ingest::Kept;
}

double Coreset::query(const Vector& x, CoresetNorm norm) const {
    if (rows_.empty()) throw algo_error("EmptyCoreset", "query on an empty coreset");
    if (norm == CoresetNorm::L2) {
        double q = x.dot(gram_.gram() * x);
        return std::sqrt(std::max(q, 0.0));
    }
    double best = 0.0;
    for (size_t i = 0; i < rows_.size(); ++i)
        best = std::max(best, weights_[i] * std::abs(rows_[i].dot(x)));
    return best;
}

double Coreset::distortion() const {
    return std::sqrt(static_cast<double>(std::max<size_t>(size(), 1)));
}

Coreset::SizeBound Coreset::certified_size_bound(std::optional<double> kappa_ol,
                                                 double constant) const {
    SizeBound b;
    b.constant = constant;
    double n = std::max<double>(static_cast<double>(n_seen_), 2.0);
    double scale = kappa_ol ? n * std::max(1.0, *kappa_ol) : n;
    b.bound = constant * static_cast<double>(d_) * std::log(scale);
    b.within = static_cast<double>(size()) <= b.bound;
    return b;
}

Matrix Coreset::rows_matrix() const {
    Matrix M(static_cast<Index>(rows_.size()), d_);
    for (size_t i = 0; i < rows_.size(); ++i) M.row(static_cast<Index>(i)) = rows_[i].transpose();
    return M;
}

Matrix Coreset::weighted_rows_matrix() const {
    Matrix M = rows_matrix();
    for (size_t i = 0; i < weights_.size(); ++i) M.row(static_cast<Index>(i)) *= weights_[i];
    return M;
}

json Coreset::to_json() const {
    json j;
    j["d"] = d_;
    j["n_seen"] = n_seen_;
    j["indices"] = indices_;
    j["weights"] = weights_;
    j["rows"] = matrix_to_json(rows_matrix());
    return j;
}

Coreset Coreset::from_json(const json& j) {
    Coreset c(j.at("d").get<Index>());
    Matrix rows = matrix_from_json(j.at("rows"));
    auto idx = j.at("indices").get<std::vector<Index>>();
    auto w = j.at("weights").get<std::vector<double>>();
    if (static_cast<size_t>(rows.rows()) != idx.size() || idx.size() != w.size())
        throw data_error("IoError", "inconsistent coreset JSON");
    for (Index i = 0; i < rows.rows(); ++i) {
        c.indices_.push_back(idx[static_cast<size_t>(i)]);
        c.rows_.push_back(rows.row(i).transpose());
        c.weights_.push_back(w[static_cast<size_t>(i)]);
        c.gram_.add_row(w[static_cast<size_t>(i)] * rows.row(i).transpose());
    }
    c.n_seen_ = j.at("n_seen").get<Index>();
    return c;
}

KRobustCascade::KRobustCascade(Index d, int k) : k_(k) {
    if (k < 0) throw config_error("BadIndex", "k-robust cascade needs k >= 0");
    for (int i = 0; i <= k; ++i) levels_.emplace_back(d);
}

void KRobustCascade::ingest(const Vector& a) {
    const Index position = n_seen_++;
    for (auto& level : levels_)
        if (level.ingest_at(position, a) == Ingest::Kept) return;
}

double KRobustCascade::query(const Vector& x) const {
    std::vector<double> vals;
    for (const auto& level : levels_) {
        Matrix rows = level.rows_matrix();
        for (Index i = 0; i < rows.rows(); ++i) vals.push_back(std::abs(rows.row(i).dot(x)));
    }
    if (vals.size() <= static_cast<size_t>(k_))
        throw algo_error("InsufficientRows", "k-robust query needs more than k stored rows");
    std::nth_element(vals.begin(), vals.begin() + k_, vals.end(), std::greater<double>());
    return vals[static_cast<size_t>(k_)];
}

size_t KRobustCascade::union_size() const {
    size_t total = 0;
    for (const auto& level : levels_) total += level.size();
    return total;
}

size_t KRobustCascade::max_level_size() const {
    size_t m = 0;
    for (const auto& level : levels_) m = std::max(m, level.size());
    return m;
}

double KRobustCascade::distortion() const {
    return std::sqrt(static_cast<double>(std::max<size_t>(max_level_size(), 1)));
}

RestrictedCoreset::RestrictedCoreset(Index d, double norm_lo, double norm_hi)
    : d_(d), lo_(norm_lo), hi_(norm_hi),
      cos_threshold_(1.0 / std::sqrt(2.0 * static_cast<double>(d) - 1.0)) {}

Ingest RestrictedCoreset::ingest(const Vector& a) {
    require_finite(a, "RestrictedCoreset::ingest");
    if (a.size() != d_) throw config_error("ShapeMismatch", "row dimension mismatch");
    double na = a.norm();
    if (na < lo_ || na > hi_)
        throw data_error("NormBand", "row norm outside the declared Theta(1) band");
    for (const auto& r : rows_) {
        double cosv = std::abs(r.dot(a)) / (r.norm() * na);
        if (cosv >= cos_threshold_) return Ingest::Discarded;
    }
    rows_.push_back(a);
    return Ingest::Kept;
}

double RestrictedCoreset::query_linf(const Vector& x) const {
    if (rows_.empty()) throw algo_error("EmptyCoreset", "query on an empty coreset");
    double best = 0.0;
    for (const auto& r : rows_) best = std::max(best, std::abs(r.dot(x)));
    return best;
}

Matrix RestrictedCoreset::rows_matrix() const {
    Matrix M(static_cast<Index>(rows_.size()), d_);
    for (size_t i = 0; i < rows_.size(); ++i) M.row(static_cast<Index>(i)) = rows_[i].transpose();
    return M;
}

}  // namespace geostream
