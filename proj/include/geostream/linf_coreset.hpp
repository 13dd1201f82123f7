#pragma once

#include "geostream/io.hpp"
#include "geostream/linalg.hpp"

#include <optional>
#include <vector>

namespace geostream {

enum class Ingest { Kept, Discarded };
enum class CoresetNorm { Linf, L2 };

// One-pass online coreset for the l_inf subspace sketch. A row is kept iff it
// leaves the rowspan of the stored rows or its generalized sensitivity against
// them is >= 1 (ties kept). Kept rows are never removed.
class Coreset {
public:
    explicit Coreset(Index d);

    Ingest ingest(const Vector& a, double weight = 1.0);
    // cascade levels record positions in the outer stream
    Ingest ingest_at(Index stream_position, const Vector& a, double weight = 1.0);

    double query(const Vector& x, CoresetNorm norm) const;
    double query_linf(const Vector& x) const { return query(x, CoresetNorm::Linf); }
    double query_l2(const Vector& x) const { return query(x, CoresetNorm::L2); }

    // Per-instance certified distortion sqrt(|S|) of the sandwich
    // ||A|_S x||_inf <= ||Ax||_inf <= delta * ||A|_S x||_inf.
    double distortion() const;

    struct SizeBound {
        double bound;
        double constant;
        bool within;
    };
    // C d ln n (integer-bounded streams) or C d ln(n kappa_ol) (real-valued).
    SizeBound certified_size_bound(std::optional<double> kappa_ol = std::nullopt,
                                   double constant = 20.0) const;

    size_t size() const { return indices_.size(); }
    Index dim() const { return d_; }
    Index n_seen() const { return n_seen_; }
    const std::vector<Index>& indices() const { return indices_; }
    const std::vector<double>& weights() const { return weights_; }
    Matrix rows_matrix() const;           // |S| x d, unweighted
    Matrix weighted_rows_matrix() const;  // |S| x d, rows scaled by weights
    const Matrix& gram() const { return gram_.gram(); }

    json to_json() const;
    static Coreset from_json(const json& j);

private:
    Index d_;
    Index n_seen_ = 0;
    std::vector<Index> indices_;
    std::vector<Vector> rows_;
    std::vector<double> weights_;
    GramPseudoInverse gram_;
};

// Peeling cascade for k-robust directional width: level i ingests the rows
// every earlier level discarded; the union supports E_k queries.
class KRobustCascade {
public:
    KRobustCascade(Index d, int k);

    void ingest(const Vector& a);
    // (k+1)-st largest |<a_i, x>| over the union of levels.
    double query(const Vector& x) const;

    int k() const { return k_; }
    size_t union_size() const;
    size_t max_level_size() const;
    double distortion() const;  // sqrt(max level size)
    const std::vector<Coreset>& levels() const { return levels_; }

private:
    int k_;
    Index n_seen_ = 0;
    std::vector<Coreset> levels_;
};

// Angular dedup for Theta(1)-norm streams: keep a row iff every stored row has
// |cosine| < 1/sqrt(2d-1). The Welch bound caps the size at 2d-1.
class RestrictedCoreset {
public:
    explicit RestrictedCoreset(Index d, double norm_lo = 0.5, double norm_hi = 2.0);

    Ingest ingest(const Vector& a);
    double query_linf(const Vector& x) const;
    size_t size() const { return rows_.size(); }
    Matrix rows_matrix() const;

private:
    Index d_;
    double lo_, hi_, cos_threshold_;
    std::vector<Vector> rows_;  // stored as received
};

}  // namespace geostream
