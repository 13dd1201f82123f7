#pragma once

#include "geostream/io.hpp"
#include "geostream/linalg.hpp"
#include "geostream/linf_coreset.hpp"
#include "geostream/online_scores.hpp"
#include "geostream/sampling.hpp"

#include <cstdint>
#include <vector>

namespace geostream {

// Deterministic one-pass lp sketch (p > 2): each row is reweighted by the
// thresholded l2 sensitivity against the running quadratic, rounded up to a
// power of two, and folded into Q. (x^T Q x)^{1/2} dominates ||Ax||_p and is
// within a certified per-instance factor of it.
class LpQuadraticSketch {
public:
    LpQuadraticSketch(Index d, double p, Index n_declared);

    double ingest(const Vector& a);  // returns the applied weight w'
    double query(const Vector& x) const;

    // Hoelder-tight per-instance upper factor from the applied weights:
    // (sum_i w'_i^{2p/(p-2)})^{(1-2/p)/2}; 1 for p = 2.
    double certified_distortion() const;
    double sensitivity_power_sum() const { return s_pow_sum_; }

    const Matrix& quadratic() const { return gram_.gram(); }
    Index rows_seen() const { return rows_seen_; }
    Index n_declared() const { return n_declared_; }
    double p() const { return p_; }
    Index dim() const { return d_; }
    const std::vector<double>& weight_log() const { return weight_log_; }

    static LpQuadraticSketch merge(const LpQuadraticSketch& a, const LpQuadraticSketch& b);

    json to_json() const;

private:
    Index d_;
    double p_;
    Index n_declared_;
    Index rows_seen_ = 0;
    GramPseudoInverse gram_;
    double s_pow_sum_ = 0.0;        // sum of clamped sensitivities^{p/2}
    double wprime_pow_sum_ = 0.0;   // sum of w'^{2p/(p-2)}
    std::vector<double> weight_log_;
};

// Randomized trade-off variant: lq sensitivities (estimated by multi-start
// ascent, or a sphere net at rank <= 3) against an O(1)-approximate inner
// merge-and-reduce lq summary.
class LqTradeoffSketch {
public:
    struct Options {
        double inflation = 2.0;         // Theta(1) slack on the estimated sensitivity
        Index block_size = 64;
        double inner_epsilon = 0.5;
        LpSensitivityOptions estimator;
    };

    LqTradeoffSketch(Index d, double p, double q, Index n_declared, std::uint64_t seed);
    LqTradeoffSketch(Index d, double p, double q, Index n_declared, std::uint64_t seed,
                     const Options& opts);

    double ingest(const Vector& a);  // returns the applied weight w'
    double query(const Vector& x) const;
    const MergeTreeSummary& inner() const { return inner_; }
    const std::vector<double>& weight_log() const { return weight_log_; }

private:
    Index d_;
    double p_, q_;
    Index n_declared_;
    Index rows_seen_ = 0;
    Options opts_;
    MergeTreeSummary inner_;
    std::vector<double> weight_log_;
};

// lp -> l_inf embedding with exponential random variables: every replica
// rescales each row by E^{-1/p} and feeds it to its own l_inf coreset. A
// single replica answers for-each queries; the for-all estimate is the median
// across replicas.
class ExpEmbedSketch {
public:
    // p = infinity collapses to the plain l_inf coreset (weight 1).
    ExpEmbedSketch(Index d, double p, std::uint64_t seed, int replicas = 11);

    void ingest(const Vector& a);
    double query_replica(int replica, const Vector& x) const;
    double query_median(const Vector& x) const;

    int replicas() const { return static_cast<int>(replicas_.size()); }
    const Coreset& replica(int r) const { return replicas_[static_cast<size_t>(r)]; }
    double p() const { return p_; }

private:
    double p_;
    std::uint64_t seed_;
    Index row_index_ = 0;
    std::vector<Coreset> replicas_;
};

}  // namespace geostream
