#pragma once

#include "geostream/io.hpp"
#include "geostream/lewis.hpp"
#include "geostream/linalg.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace geostream {

struct SampledMatrix {
    Matrix rows;                         // s x d, already rescaled
    std::vector<Index> source_indices;   // provenance into the source stream
    Vector scales;                       // applied 1/(s q_i)^{1/p} factors
    std::uint64_t seed = 0;
    double p = 2.0;

    json to_json() const;
};

// s iid draws proportional to the weight overestimates, rescaled by
// 1/(s q_i)^{1/p}; unbiased for ||Ax||_p^p at every fixed x.
SampledMatrix lewis_sample(const Matrix& A, double p, const Vector& weights, Index s,
                           std::uint64_t seed);

// One-pass merge-and-reduce summary: buffers blocks of B rows and reduces
// sibling blocks by Lewis-weight sampling in a binary-tree pattern, holding
// O(log n) blocks at any time.
class MergeTreeSummary {
public:
    MergeTreeSummary(Index d, double p, Index block_size, double epsilon, std::uint64_t seed);

    void ingest(const Vector& a);

    Matrix summary_rows() const;            // all held blocks stacked
    double query(const Vector& x) const;    // lp norm of summary * x
    size_t block_inventory() const;         // held blocks, including the buffer
    size_t max_block_inventory() const { return max_inventory_; }
    Index rows_ingested() const { return n_ingested_; }
    Index block_size() const { return block_size_; }
    double epsilon() const { return epsilon_; }

    static MergeTreeSummary merge(const MergeTreeSummary& a, const MergeTreeSummary& b);

private:
    Matrix reduce_pair(const Matrix& a, const Matrix& b);
    void push_block(Matrix block, size_t level);
    void track_inventory();

    Index d_;
    double p_;
    Index block_size_;
    double epsilon_;
    std::uint64_t seed_;
    std::vector<std::optional<Matrix>> levels_;
    std::vector<Vector> buffer_;
    Index n_ingested_ = 0;
    std::uint64_t reduce_counter_ = 0;
    size_t max_inventory_ = 0;
};

// Online spectral approximation by online leverage score sampling: keep row i
// with probability min(c * l_i, 1), c = 8 ln(d)/eps^2, rescaled by 1/sqrt(p_i).
struct OnlineSpectralResult {
    SampledMatrix sample;
    double c = 0.0;
    Vector keep_probabilities;
};
OnlineSpectralResult online_spectral_sample(const Matrix& A, double eps, std::uint64_t seed);

// Composed lp -> lq embedding: change of density at index p, then Lewis-weight
// row sampling at index q. ||Ax||_p <= ||SA x||_q <= kappa ||Ax||_p.
struct LpLqEmbedding {
    Matrix SA;               // s x d, all scales folded in
    double kappa_reported;   // (alpha d)^{(1/2)(1-q/p)} (1+eps)/(1-eps)
    double kappa_core;       // (alpha d)^{(1/2)(1-q/p)}
    double p, q, eps;
    Index sample_budget;
    std::uint64_t seed;
};
LpLqEmbedding lp_to_lq_embed(const Matrix& A, double p, double q, double eps,
                             std::uint64_t seed, Index sample_budget = 0);

// Merge-and-reduce l2 summary of the k-fold Khatri-Rao lift that stores base
// rows: leverage scores are computed on the lifted block, the sampled scale s
// folds back onto the base row as s^{1/k}.
class KhatriRaoSpectralCoreset {
public:
    KhatriRaoSpectralCoreset(Index d, int k, Index block_size, std::uint64_t seed,
                             Index lift_limit = 10000);

    void ingest(const Vector& a);
    Matrix base_rows() const;     // weighted base rows
    Matrix lifted_rows() const;   // lift of the weighted base rows

private:
    Matrix reduce_pair(const Matrix& a, const Matrix& b);

    Index d_;
    int k_;
    Index block_size_;
    std::uint64_t seed_;
    Index lift_limit_;
    std::vector<std::optional<Matrix>> levels_;
    std::vector<Vector> buffer_;
    std::uint64_t reduce_counter_ = 0;
};

}  // namespace geostream
