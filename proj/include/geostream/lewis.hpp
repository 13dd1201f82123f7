#pragma once

#include "geostream/io.hpp"
#include "geostream/linalg.hpp"
#include "geostream/row_source.hpp"

#include <vector>

namespace geostream {

enum class WeightKind { Exact, OneSided, Overestimate };

struct LewisWeights {
    Vector w;
    double p = 2.0;
    double gamma = 0.0;   // floor threshold
    double alpha = 1.0;   // overestimate factor, sum(w) <= alpha * d
    WeightKind kind = WeightKind::Exact;
    double fixed_point_residual = 0.0;
    int iterations = 0;

    json to_json() const;
};

struct LewisQuadratic {
    Matrix M;  // A^T W^{1-2/p} A
    double p = 2.0;
    double gamma = 0.0;
};

struct FixedPointOptions {
    int max_iters = 64;
    double tol = 2e-9;
    double gamma = 0.0;
};

// Thresholded Lewis-weight fixed point w_i = max(gamma, (a_i^T M^{-1} a_i)^{p/2})
// with M = A^T W^{1-2/p} A, iterated from all-ones. Plain iteration contracts
// for p < 4; for p >= 4 the update is damped in log space with theta = 2/p,
// which keeps the same fixed point.
LewisWeights lewis_fixed_point(const Matrix& A, double p, const FixedPointOptions& opts = {});

LewisQuadratic lewis_quadratic_from(const Matrix& A, const LewisWeights& lw);

// Rounded averaged-iterate weights (one-sided overestimates, Sum w = O(d)).
// Runs T rounds of w <- round_delta(max(d/n, tau recursion)) and returns the
// (3/2T)-scaled average iterate.
LewisWeights lewis_averaged(const Matrix& A, double p, int rounds = 0, double floor_scale = 1.0);

// max(gamma, (a^T M^{-1} a)^{p/2}) from a Lewis quadratic.
double recover_weight(const LewisQuadratic& q, const Vector& a);

struct SwitchReport {
    double max_rel_discrepancy = 0.0;  // between w^q(W_p^{1/q-1/p} A) and w^p(A)
    double one_sided_violation = 0.0;  // max_i tau_i(V^{1/2-1/q} B) - v_i
};
SwitchReport switch_weights(const Matrix& A, double p, double q, double tol = 1e-8);

struct ChangeOfDensityResult {
    Matrix B;               // W^{1/q-1/p} A
    double kappa = 1.0;
    double lambda = 1.0;
    double estimator_scale = 1.0;  // certified estimator: scale * ||Bx||_q
    double p = 2.0, q = 2.0;

    double estimate(const Vector& x) const;  // scale * ||Bx||_q
};
// Contract (p >= q): ||Ax||_p <= lambda ||Bx||_q <= kappa lambda ||Ax||_p.
// For q >= p the roles of kappa and lambda invert per the switching identity.
ChangeOfDensityResult change_of_density(const Matrix& A, double p, double q,
                                        const LewisWeights& lw);

enum class StreamLewisMode { FewPass, LogPass };

struct StreamLewisOptions {
    int rounds = 0;   // 0: pick from n
    int pass_cap = 64;
    double gamma = 0.0;  // recovery floor; 0 means d/n
};

struct StreamLewisResult {
    LewisQuadratic quadratic;              // final round
    std::vector<Matrix> round_quadratics;  // LogPass keeps all iterates
    int passes = 0;
    int rounds = 0;
    double p = 2.0;
    double floor_value = 0.0;  // d/n
    double delta = 0.0;        // rounding grid
    StreamLewisMode mode = StreamLewisMode::FewPass;
};

// Multi-pass streaming computation of the Lewis quadratic A^T W^{1-2/p} A,
// touching rows only through the source. FewPass requires p < 4.
StreamLewisResult stream_lewis_quadratic(ReplayableRowSource& src, double p,
                                         StreamLewisMode mode,
                                         const StreamLewisOptions& opts = {});

// Per-row weight recovery from a streaming result: FewPass applies the fixed
// point formula to the final quadratic; LogPass replays the per-round chain
// and returns the scaled average iterate.
double recover_stream_weight(const StreamLewisResult& r, const Vector& a);

// p >= 4 composition recipe: l_{p/k} Lewis weights of the k-fold Khatri-Rao
// lift, k = floor(p/4) + 1. Valid because ||Ax||_p^p = ||A lift x lift||_{p/k}^{p/k}.
struct LiftedLewisRecipe {
    int k = 1;
    double lifted_p = 2.0;
    LewisWeights weights;  // weights of the lifted matrix
};
LiftedLewisRecipe lewis_lifted_weights(const Matrix& A, double p, Index size_limit = 10000);

}  // namespace geostream
