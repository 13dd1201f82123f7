#pragma once

#include "geostream/common.hpp"

#include <optional>

namespace geostream {

// Relative singular-value cutoff: sigma_i is retained iff sigma_i > kRankCutoff * sigma_1.
inline constexpr double kRankCutoff = 1e-10;
// Span membership: a is in rowspan(B) iff ||a_perp|| <= kSpanTol * ||a||.
inline constexpr double kSpanTol = 1e-9;
// Relative eigenvalue cutoff for PSD quadratic forms.
inline constexpr double kPsdCutoff = 1e-12;

// Truncated SVD of A with a relative rank cutoff. Pseudoinverse and
// rowspan-projection queries all go through this factorization.
struct SpectralFactorization {
    Matrix U;       // n x r, orthonormal columns
    Vector sigma;   // r retained singular values, descending
    Matrix V;       // d x r
    Index rank = 0;
    double sigma_max = 0.0;

    static SpectralFactorization compute(const Matrix& A, double rank_cutoff = kRankCutoff);

    // Component of a in / orthogonal to rowspan.
    Vector project_rowspan(const Vector& a) const;
    bool in_rowspan(const Vector& a, double span_tol = kSpanTol) const;
    // a^T (A^T A)^- a for a in the rowspan.
    double pinv_quadratic(const Vector& a) const;
};

// tau_i(A) = a_i^T (A^T A)^- a_i for every row.
Vector leverage_scores(const Matrix& A);

// sup_x <a,x>^2 / ||Bx||_2^2 over x in rowspan(B), or nullopt when a is
// outside the rowspan (the caller's OutOfSpan marker).
std::optional<double> generalized_sensitivity(const Vector& a, const Matrix& B);
std::optional<double> generalized_sensitivity(const Vector& a, const SpectralFactorization& B_fac);

// log of the product of eigenvalues of a symmetric PSD matrix above the
// relative cutoff. Throws ZeroMatrix when no eigenvalue survives.
double log_pseudodet(const Matrix& G, double rel_cutoff = kPsdCutoff);

struct ResidualSplit {
    Vector parallel;
    Vector perp;
    bool in_span;
};
ResidualSplit orthogonal_residual(const Vector& a, const Matrix& B, double span_tol = kSpanTol);

// Row-wise k-fold tensor power, n x d^k. Throws SizeLimit past the cap.
Matrix khatri_rao_lift(const Matrix& A, int k, Index size_limit = 10000);
Vector tensor_power(const Vector& x, int k);

// Running Gram matrix G = sum a a^T with a maintained pseudoinverse and
// rowspan projector. In-span rank-1 updates use Sherman-Morrison on the
// pseudoinverse; rank growth or the periodic refresh triggers a full
// eigendecomposition.
class GramPseudoInverse {
public:
    explicit GramPseudoInverse(Index d, int refactor_period = 128);

    void add_row(const Vector& a);

    bool in_span(const Vector& a, double span_tol = kSpanTol) const;
    double quad_pinv(const Vector& a) const;  // a^T G^- a

    const Matrix& gram() const { return G_; }
    const Matrix& pinv() const { return Gp_; }
    Index rank() const { return rank_; }
    Index dim() const { return G_.rows(); }

    void refactorize();

private:
    Matrix G_, Gp_, P_;  // Gram, pseudoinverse, rowspan projector
    Index rank_ = 0;
    int since_refactor_ = 0;
    int refactor_period_;
};

}  // namespace geostream
