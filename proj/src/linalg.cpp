#include "geostream/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace geostream {

SpectralFactorization SpectralFactorization::compute(const Matrix& A, double rank_cutoff) {
    require_finite(A, "SpectralFactorization");
    SpectralFactorization f;
    if (A.rows() == 0 || A.cols() == 0) {
        f.U = Matrix(A.rows(), 0);
        f.V = Matrix(A.cols(), 0);
        f.sigma = Vector(0);
        return f;
    }
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    f.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    Index r = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_cutoff * f.sigma_max && sv(i) > 0.0) ++r;
    f.rank = r;
    f.U = svd.matrixU().leftCols(r);
    f.V = svd.matrixV().leftCols(r);
    f.sigma = sv.head(r);
    return f;
}

Vector SpectralFactorization::project_rowspan(const Vector& a) const {
    if (rank == 0) return Vector::Zero(a.size());
    return V * (V.transpose() * a);
}

bool SpectralFactorization::in_rowspan(const Vector& a, double span_tol) const {
    double na = a.norm();
    if (na == 0.0) return true;
    return (a - project_rowspan(a)).norm() <= span_tol * na;
}

double SpectralFactorization::pinv_quadratic(const Vector& a) const {
    if (rank == 0) return 0.0;
    Vector b = V.transpose() * a;
    return (b.array() / sigma.array()).matrix().squaredNorm();
}

Vector leverage_scores(const Matrix& A) {
    require_finite(A, "leverage_scores");
    if (A.rows() < 1) throw data_error("EmptyStream", "leverage_scores needs n >= 1");
    SpectralFactorization f = SpectralFactorization::compute(A);
    Vector tau(A.rows());
    for (Index i = 0; i < A.rows(); ++i) tau(i) = f.U.row(i).squaredNorm();
    return tau;
}

std::optional<double> generalized_sensitivity(const Vector& a, const SpectralFactorization& B_fac) {
    require_finite(a, "generalized_sensitivity");
    if (a.norm() == 0.0) return 0.0;
    if (!B_fac.in_rowspan(a)) return std::nullopt;
    return B_fac.pinv_quadratic(a);
}

std::optional<double> generalized_sensitivity(const Vector& a, const Matrix& B) {
    return generalized_sensitivity(a, SpectralFactorization::compute(B));
}

double log_pseudodet(const Matrix& G, double rel_cutoff) {
    require_finite(G, "log_pseudodet");
    if (G.rows() != G.cols()) throw config_error("ShapeMismatch", "log_pseudodet needs a square matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    const Vector& ev = es.eigenvalues();
    double lmax = ev.size() > 0 ? ev(ev.size() - 1) : 0.0;
    if (lmax <= 0.0) throw algo_error("ZeroMatrix", "pseudodeterminant of the zero matrix");
    double acc = 0.0;
    Index kept = 0;
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > rel_cutoff * lmax) {
            acc += std::log(ev(i));
            ++kept;
        }
    }
    if (kept == 0) throw algo_error("ZeroMatrix", "no eigenvalue above cutoff");
    return acc;
}

ResidualSplit orthogonal_residual(const Vector& a, const Matrix& B, double span_tol) {
    require_finite(a, "orthogonal_residual");
    SpectralFactorization f = SpectralFactorization::compute(B);
    ResidualSplit r;
    r.parallel = f.project_rowspan(a);
    r.perp = a - r.parallel;
    double na = a.norm();
    r.in_span = (na == 0.0) || (r.perp.norm() <= span_tol * na);
    return r;
}

Vector tensor_power(const Vector& x, int k) {
    if (k < 1) throw config_error("SizeLimit", "tensor power needs k >= 1");
    Vector out = x;
    for (int j = 1; j < k; ++j) {
        Vector next(out.size() * x.size());
        for (Index i = 0; i < out.size(); ++i)
            next.segment(i * x.size(), x.size()) = out(i) * x;
        out.swap(next);
    }
    return out;
}

Matrix khatri_rao_lift(const Matrix& A, int k, Index size_limit) {
    require_finite(A, "khatri_rao_lift");
    if (k < 1) throw config_error("SizeLimit", "khatri_rao_lift needs k >= 1");
    double dk = std::pow(static_cast<double>(A.cols()), k);
    if (dk > static_cast<double>(size_limit))
        throw config_error("SizeLimit", "d^k exceeds the configured lift limit");
    Matrix out(A.rows(), static_cast<Index>(dk));
    for (Index i = 0; i < A.rows(); ++i)
        out.row(i) = tensor_power(A.row(i).transpose(), k).transpose();
    return out;
}

GramPseudoInverse::GramPseudoInverse(Index d, int refactor_period)
    : G_(Matrix::Zero(d, d)),
      Gp_(Matrix::Zero(d, d)),
      P_(Matrix::Zero(d, d)),
      refactor_period_(refactor_period) {}

void GramPseudoInverse::refactorize() {
    Eigen::SelfAdjointEigenSolver<Matrix> es(G_);
    const Vector& ev = es.eigenvalues();
    const Matrix& Q = es.eigenvectors();
    double lmax = ev.size() > 0 ? std::max(ev(ev.size() - 1), 0.0) : 0.0;
    Gp_.setZero();
    P_.setZero();
    rank_ = 0;
    if (lmax <= 0.0) {
        since_refactor_ = 0;
        return;
    }
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > kPsdCutoff * lmax) {
            Gp_ += Q.col(i) * Q.col(i).transpose() / ev(i);
            P_ += Q.col(i) * Q.col(i).transpose();
            ++rank_;
        }
    }
    since_refactor_ = 0;
}

bool GramPseudoInverse::in_span(const Vector& a, double span_tol) const {
    double na = a.norm();
    if (na == 0.0) return true;
    if (rank_ == 0) return false;
    return (a - P_ * a).norm() <= span_tol * na;
}

double GramPseudoInverse::quad_pinv(const Vector& a) const {
    return a.dot(Gp_ * a);
}

void GramPseudoInverse::add_row(const Vector& a) {
    require_finite(a, "GramPseudoInverse::add_row");
    if (a.size() != G_.rows()) throw config_error("ShapeMismatch", "row dimension mismatch");
    bool was_in_span = in_span(a);
    G_.noalias() += a * a.transpose();
    if (!was_in_span || ++since_refactor_ >= refactor_period_) {
        refactorize();
        return;
    }
    // in-span rank-1 update of the pseudoinverse on the (unchanged) span
    double denom = 1.0 + a.dot(Gp_ * a);
    Vector g = Gp_ * a;
    Gp_.noalias() -= (g * g.transpose()) / denom;
}

}  // namespace geostream
