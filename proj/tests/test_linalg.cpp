#include "geostream/linalg.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace geostream;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("leverage scores: identity and duplicated row") {
    Matrix I = Matrix::Identity(4, 4);
    Vector tau = leverage_scores(I);
    for (Index i = 0; i < 4; ++i) CHECK(tau(i) == doctest::Approx(1.0));

    Matrix two(2, 1);
    two << 1.0, 1.0;
    Vector t2 = leverage_scores(two);
    CHECK(t2(0) == doctest::Approx(0.5));
    CHECK(t2(1) == doctest::Approx(0.5));
}

TEST_CASE("leverage scores match the eigen oracle and sum to the rank") {
    rng::Stream s(11);
    Matrix A = oracles::random_gauss_matrix(s, 6, 3);
    Vector tau = leverage_scores(A);
    Vector ref = oracles::eigen_leverage_oracle(A);
    for (Index i = 0; i < 6; ++i) {
        CHECK(tau(i) == doctest::Approx(ref(i)).epsilon(1e-9));
        CHECK(tau(i) >= 0.0);
        CHECK(tau(i) <= 1.0 + 1e-9);
    }
    CHECK(tau.sum() == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("leverage equals the sup of <a,x>^2 / ||Ax||_2^2 (net check, d = 3)") {
    rng::Stream s(17);
    Matrix A = oracles::random_gauss_matrix(s, 6, 3);
    Vector tau = leverage_scores(A);
    for (Index i = 0; i < A.rows(); ++i) {
        double net = oracles::net_l2_sensitivity(A.row(i).transpose(), A);
        CHECK(std::abs(tau(i) - net) <= 1e-3);
    }
}

TEST_CASE("generalized sensitivity basics") {
    Matrix I = Matrix::Identity(3, 3);
    auto v = generalized_sensitivity(Vector::Unit(3, 0), I);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(1.0));

    Matrix B(2, 3);
    B << 1, 0, 0, 2, 0, 0;
    CHECK_FALSE(generalized_sensitivity(Vector::Unit(3, 1), B).has_value());

    // scale covariance
    rng::Stream s(3);
    Matrix R = oracles::random_gauss_matrix(s, 8, 3);
    Vector a = R.transpose() * oracles::random_unit(s, 8);  // in the rowspan
    auto s1 = generalized_sensitivity(a, R);
    auto s3 = generalized_sensitivity(3.0 * a, R);
    REQUIRE(s1.has_value());
    REQUIRE(s3.has_value());
    CHECK(*s3 == doctest::Approx(9.0 * *s1).epsilon(1e-9));
}

TEST_CASE("generalized sensitivity matches the sphere net") {
    rng::Stream s(5);
    Matrix B = oracles::random_gauss_matrix(s, 8, 3);
    Vector a = B.transpose() * oracles::random_unit(s, 8);
    auto impl = generalized_sensitivity(a, B);
    REQUIRE(impl.has_value());
    double net = oracles::net_l2_sensitivity(a, B);
    CHECK(std::abs(*impl - net) <= 1e-3 * std::max(1.0, *impl));
}

TEST_CASE("log pseudodeterminant") {
    CHECK(log_pseudodet(Matrix::Identity(5, 5)) == doctest::Approx(0.0));

    Vector a(3);
    a << 0.0, 2.0, 0.0;  // rank one, eigenvalue ||a||^2 = 4
    Matrix G = a * a.transpose();
    CHECK(log_pseudodet(G) == doctest::Approx(std::log(4.0)).epsilon(1e-10));

    rng::Stream s(7);
    Matrix R = oracles::random_gauss_matrix(s, 5, 5);
    Matrix P = R * R.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(P);
    double ref = 0.0;
    for (Index i = 0; i < 5; ++i) ref += std::log(es.eigenvalues()(i));
    CHECK(log_pseudodet(P) == doctest::Approx(ref).epsilon(1e-8));

    CHECK_THROWS_AS(log_pseudodet(Matrix::Zero(3, 3)), Error);
}

TEST_CASE("orthogonal residual") {
    Matrix B(1, 3);
    B << 1, 0, 0;
    Vector a(3);
    a << 3, 4, 0;
    ResidualSplit r = orthogonal_residual(a, B);
    CHECK(r.parallel(0) == doctest::Approx(3.0));
    CHECK(r.perp(1) == doctest::Approx(4.0));
    CHECK_FALSE(r.in_span);

    rng::Stream s(9);
    Matrix R = oracles::random_gauss_matrix(s, 5, 4);
    Vector inrow = R.transpose() * oracles::random_unit(s, 5);
    CHECK(orthogonal_residual(inrow, R).in_span);

    Vector g(4);
    for (Index i = 0; i < 4; ++i) g(i) = s.gaussian();
    ResidualSplit sp = orthogonal_residual(g, R.topRows(2));
    CHECK(g.squaredNorm() ==
          doctest::Approx(sp.parallel.squaredNorm() + sp.perp.squaredNorm()).epsilon(1e-9));
    for (Index i = 0; i < 2; ++i)
        CHECK(std::abs(sp.perp.dot(R.row(i).transpose())) <=
              1e-9 * g.norm() * R.row(i).norm());
}

TEST_CASE("pseudodeterminant update lemmas") {
    rng::Stream s(13);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix A = oracles::random_gauss_matrix(s, 3, 5);
        Matrix G = A.transpose() * A;
        Vector raw(5);
        for (Index i = 0; i < 5; ++i) raw(i) = s.gaussian();
        ResidualSplit sp = orthogonal_residual(raw, A);

        // orthogonal part bumps the pseudodeterminant by its squared norm
        double before = log_pseudodet(G);
        double after = log_pseudodet(G + sp.perp * sp.perp.transpose());
        CHECK(after == doctest::Approx(before + 2.0 * std::log(sp.perp.norm())).epsilon(1e-8));

        // in-span part obeys the matrix pseudodeterminant lemma
        auto sens = generalized_sensitivity(sp.parallel, A);
        REQUIRE(sens.has_value());
        double after_par = log_pseudodet(G + sp.parallel * sp.parallel.transpose());
        CHECK(after_par == doctest::Approx(before + std::log1p(*sens)).epsilon(1e-8));
    }
}

TEST_CASE("determinant-volume identity") {
    rng::Stream s(15);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix A = oracles::random_gauss_matrix(s, 4, 6);
        double logdet = 0.5 * std::log((A * A.transpose()).determinant());
        double acc = 0.0;
        for (Index i = 0; i < A.rows(); ++i) {
            ResidualSplit sp = orthogonal_residual(A.row(i).transpose(), A.topRows(i));
            acc += std::log(sp.perp.norm());
        }
        CHECK(logdet == doctest::Approx(acc).epsilon(1e-8));
    }
}

TEST_CASE("khatri-rao lift") {
    Matrix A(1, 2);
    A << 1, 2;
    CHECK(khatri_rao_lift(A, 1) == A);
    Matrix L = khatri_rao_lift(A, 2);
    CHECK(L.cols() == 4);
    CHECK(L(0, 0) == 1);
    CHECK(L(0, 1) == 2);
    CHECK(L(0, 2) == 2);
    CHECK(L(0, 3) == 4);

    rng::Stream s(21);
    Matrix B = oracles::random_gauss_matrix(s, 4, 2);
    Matrix B2 = khatri_rao_lift(B, 2);
    for (int t = 0; t < 5; ++t) {
        Vector x = oracles::random_unit(s, 2);
        double lhs = std::pow(oracles::lp_norm(B * x, 4.0), 4.0);
        double rhs = (B2 * tensor_power(x, 2)).squaredNorm();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }

    CHECK_THROWS_AS(khatri_rao_lift(Matrix::Ones(2, 10), 5), Error);
}

TEST_CASE("gram pseudoinverse tracks a fresh factorization") {
    rng::Stream s(23);
    GramPseudoInverse g(4);
    Matrix seen(0, 4);
    for (int i = 0; i < 40; ++i) {
        Vector a(4);
        for (Index j = 0; j < 4; ++j) a(j) = s.gaussian();
        if (i % 3 == 0) a(3) = 0.0;
        seen.conservativeResize(seen.rows() + 1, Eigen::NoChange);
        seen.row(seen.rows() - 1) = a.transpose();
        g.add_row(a);

        Matrix ref = oracles::eigen_gram_pinv(seen);
        Vector probe(4);
        for (Index j = 0; j < 4; ++j) probe(j) = s.gaussian();
        CHECK(g.quad_pinv(probe) ==
              doctest::Approx(probe.dot(ref * probe)).epsilon(1e-7));
    }
}

TEST_SUITE_END();
