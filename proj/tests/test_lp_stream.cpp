#include "geostream/lp_stream.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace geostream;

TEST_SUITE_BEGIN("lp_stream");

TEST_CASE("first row and p = 2 degeneracies") {
    LpQuadraticSketch sk(3, 4.0, 10);
    Vector a(3);
    a << 1, -2, 0.5;
    CHECK(sk.ingest(a) == doctest::Approx(1.0));  // s = 1, w = 1

    rng::Stream s(71);
    Matrix A = oracles::random_int_matrix(s, 20, 3, 6);
    LpQuadraticSketch two(3, 2.0, 20);
    for (Index i = 0; i < A.rows(); ++i) CHECK(two.ingest(A.row(i).transpose()) == 1.0);
    Matrix diff = two.quadratic() - A.transpose() * A;
    CHECK(diff.norm() <= 1e-9 * A.norm() * A.norm());
    CHECK(two.certified_distortion() == doctest::Approx(1.0));
}

TEST_CASE("repeated basis row: rounded 1/m sensitivities, lower sandwich") {
    LpQuadraticSketch sk(2, 4.0, 16);
    Vector e1 = Vector::Unit(2, 0);
    std::vector<double> applied;
    for (int i = 0; i < 16; ++i) applied.push_back(sk.ingest(e1));
    CHECK(applied[0] == doctest::Approx(1.0));
    // weights are nonincreasing powers of two, floored by (1/16)^{1/2}
    for (size_t i = 1; i < applied.size(); ++i) {
        CHECK(applied[i] <= applied[i - 1] + 1e-12);
        CHECK(applied[i] >= std::pow(1.0 / 16.0, 0.5) - 1e-12);
        CHECK(applied[i] == round_up_pow2(applied[i]));
    }
    // lower sandwich at x = e1: (x^T Q x)^{1/2} >= ||Ax||_4
    double lhs = sk.query(e1);
    double rhs = std::pow(16.0, 0.25);  // (sum of 1^4)^{1/4}
    CHECK(lhs >= rhs * (1.0 - 1e-12));
}

TEST_CASE("random integer stream: sandwich and monotone domination") {
    rng::Stream s(73);
    Matrix A = oracles::random_int_matrix(s, 500, 6, 10);
    LpQuadraticSketch sk(6, 4.0, 500);
    Index checkpoint = 0;
    for (Index i = 0; i < A.rows(); ++i) {
        sk.ingest(A.row(i).transpose());
        if (i == 100 || i == 300 || i == 499) {
            // prefix domination: (x^T Q x)^{p/2} >= ||A_prefix x||_p^p
            for (int t = 0; t < 20; ++t) {
                Vector x = oracles::random_unit(s, 6);
                double q = sk.query(x);
                double lp = oracles::lp_norm(A.topRows(i + 1) * x, 4.0);
                CHECK(q >= lp * (1.0 - 1e-9));
            }
            ++checkpoint;
        }
    }
    CHECK(checkpoint == 3);
    double delta = sk.certified_distortion();
    CHECK(delta > 1.0);
    int lower_viol = 0, upper_viol = 0;
    for (int t = 0; t < 200; ++t) {
        Vector x = oracles::random_unit(s, 6);
        double q = sk.query(x);
        double lp = oracles::lp_norm(A * x, 4.0);
        if (q < lp * (1.0 - 1e-9)) ++lower_viol;
        if (q > delta * lp * (1.0 + 1e-9)) ++upper_viol;
    }
    CHECK(lower_viol == 0);
    CHECK(upper_viol == 0);

    // applied-weight audit: sum of s^{p/2} behaves like an online-leverage sum
    CHECK(sk.sensitivity_power_sum() <= 10.0 * 6 * std::log(500.0));

    // power-of-two band
    double B = std::ceil(std::log2(500.0)) * std::abs(4.0 / 4.0 - 0.5) + 1.0;
    for (double w : sk.weight_log()) {
        CHECK(w == round_up_pow2(w));
        CHECK(w <= std::pow(2.0, B));
        CHECK(w >= std::pow(2.0, -B));
    }
}

TEST_CASE("stream overflow is an error") {
    LpQuadraticSketch sk(2, 4.0, 2);
    sk.ingest(Vector::Unit(2, 0));
    sk.ingest(Vector::Unit(2, 1));
    CHECK_THROWS_AS(sk.ingest(Vector::Unit(2, 0)), Error);
}

TEST_CASE("merge: identity, sandwich, commutative") {
    rng::Stream s(79);
    Matrix A = oracles::random_int_matrix(s, 60, 4, 7);
    LpQuadraticSketch whole(4, 4.0, 60), left(4, 4.0, 60), right(4, 4.0, 60), empty(4, 4.0, 60);
    for (Index i = 0; i < 30; ++i) left.ingest(A.row(i).transpose());
    for (Index i = 30; i < 60; ++i) right.ingest(A.row(i).transpose());
    for (Index i = 0; i < 60; ++i) whole.ingest(A.row(i).transpose());

    LpQuadraticSketch with_empty = LpQuadraticSketch::merge(left, empty);
    CHECK((with_empty.quadratic() - left.quadratic()).norm() <= 1e-9 * left.quadratic().norm());

    LpQuadraticSketch ab = LpQuadraticSketch::merge(left, right);
    LpQuadraticSketch ba = LpQuadraticSketch::merge(right, left);
    CHECK((ab.quadratic() - ba.quadratic()).norm() <= 1e-9 * ab.quadratic().norm());

    double delta = ab.certified_distortion();
    for (int t = 0; t < 200; ++t) {
        Vector x = oracles::random_unit(s, 4);
        double q = ab.query(x);
        double lp = oracles::lp_norm(A * x, 4.0);
        CHECK(q >= lp * (1.0 - 1e-9));
        CHECK(q <= delta * lp * (1.0 + 1e-9));
    }
}

TEST_CASE("lq trade-off: first row weight, q = 2 degeneracy") {
    LqTradeoffSketch::Options opts;
    opts.inflation = 1.0;
    opts.block_size = 128;  // larger than the stream: the summary stays exact
    LqTradeoffSketch sk(3, 6.0, 2.0, 40, 123, opts);
    Vector a(3);
    a << 2, 1, 0;
    CHECK(sk.ingest(a) == doctest::Approx(1.0));

    // with q = 2 and no inflation the weights match the quadratic sketch
    rng::Stream s(83);
    Matrix A = oracles::random_int_matrix(s, 30, 3, 5);
    LqTradeoffSketch lq(3, 6.0, 2.0, 30, 7, opts);
    LpQuadraticSketch ref(3, 6.0, 30);
    for (Index i = 0; i < A.rows(); ++i) {
        double w_lq = lq.ingest(A.row(i).transpose());
        double w_ref = ref.ingest(A.row(i).transpose());
        CHECK(w_lq == doctest::Approx(w_ref).epsilon(1e-9));
    }
}

TEST_CASE("lq trade-off: ascent sensitivities near the net oracle") {
    rng::Stream s(89);
    Matrix A = oracles::random_gauss_matrix(s, 40, 3);
    LqTradeoffSketch::Options opts;
    opts.block_size = 128;
    LqTradeoffSketch sk(3, 6.0, 3.0, 40, 11, opts);
    int ok = 0, total = 0;
    for (Index i = 0; i < A.rows(); ++i) {
        Matrix prefix = sk.inner().summary_rows();
        sk.ingest(A.row(i).transpose());
        if (prefix.rows() < 5) continue;
        Vector a = A.row(i).transpose();
        if (!SpectralFactorization::compute(prefix).in_rowspan(a)) continue;
        double est = lp_sensitivity_estimate(a, prefix, 3.0);
        double net = oracles::net_lp_sensitivity(a, prefix, 3.0, 240);
        ++total;
        if (est >= 0.5 * std::min(net, 1.0) && est <= 2.0 * std::min(net, 1.0) + 1e-9) ++ok;
    }
    CHECK(total >= 30);
    CHECK(static_cast<double>(ok) >= 0.95 * static_cast<double>(total));
}

TEST_CASE("exponential embedding: infinity flag and replica determinism") {
    rng::Stream s(97);
    Matrix A = oracles::random_int_matrix(s, 50, 3, 6);
    double inf = std::numeric_limits<double>::infinity();
    ExpEmbedSketch sk(3, inf, 5, 1);
    Coreset plain(3);
    for (Index i = 0; i < A.rows(); ++i) {
        sk.ingest(A.row(i).transpose());
        plain.ingest(A.row(i).transpose());
    }
    Vector x = oracles::random_unit(s, 3);
    CHECK(sk.query_replica(0, x) == doctest::Approx(plain.query_linf(x)));

    ExpEmbedSketch r1(3, 3.0, 42, 3), r2(3, 3.0, 42, 3);
    for (Index i = 0; i < A.rows(); ++i) {
        r1.ingest(A.row(i).transpose());
        r2.ingest(A.row(i).transpose());
    }
    CHECK(r1.query_median(x) == doctest::Approx(r2.query_median(x)));
}

TEST_CASE("exponential embedding: single-row max-stability statistic") {
    Vector a(2);
    a << 1.5, -0.5;
    Vector x(2);
    x << 0.3, 0.8;
    double base = std::abs(a.dot(x));
    std::vector<double> samples;
    for (int seed = 0; seed < 2000; ++seed) {
        ExpEmbedSketch sk(2, 3.0, static_cast<std::uint64_t>(seed) + 1, 1);
        sk.ingest(a);
        double q = sk.query_replica(0, x);
        samples.push_back(std::pow(q / base, -3.0));
    }
    CHECK(oracles::ks_vs_exponential(samples) <= 0.05);
}

TEST_CASE("exponential embedding: median sandwich against the full matrix") {
    rng::Stream s(101);
    Matrix A = oracles::random_int_matrix(s, 80, 3, 6);
    ExpEmbedSketch sk(3, 4.0, 1234, 11);
    for (Index i = 0; i < A.rows(); ++i) sk.ingest(A.row(i).transpose());
    int fails = 0;
    const int queries = 60;
    for (int t = 0; t < queries; ++t) {
        Vector x = oracles::random_unit(s, 3);
        double lp = oracles::lp_norm(A * x, 4.0);
        double est = sk.query_median(x);
        // max-stability: the inner l_inf value concentrates around ||Ax||_p
        // within the coreset distortion and the exponential quantile band
        double delta = 0.0;
        for (int r = 0; r < sk.replicas(); ++r)
            delta = std::max(delta, sk.replica(r).distortion());
        double lo = lp / (delta * std::pow(std::log(4.0), 1.0 / 4.0) * 1.5);
        double hi = lp * std::pow(1.0 / 0.25, 1.0 / 4.0) * 1.5;
        if (!(est >= lo && est <= hi)) ++fails;
    }
    CHECK(fails <= queries / 3);
}

TEST_SUITE_END();
