#pragma once

#include "geostream/io.hpp"
#include "geostream/linf_coreset.hpp"
#include "geostream/lp_stream.hpp"
#include "geostream/sampling.hpp"

#include <cstdint>
#include <vector>

namespace geostream {

struct IrlsResult {
    Vector x;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;
};

// Damped iteratively reweighted least squares for min ||Bx - c||_q, q >= 2.
// The residual is monotone nonincreasing across iterations (backtracking line
// search); a non-converged run reports the best iterate.
IrlsResult irls_solve(const Matrix& B, const Vector& c, double q, double eps,
                      int max_iters = 200);

enum class RegressionRoute { Offline, StreamingCoreset, LinfLP };

struct RegressionResult {
    Vector x_hat;
    double residual_p = 0.0;
    double certified_factor = 1.0;
    RegressionRoute route = RegressionRoute::Offline;

    json to_json() const;
};

// Sketch-and-solve: embed [A b] from lp to lq, solve the small lq problem.
RegressionResult sketch_solve_regression(const Matrix& A, const Vector& b, double p, double q,
                                         double eps, std::uint64_t seed);

// One-pass route: lp quadratic weights composed with online spectral sampling
// of the weighted rows, then weighted least squares on the kept rows.
// Ab packs the target as the last column.
RegressionResult streaming_regression_coreset(const Matrix& Ab, double p, Index n_declared,
                                              double eps, std::uint64_t seed);

// min ||A|_S x - b|_S||_inf over a coreset of [A b] rows, solved as an LP.
RegressionResult linf_regression(const Coreset& coreset_of_Ab);

struct CssOptions {
    double kappa_constant = 2.0;  // kappa = const * k^{(1/2)(1-q/p)}
    int max_draws = 50;
    int guesses = 12;
    double regression_eps = 0.25;
};

struct CssResult {
    std::vector<Index> selected;  // column indices
    double cost = 0.0;            // entrywise p-norm^p of the residual
    double kappa = 1.0;
    int guesses_tried = 0;
    bool retry_exhausted = false;
    std::uint64_t seed = 0;

    json to_json() const;
};

// Randomized lp column subset selection by repeated 2k-column draws and
// approximate cover tests, with a geometric outer guess loop on ||Delta||_p^p.
CssResult css_select(const Matrix& A, double p, int k, double q, std::uint64_t seed,
                     const CssOptions& opts = {});

// Entrywise p-norm^p cost of fitting every column of A on the selected
// columns (each fit by IRLS at index p).
double css_cost(const Matrix& A, const std::vector<Index>& selected, double p);

}  // namespace geostream
