#pragma once

#include "geostream/io.hpp"
#include "geostream/linf_coreset.hpp"
#include "geostream/simplex.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace geostream {

// Reduction of extent problems to centrally symmetric instances: store the
// first point, emit a_i - a_1 for every later point (each emitted row stands
// for the +/- pair; queries take absolute values).
class SymmetrizedStream {
public:
    // nullopt for the first point (it becomes the origin of the instance)
    std::optional<Vector> feed(const Vector& a);
    const Vector& base_point() const;
    Index count() const { return count_; }

private:
    std::optional<Vector> base_;
    Index count_ = 0;
};

// max - min of <a_i, x>.
double directional_width(const Matrix& points, const Vector& x);
// max_i |<a_i - a_1, x>| of the translated instance.
double symmetrized_height(const Matrix& points, const Vector& x);

// h_S(u) = max_{i in S} |<a_i, u>|; sandwich h_S <= h <= sqrt(|S|) h_S.
double hull_support(const Coreset& c, const Vector& u);

struct Ellipsoid {
    Matrix H;  // {x : x^T H x <= 1}

    bool contains(const Vector& x, double tol = 1e-9) const;
    Ellipsoid polar() const;  // inverse form on the range
};

enum class EllipsoidTarget { Polytope, Hull };

struct EllipsoidResult {
    Ellipsoid E;
    double delta = 1.0;           // sqrt(|S|)
    bool span_restricted = false; // hull target did not span R^d
};
EllipsoidResult ellipsoid_from_coreset(const Coreset& c, EllipsoidTarget target);

enum class VolmaxMode { Exact, Greedy };

struct VolmaxOptions {
    int exact_limit = 25;
};

struct VolmaxResult {
    std::vector<Index> indices;    // into the original stream
    double log_volume = 0.0;       // of the selected sketched rows
    size_t coreset_size = 0;
    Index sketch_dim = 0;
};
// Gaussian sketch to r dims (skipped when r >= d), l_inf coreset of the
// sketched stream, then max-volume k-subset of the coreset rows.
VolmaxResult volmax_select(const Matrix& A, int k, int r, std::uint64_t seed, VolmaxMode mode,
                           const VolmaxOptions& opts = {});

// 0.5 * log det(X X^T) of the given rows (product of orthogonal residuals).
double log_volume(const Matrix& rows);

struct ShellOptions {
    int starts = 16;
    int evals_per_start = 500;
    std::uint64_t seed = 0x7368656cULL;
};

struct ShellResult {
    Vector center;
    double inner = 0.0;            // exact over the stored coreset points
    double outer = 0.0;
    double certified_inner = 0.0;  // coreset-certified bounds for all points
    double certified_outer = 0.0;
    size_t coreset_size_b = 0;
    size_t coreset_size_b2 = 0;
    double delta = 1.0;            // sqrt(max coreset size)
};
ShellResult shell_solve(const Matrix& points, const ShellOptions& opts = {});

struct LpSolveResult {
    Vector x_hat;       // rescaled into K, x_star / delta
    double value;       // <c, x_hat>
    Vector x_star;      // optimum over the coreset polytope
    double value_star;
    double delta;
};
// max <c,x> over {x : ||A|_S x||_inf <= 1}, rescaled by delta = sqrt(|S|) so
// x_hat is feasible for the full stream.
LpSolveResult lp_maximize(const Vector& c_obj, const Coreset& c);

}  // namespace geostream
