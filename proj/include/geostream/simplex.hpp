#pragma once

#include "geostream/common.hpp"

namespace geostream {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    Vector x;
    double value = 0.0;
};

// maximize c^T x subject to G x <= h, x free. Dense two-phase simplex
// (free variables split, Dantzig pricing with a Bland fallback).
LpSolution solve_lp_max(const Vector& c, const Matrix& G, const Vector& h);

}  // namespace geostream
