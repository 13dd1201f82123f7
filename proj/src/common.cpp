#include "geostream/common.hpp"

#include <cmath>

namespace geostream {

void require_finite(const Matrix& a, const char* context) {
    if (!a.allFinite())
        throw data_error("NonFinite", std::string("non-finite entry in ") + context);
}

void require_finite(const Vector& a, const char* context) {
    if (!a.allFinite())
        throw data_error("NonFinite", std::string("non-finite entry in ") + context);
}

double round_up_pow2(double w) {
    if (!(w > 0.0)) throw algo_error("ZeroWeight", "power-of-two rounding needs w > 0");
    int e;
    double m = std::frexp(w, &e);  // w = m * 2^e, m in [0.5, 1)
    double cand = (m == 0.5) ? std::ldexp(1.0, e - 1) : std::ldexp(1.0, e);
    while (cand < w) cand *= 2.0;
    while (cand * 0.5 >= w) cand *= 0.5;
    return cand;
}

double round_down_pow2(double w) {
    if (!(w > 0.0)) throw algo_error("ZeroWeight", "power-of-two rounding needs w > 0");
    double up = round_up_pow2(w);
    return (up == w) ? up : up * 0.5;
}

}  // namespace geostream
