#pragma once

#include "geostream/io.hpp"
#include "geostream/linalg.hpp"

#include <optional>
#include <vector>

namespace geostream {

struct AuditReport {
    double sum = 0.0;
    double bound = 0.0;
    double constant = 0.0;
    bool pass = false;
    bool used_condition_number = false;  // real-valued fallback bound
    double online_condition_number = 1.0;

    json to_json() const;
};

// Numerical estimator for sup_x |<a,x>|^p / ||Bx||_p^p over x in rowspan(B).
// Multi-start projected gradient ascent; the exact oracle enumerates a unit
// sphere net and is gated to d <= 3.
struct LpSensitivityOptions {
    int starts = 8;
    int iterations = 200;
    double step = 0.1;
    bool exact_oracle = false;
    int net_resolution = 720;  // per angle, exact oracle only
};
double lp_sensitivity_estimate(const Vector& a, const Matrix& B, double p,
                               const LpSensitivityOptions& opts = {});

// Running audit of online leverage scores / online lp sensitivities along a
// stream. Stores the Gram (and, in sensitivity mode, the explicit prefix; it
// is an audit tool, not a space-efficient sketch).
class OnlineScoreState {
public:
    explicit OnlineScoreState(Index d, std::optional<double> p = std::nullopt);

    // Online leverage score of a against the prefix seen so far; updates state.
    double observe_online_leverage(const Vector& a);

    // Online lp sensitivity (p > 2). Requires the state constructed with p.
    double observe_online_lp_sensitivity(const Vector& a,
                                         const LpSensitivityOptions& opts = {});

    AuditReport audit_sums(Index n, Index d, std::optional<double> integer_bound,
                           double constant = 10.0) const;

    double score_sum() const { return score_sum_; }
    Index count() const { return count_; }
    const std::vector<double>& scores() const { return scores_; }
    double online_condition_number() const;

private:
    void track_condition_number();

    GramPseudoInverse gram_;
    Matrix prefix_;  // only grown in sensitivity mode
    std::optional<double> p_;
    Index count_ = 0;
    double score_sum_ = 0.0;
    std::vector<double> scores_;
    double max_inv_sigma_min_ = 0.0;
    double sigma_max_ = 0.0;
    static constexpr int kCondCheckPeriod = 64;
};

// (gamma d)^{p/2} / n: uniform-leverage implies uniform lp-sensitivity bound.
double uniform_lp_bound(double gamma, Index d, Index n, double p);

}  // namespace geostream
