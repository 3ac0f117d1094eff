#include "confaudit/rope.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "confaudit/error.hpp"

namespace confaudit {

std::string to_string(RopeDecision d) {
    switch (d) {
        case RopeDecision::meaningfully_higher: return "meaningfully_higher";
        case RopeDecision::meaningfully_lower: return "meaningfully_lower";
        case RopeDecision::practically_equivalent: return "practically_equivalent";
        case RopeDecision::undecided: return "undecided";
    }
    return "?";
}

RopeResult rope_compare(std::span<const double> scores_a, std::span<const double> scores_b,
                        const RopeConfig& cfg) {
    const std::size_t n = scores_a.size();
    if (scores_b.size() != n) throw InvalidArgument("rope_compare: length mismatch");
    if (n < 2) throw InvalidArgument("rope_compare needs at least 2 paired scores");
    if (!(cfg.halfwidth >= 0)) throw InvalidArgument("rope halfwidth must be >= 0");
    if (!(cfg.rho >= 0 && cfg.rho < 1)) throw InvalidArgument("rope rho must be in [0, 1)");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += scores_a[i] - scores_b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (scores_a[i] - scores_b[i]) - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);

    RopeResult r;
    r.halfwidth = cfg.halfwidth;
    const double h = cfg.halfwidth;
    if (var <= 0.0) {
        // Point mass at the mean difference.
        if (mean < -h) r.p_left = 1.0;
        else if (mean > h) r.p_right = 1.0;
        else r.p_rope = 1.0;
    } else {
        const double scale =
            std::sqrt((1.0 / static_cast<double>(n) + cfg.rho / (1.0 - cfg.rho)) * var);
        const boost::math::students_t_distribution<double> t(static_cast<double>(n - 1));
        // Both tails are evaluated as lower-tail CDFs of arguments that swap
        // sign exactly under argument exchange, making antisymmetry bitwise.
        r.p_left = boost::math::cdf(t, (-h - mean) / scale);
        r.p_right = boost::math::cdf(t, (mean - h) / scale);
        r.p_rope = 1.0 - r.p_left - r.p_right;
        if (r.p_rope < 0.0) r.p_rope = 0.0;
    }

    if (r.p_right > cfg.decision_threshold) r.decision = RopeDecision::meaningfully_higher;
    else if (r.p_left > cfg.decision_threshold) r.decision = RopeDecision::meaningfully_lower;
    else if (r.p_rope > cfg.decision_threshold) r.decision = RopeDecision::practically_equivalent;
    else r.decision = RopeDecision::undecided;
    return r;
}

}  // namespace confaudit
