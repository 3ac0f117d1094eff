#pragma once

#include <span>
#include <string>

namespace confaudit {

enum class RopeDecision {
    meaningfully_higher,
    meaningfully_lower,
    practically_equivalent,
    undecided,
};

std::string to_string(RopeDecision d);

struct RopeConfig {
    double halfwidth = 0.01;          // region of practical equivalence, score units
    double rho = 0.2;                 // fold correlation heuristic = test fraction
    double decision_threshold = 0.95;
};

struct RopeResult {
    double p_left = 0.0;   // P(mean difference < -halfwidth), i.e. a below b
    double p_rope = 0.0;
    double p_right = 0.0;  // P(mean difference > +halfwidth), i.e. a above b
    double halfwidth = 0.0;
    RopeDecision decision = RopeDecision::undecided;
};

// Bayesian correlated t-test on paired fold scores, differences a - b. The
// posterior of the mean difference is Student-t with n-1 degrees of freedom,
// location mean(d) and scale sqrt((1/n + rho/(1-rho)) * var(d)) with var the
// sample variance. Zero-variance differences collapse to a point mass.
// Swapping the arguments swaps p_left and p_right bitwise.
RopeResult rope_compare(std::span<const double> scores_a, std::span<const double> scores_b,
                        const RopeConfig& cfg = {});

}  // namespace confaudit
