#pragma once

#include <span>
#include <string>
#include <vector>

#include "confaudit/dataset.hpp"

namespace confaudit {

// Binned counts of one value column conditioned on a binary column, shared
// equal-width bins across both conditions.
struct HistogramTable {
    std::vector<double> edges;    // bins + 1 edges
    std::vector<long> counts0;    // condition == 0
    std::vector<long> counts1;    // condition == 1
};

HistogramTable conditional_histogram(std::span<const double> values,
                                     std::span<const double> condition, int bins);

// Overlap coefficient of the two binned, per-condition-normalized
// distributions: sum over bins of min(p0, p1). 1 means identical.
double overlap_coefficient(const HistogramTable& t);

// CSV with one row per (stage, condition, bin): the named feature
// conditioned on the named binary confound, before and after confound
// regression fitted on all rows. Visualization contract of the CLI.
std::string histogram_csv(const Dataset& d, const std::string& feature,
                          const std::string& confound, int bins);

}  // namespace confaudit
