#include "confaudit/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "confaudit/confound_regression.hpp"
#include "confaudit/error.hpp"

namespace confaudit {

HistogramTable conditional_histogram(std::span<const double> values,
                                     std::span<const double> condition, int bins) {
    if (bins < 1) throw InvalidArgument("histogram needs at least 1 bin");
    if (values.size() != condition.size())
        throw InvalidArgument("histogram: value/condition length mismatch");
    for (double c : condition) {
        if (c != 0.0 && c != 1.0)
            throw InvalidArgument("histogram condition must be a 0/1 column");
    }

    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) hi = lo + 1.0;  // constant column still gets a usable bin

    HistogramTable t;
    t.edges.resize(static_cast<std::size_t>(bins) + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) t.edges[static_cast<std::size_t>(b)] = lo + width * b;
    t.counts0.assign(static_cast<std::size_t>(bins), 0);
    t.counts1.assign(static_cast<std::size_t>(bins), 0);

    for (std::size_t i = 0; i < values.size(); ++i) {
        auto b = static_cast<long>(std::floor((values[i] - lo) / width));
        b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
        auto& counts = condition[i] == 1.0 ? t.counts1 : t.counts0;
        counts[static_cast<std::size_t>(b)] += 1;
    }
    return t;
}

double overlap_coefficient(const HistogramTable& t) {
    long n0 = 0, n1 = 0;
    for (long c : t.counts0) n0 += c;
    for (long c : t.counts1) n1 += c;
    if (n0 == 0 || n1 == 0) throw InvalidArgument("overlap needs both conditions present");
    double overlap = 0.0;
    for (std::size_t b = 0; b < t.counts0.size(); ++b) {
        const double p0 = static_cast<double>(t.counts0[b]) / static_cast<double>(n0);
        const double p1 = static_cast<double>(t.counts1[b]) / static_cast<double>(n1);
        overlap += std::min(p0, p1);
    }
    return overlap;
}

std::string histogram_csv(const Dataset& d, const std::string& feature,
                          const std::string& confound, int bins) {
    std::size_t fj = d.n_features();
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        if (d.feature_names[j] == feature) fj = j;
    }
    if (fj == d.n_features()) throw DataError("histogram: unknown feature '" + feature + "'");
    std::size_t cj = d.n_confounds();
    for (std::size_t j = 0; j < d.n_confounds(); ++j) {
        if (d.confound_names[j] == confound) cj = j;
    }
    if (cj == d.n_confounds())
        throw DataError("histogram: unknown confound '" + confound + "'");

    const auto cond = d.confounds.col(cj);
    const std::vector<double> raw(d.features.col(fj).begin(), d.features.col(fj).end());

    // After-CR view: the confound model is fitted on all rows here, this is
    // a visualization of the dataset rather than a CV evaluation.
    const auto cr_model = fit_cr(d.features, d.confounds, d.confound_names);
    const auto transformed = transform_cr(cr_model, d.features, d.confounds);
    const std::vector<double> removed(transformed.x_cr.col(fj).begin(),
                                      transformed.x_cr.col(fj).end());

    std::ostringstream csv;
    csv << "stage,condition,bin,lo,hi,count\n";
    auto emit = [&](const char* stage, const HistogramTable& t) {
        for (std::size_t b = 0; b < t.counts0.size(); ++b) {
            csv << stage << ",0," << b << ',' << t.edges[b] << ',' << t.edges[b + 1] << ','
                << t.counts0[b] << '\n';
        }
        for (std::size_t b = 0; b < t.counts1.size(); ++b) {
            csv << stage << ",1," << b << ',' << t.edges[b] << ',' << t.edges[b + 1] << ','
                << t.counts1[b] << '\n';
        }
    };
    emit("raw", conditional_histogram(raw, cond, bins));
    emit("cr", conditional_histogram(removed, cond, bins));
    return csv.str();
}

}  // namespace confaudit
